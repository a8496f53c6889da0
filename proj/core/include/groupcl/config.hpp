// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "groupcl/augment.hpp"

namespace groupcl {

/// Ordered key=value pairs as read from a config file or overrides.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// skipped. Duplicate keys and lines without '=' are ConfigErrors.
KeyValues parse_key_values(std::istream& in, const std::string& source);
KeyValues load_key_values(const std::filesystem::path& path);
/// Parses a single "key=value" override.
std::pair<std::string, std::string> parse_override(const std::string& text);
/// Later entries replace earlier ones with the same key.
KeyValues merge_key_values(const KeyValues& base, const KeyValues& overrides);

enum class Pipeline { kGroupCL, kGroupIG, kGraphCLBaseline };
enum class Estimator { kNonParam, kParam };
enum class NodeProjection { kLinear, kIdentity };

std::string_view pipeline_name(Pipeline p);
std::string_view estimator_name(Estimator e);

struct RunConfig {
  Pipeline pipeline = Pipeline::kGroupCL;
  std::size_t p = 4;
  std::size_t d_o = 160;
  std::size_t d_k = 100;
  /// Representor input width; 0 uses the GIN hidden width directly.
  std::size_t d_n = 0;
  std::size_t gin_layers = 3;
  std::size_t gin_hidden = 32;
  bool learn_eps = false;
  double lambda = 0.5;
  Estimator estimator = Estimator::kNonParam;
  std::size_t varnet_steps = 1;
  AugmentationPolicy augmentation;
  double lr = 1e-3;
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  bool tie_views = true;
  bool scale_scores = false;
  NodeProjection node_projection = NodeProjection::kLinear;
  std::size_t probe_iterations = 300;
  double probe_lr = 0.01;

  std::size_t value_dim() const { return d_o / p; }
  std::size_t representor_input() const { return d_n == 0 ? gin_hidden : d_n; }

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  /// Sets one key; returns false when the key is not a RunConfig key.
  bool set(const std::string& key, const std::string& value);
  /// Every key applied; unknown keys are ConfigErrors.
  static RunConfig from_key_values(const KeyValues& kv);
  /// Canonical text form (one key per line, fixed order); parsing it back
  /// yields an identical config.
  std::string to_text() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

bool operator==(const AugmentationPolicy& a, const AugmentationPolicy& b);

/// Strict scalar parsers shared by the config readers.
std::size_t parse_size(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
std::vector<std::string> split_list(const std::string& value);
/// Round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace groupcl
