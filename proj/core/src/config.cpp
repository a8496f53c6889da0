// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "groupcl/error.hpp"

namespace groupcl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  return parse_key_values(in, path.string());
}

std::pair<std::string, std::string> parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || trim(text.substr(0, eq)).empty()) {
    throw ConfigError("override '" + text + "' is not key=value");
  }
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

KeyValues merge_key_values(const KeyValues& base, const KeyValues& overrides) {
  KeyValues out = base;
  for (const auto& [k, v] : overrides) {
    bool replaced = false;
    for (auto& entry : out)
      if (entry.first == k) {
        entry.second = v;
        replaced = true;
      }
    if (!replaced) out.emplace_back(k, v);
  }
  return out;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(parse_u64(key, value));
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError("key '" + key + "': '" + value + "' is not a non-negative integer");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  in.imbue(std::locale::classic());
  double out = 0.0;
  in >> out;
  if (value.empty() || in.fail() || !in.eof() || !std::isfinite(out)) {
    throw ConfigError("key '" + key + "': '" + value + "' is not a finite number");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': '" + value + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::kGroupCL: return "groupcl";
    case Pipeline::kGroupIG: return "groupig";
    case Pipeline::kGraphCLBaseline: return "graphcl-baseline";
  }
  return "unknown";
}

std::string_view estimator_name(Estimator e) { return e == Estimator::kNonParam ? "nonparam" : "param"; }

bool operator==(const AugmentationPolicy& a, const AugmentationPolicy& b) {
  return a.kinds == b.kinds && a.ratio == b.ratio;
}

void RunConfig::validate() const {
  if (p == 0) throw ConfigError("p must be at least 1");
  if (d_o == 0 || d_o % p != 0) throw ConfigError("d_o=" + std::to_string(d_o) + " must be divisible by p=" + std::to_string(p));
  if (d_k == 0) throw ConfigError("d_k must be positive");
  if (gin_hidden == 0) throw ConfigError("gin_hidden must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  if (varnet_steps == 0) throw ConfigError("varnet_steps must be at least 1");
  if (estimator == Estimator::kParam && p < 2 && pipeline != Pipeline::kGraphCLBaseline) {
    throw ConfigError("estimator=param needs p >= 2");
  }
  if (node_projection == NodeProjection::kIdentity && pipeline == Pipeline::kGroupIG &&
      representor_input() != value_dim()) {
    throw ConfigError("node_projection=identity needs the node width to equal d_o/p");
  }
  if (!(probe_lr > 0.0) || probe_iterations == 0) throw ConfigError("probe settings must be positive");
  augmentation.validate();
}

bool RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "pipeline") {
    if (value == "groupcl") pipeline = Pipeline::kGroupCL;
    else if (value == "groupig") pipeline = Pipeline::kGroupIG;
    else if (value == "graphcl-baseline") pipeline = Pipeline::kGraphCLBaseline;
    else throw ConfigError("key 'pipeline': unknown value '" + value + "'");
  } else if (key == "p") p = parse_size(key, value);
  else if (key == "d_o") d_o = parse_size(key, value);
  else if (key == "d_k") d_k = parse_size(key, value);
  else if (key == "d_n") d_n = parse_size(key, value);
  else if (key == "gin_layers") gin_layers = parse_size(key, value);
  else if (key == "gin_hidden") gin_hidden = parse_size(key, value);
  else if (key == "learn_eps") learn_eps = parse_bool(key, value);
  else if (key == "lambda") lambda = parse_double(key, value);
  else if (key == "estimator") {
    if (value == "nonparam") estimator = Estimator::kNonParam;
    else if (value == "param") estimator = Estimator::kParam;
    else throw ConfigError("key 'estimator': unknown value '" + value + "'");
  } else if (key == "varnet_steps") varnet_steps = parse_size(key, value);
  else if (key == "aug_kinds") {
    augmentation.kinds.clear();
    for (const auto& name : split_list(value)) augmentation.kinds.push_back(parse_augmentation(name));
  } else if (key == "aug_ratio") augmentation.ratio = parse_double(key, value);
  else if (key == "lr") lr = parse_double(key, value);
  else if (key == "epochs") epochs = parse_size(key, value);
  else if (key == "batch_size") batch_size = parse_size(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "tie_views") tie_views = parse_bool(key, value);
  else if (key == "scale_scores") scale_scores = parse_bool(key, value);
  else if (key == "node_projection") {
    if (value == "linear") node_projection = NodeProjection::kLinear;
    else if (value == "identity") node_projection = NodeProjection::kIdentity;
    else throw ConfigError("key 'node_projection': unknown value '" + value + "'");
  } else if (key == "probe_iterations") probe_iterations = parse_size(key, value);
  else if (key == "probe_lr") probe_lr = parse_double(key, value);
  else return false;
  return true;
}

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
  RunConfig c;
  for (const auto& [k, v] : kv) {
    if (!c.set(k, v)) throw ConfigError("unknown config key '" + k + "'");
  }
  c.validate();
  return c;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  std::string kinds;
  for (auto k : augmentation.kinds) kinds += (kinds.empty() ? "" : ",") + std::string(augmentation_name(k));
  out << "pipeline=" << pipeline_name(pipeline) << '\n'
      << "p=" << p << '\n'
      << "d_o=" << d_o << '\n'
      << "d_k=" << d_k << '\n'
      << "d_n=" << d_n << '\n'
      << "gin_layers=" << gin_layers << '\n'
      << "gin_hidden=" << gin_hidden << '\n'
      << "learn_eps=" << (learn_eps ? "true" : "false") << '\n'
      << "lambda=" << format_double(lambda) << '\n'
      << "estimator=" << estimator_name(estimator) << '\n'
      << "varnet_steps=" << varnet_steps << '\n'
      << "aug_kinds=" << kinds << '\n'
      << "aug_ratio=" << format_double(augmentation.ratio) << '\n'
      << "lr=" << format_double(lr) << '\n'
      << "epochs=" << epochs << '\n'
      << "batch_size=" << batch_size << '\n'
      << "seed=" << seed << '\n'
      << "tie_views=" << (tie_views ? "true" : "false") << '\n'
      << "scale_scores=" << (scale_scores ? "true" : "false") << '\n'
      << "node_projection=" << (node_projection == NodeProjection::kLinear ? "linear" : "identity") << '\n'
      << "probe_iterations=" << probe_iterations << '\n'
      << "probe_lr=" << format_double(probe_lr) << '\n';
  return out.str();
}

}  // namespace groupcl
