// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace groupcl {

/// Deterministic random stream. The engine never uses std:: distributions
/// (their output is implementation-defined); every draw is computed here
/// from raw mt19937_64 words so streams are reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent sub-stream keyed by a name and a tuple of indices, e.g.
  /// derive(run_seed, "augment", {epoch, graph, view}).
  static Rng derive(std::uint64_t seed, std::string_view stream, std::initializer_list<std::uint64_t> indices = {});

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t index(std::uint64_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace groupcl
