// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include "groupcl/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "groupcl/error.hpp"

namespace groupcl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::derive(std::uint64_t seed, std::string_view stream, std::initializer_list<std::uint64_t> indices) {
  // FNV-1a over the stream name, then fold in the indices.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = mix64(seed ^ mix64(h));
  for (std::uint64_t i : indices) s = mix64(s ^ mix64(i + 0x632be59bd9b4e019ULL));
  return Rng(s);
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ContractError("rng: index range is empty");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  // Box-Muller, one value per call; u1 in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  if (k > n) throw ContractError("rng: cannot draw " + std::to_string(k) + " of " + std::to_string(n));
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + index(n - i)]);
  pool.resize(k);
  return pool;
}

}  // namespace groupcl
