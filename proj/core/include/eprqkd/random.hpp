#pragma once

#include <cstdint>
#include <random>

#include "eprqkd/basis.hpp"

namespace eprqkd {

/// Seeded pseudo-random stream. Two streams built from the same (seed, stream)
/// pair produce identical sequences; distinct stream ids give independent
/// sequences for parallel or per-grid-point work.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Fair coin, the 50-50 beam splitter.
  Basis basis() { return bernoulli(0.5) ? Basis::p : Basis::x; }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  RandomStream split(std::uint64_t stream) const { return RandomStream(seed_, stream); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace eprqkd
