#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace anorand {

// Sub-stream identifiers. Each consumer draws from its own stream so that
// adding draws in one place never shifts the sequence seen by another.
enum class Stream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kLabelGen = 3,
  kData = 4,
  kSplit = 5,
  kTrial = 6,
};

// Deterministic pseudo-random source.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distributions are implemented here rather than taken from
// <random>, whose distribution algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  // Independent generator derived from (seed, stream).
  Rng split(std::uint64_t stream) const;
  Rng split(Stream stream) const { return split(static_cast<std::uint64_t>(stream)); }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer on [0, n). n must be positive.
  std::size_t index(std::size_t n);
  // Standard normal (Marsaglia polar method).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(values[i - 1], values[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& values) {
    shuffle(std::span<T>(values));
  }

  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer; used for seed derivation.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

}  // namespace anorand
