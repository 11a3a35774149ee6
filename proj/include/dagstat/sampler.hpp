#pragma once

#include <cstdint>
#include <random>

#include "dagstat/sources.hpp"
#include "dagstat/tree.hpp"

namespace dagstat {

/// Deterministic 64-bit generator. Only the raw engine output is used, so
/// streams are bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound), bound >= 1, by rejection.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer applied to (master, index); used to derive
/// independent per-replicate seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Draws k in 1..n-1 with probability sigma(k, n-k). n = 2 and deterministic
/// sources consume no randomness.
std::uint64_t sample_split(const SplitSource& src, std::uint64_t n, Rng& rng);

/// Random tree with n leaves distributed per P_sigma. Splits are drawn in
/// preorder, left subtree first.
Tree sample_tree(const SplitSource& src, std::uint64_t n, Rng& rng);

/// DAG size of the tree sample_tree would produce from the same rng state,
/// computed by hash-consing during generation without storing the tree.
std::uint64_t sample_dag_size(const SplitSource& src, std::uint64_t n, Rng& rng);

struct EstimateReport {
  std::uint64_t n = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
};

/// Normal-approximation z value for the 95% interval.
inline constexpr double kCi95Z = 1.96;

/// Monte Carlo estimate of the average DAG size. Replicate r uses
/// Rng(derive_seed(seed, r)); the result does not depend on `workers`.
EstimateReport estimate_dag_size(const SplitSource& src, std::uint64_t n, std::uint64_t reps,
                                 std::uint64_t seed, unsigned workers = 1);

}  // namespace dagstat
