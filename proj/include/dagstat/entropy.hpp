#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dagstat/sources.hpp"
#include "dagstat/tree.hpp"

namespace dagstat {

/// Default cap on n for the identity-based entropy; cost is O(n^3).
inline constexpr std::uint64_t kDefaultEntropyCap = 512;

/// h_k in bits: Shannon entropy of the split distribution at level k >= 2.
double split_entropy(const SplitSource& src, std::uint64_t k);

struct EntropyTerm {
  std::uint64_t j;
  double h;
  double e_prev;  // E_{j-1}(n)
  double e_cur;   // E_j(n)
  double contribution;
};

struct EntropyProfile {
  std::uint64_t n = 0;
  double H = 0.0;
  /// h[k] for k = 2..n; entries 0 and 1 are zero.
  std::vector<double> h;
  /// One term per j = 2..n.
  std::vector<EntropyTerm> terms;

  /// CSV with header "j,h_j,E_{j-1},E_j,contribution".
  void write_csv(std::ostream& out) const;
};

/// H(X^n) = sum_{j=2}^{n} (E_{j-1}(n) - E_j(n)) h_j. The weight of h_j is the
/// expected number of nodes with leaf-size exactly j.
EntropyProfile entropy_profile(const SplitSource& src, std::uint64_t n,
                               std::uint64_t cap = kDefaultEntropyCap);
double source_entropy(const SplitSource& src, std::uint64_t n,
                      std::uint64_t cap = kDefaultEntropyCap);

/// Direct sum of P(t) log(1/P(t)) over all trees with n leaves.
double brute_entropy(const SplitSource& src, std::uint64_t n,
                     std::uint64_t cap = kDefaultEnumerationCap);

/// log(1/rho) n / (4 N - 4). Requires 0 < rho <= 1, N >= 2, n >= N.
double entropy_lower_bound(double rho, std::uint64_t n_sigma, std::uint64_t n);

}  // namespace dagstat
