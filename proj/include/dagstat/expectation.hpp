#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dagstat/sources.hpp"
#include "dagstat/tree.hpp"

namespace dagstat {

inline constexpr std::uint64_t kDefaultDpCap = 20000;

/// E_{sigma,b}(m) for m = 1..n at a fixed cut-point b.
class ExpectTable {
 public:
  ExpectTable(std::uint64_t b, std::vector<double> values)
      : b_(b), values_(std::move(values)) {}

  std::uint64_t cut_point() const noexcept { return b_; }
  std::uint64_t max_level() const noexcept { return values_.size() - 1; }
  /// E(m) for 1 <= m <= max_level().
  double at(std::uint64_t m) const { return values_.at(m); }
  /// Indexed by m; entry 0 is unused and zero.
  std::span<const double> values() const noexcept { return values_; }

  /// CSV with header "m,E", values printed with 10 decimals.
  void write_csv(std::ostream& out) const;

 private:
  std::uint64_t b_;
  std::vector<double> values_;
};

/// sigma rows for levels 2..n, computed once and shared across cut-points.
class SplitRows {
 public:
  /// Throws CapExceeded when n > cap.
  SplitRows(const SplitSource& src, std::uint64_t n, std::uint64_t cap = kDefaultDpCap);

  std::uint64_t max_level() const noexcept { return n_; }
  /// sigma(k, m-k) at index k-1, for 2 <= m <= max_level().
  std::span<const double> at(std::uint64_t m) const { return rows_.at(m); }

 private:
  std::uint64_t n_;
  std::vector<std::vector<double>> rows_;
};

/// E for every level up to rows.max_level() from cached rows.
ExpectTable expected_cut_counts(const SplitRows& rows, std::uint64_t b);

/// Expected number of nodes of leaf-size > b, bottom-up for every level up
/// to n. Uses the symmetrized recurrence when b+1 > m/2 and the split form
/// with a middle band otherwise. Throws CapExceeded when n > cap.
ExpectTable expected_cut_counts(const SplitSource& src, std::uint64_t b, std::uint64_t n,
                                std::uint64_t cap = kDefaultDpCap);

/// Brute force sum over all trees with n leaves of P_sigma(t) N(t, b).
double exact_cut_expectation(const SplitSource& src, std::uint64_t b, std::uint64_t n,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// Brute force D_sigma(n) = sum over trees with n leaves of P_sigma(t) |D_t|.
double exact_dag_average(const SplitSource& src, std::uint64_t n,
                         std::uint64_t cap = kDefaultEnumerationCap);

/// 4^b / 3, the count bound on distinct trees with at most b leaves.
double small_tree_bound(std::uint64_t b);

/// E_{sigma,b}(n) + 4^b/3, an upper bound on D_sigma(n) for every b <= n.
double cutpoint_upper_bound(const SplitSource& src, std::uint64_t b, std::uint64_t n,
                            std::uint64_t cap = kDefaultDpCap);

}  // namespace dagstat
