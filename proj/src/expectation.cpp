#include "dagstat/expectation.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "dagstat/dag.hpp"

namespace dagstat {

void ExpectTable::write_csv(std::ostream& out) const {
  out << "m,E\n";
  char buf[64];
  for (std::uint64_t m = 1; m < values_.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%.10f", values_[m]);
    out << m << ',' << buf << '\n';
  }
}

namespace {

// row[k-1] = sigma(k, m-k). Every k in the tail sum exceeds m/2, so sigma*
// never lands on the diagonal there.
double next_level(std::span<const double> row, std::uint64_t m, std::uint64_t b,
                  const std::vector<double>& e) {
  auto sigma_star = [&](std::uint64_t k) { return row[k - 1] + row[m - k - 1]; };
  double total = 1.0;
  if (2 * (b + 1) > m) {
    for (std::uint64_t k = b + 1; k < m; ++k) total += sigma_star(k) * e[k];
  } else {
    for (std::uint64_t k = b + 1; k + b + 1 <= m; ++k) total += row[k - 1] * (e[k] + e[m - k]);
    for (std::uint64_t k = m - b; k < m; ++k) total += sigma_star(k) * e[k];
  }
  return total;
}

void check_args(std::uint64_t b, std::uint64_t n) {
  if (b == 0) throw std::invalid_argument("expected_cut_counts: b must be >= 1");
  if (n == 0) throw std::invalid_argument("expected_cut_counts: n must be >= 1");
}

}  // namespace

SplitRows::SplitRows(const SplitSource& src, std::uint64_t n, std::uint64_t cap) : n_(n) {
  if (n > cap) throw CapExceeded("split rows", n, cap);
  rows_.resize(n + 1);
  for (std::uint64_t m = 2; m <= n; ++m) rows_[m] = src.row(m);
}

ExpectTable expected_cut_counts(const SplitRows& rows, std::uint64_t b) {
  const std::uint64_t n = rows.max_level();
  check_args(b, n);
  std::vector<double> e(n + 1, 0.0);
  for (std::uint64_t m = b + 1; m <= n; ++m) e[m] = next_level(rows.at(m), m, b, e);
  return ExpectTable(b, std::move(e));
}

ExpectTable expected_cut_counts(const SplitSource& src, std::uint64_t b, std::uint64_t n,
                                std::uint64_t cap) {
  check_args(b, n);
  if (n > cap) throw CapExceeded("expected_cut_counts", n, cap);
  std::vector<double> e(n + 1, 0.0);
  std::vector<double> row;
  for (std::uint64_t m = b + 1; m <= n; ++m) {
    row.resize(m - 1);
    src.row(m, row);
    e[m] = next_level(row, m, b, e);
  }
  return ExpectTable(b, std::move(e));
}

double exact_cut_expectation(const SplitSource& src, std::uint64_t b, std::uint64_t n,
                             std::uint64_t cap) {
  if (b == 0) throw std::invalid_argument("exact_cut_expectation: b must be >= 1");
  double total = 0.0;
  for_each_tree(
      n, [&](const Tree& t) { total += prob_of_tree(src, t) * static_cast<double>(count_above(t, b)); },
      cap);
  return total;
}

double exact_dag_average(const SplitSource& src, std::uint64_t n, std::uint64_t cap) {
  double total = 0.0;
  for_each_tree(
      n,
      [&](const Tree& t) {
        const double p = prob_of_tree(src, t);
        if (p > 0.0) total += p * static_cast<double>(dag_size(t));
      },
      cap);
  return total;
}

double small_tree_bound(std::uint64_t b) { return std::pow(4.0, static_cast<double>(b)) / 3.0; }

double cutpoint_upper_bound(const SplitSource& src, std::uint64_t b, std::uint64_t n,
                            std::uint64_t cap) {
  if (b == 0 || b > n) throw std::invalid_argument("cutpoint_upper_bound: need 1 <= b <= n");
  const double e = b == n ? 0.0 : expected_cut_counts(src, b, n, cap).at(n);
  return e + small_tree_bound(b);
}

}  // namespace dagstat
