#include "dagstat/entropy.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "dagstat/expectation.hpp"
#include "dagstat/numeric.hpp"

namespace dagstat {
namespace {

double entropy_bits(std::span<const double> pmf) {
  CompensatedSum h;
  for (double p : pmf)
    if (p > 0.0) h.add(-p * std::log2(p));
  return h.value();
}

}  // namespace

double split_entropy(const SplitSource& src, std::uint64_t k) {
  if (k < 2) throw std::invalid_argument("split_entropy: k must be >= 2");
  if (k == 2) return 0.0;
  return entropy_bits(src.row(k));
}

void EntropyProfile::write_csv(std::ostream& out) const {
  out << "j,h_j,E_{j-1},E_j,contribution\n";
  char buf[160];
  for (const EntropyTerm& t : terms) {
    std::snprintf(buf, sizeof buf, "%llu,%.12g,%.12g,%.12g,%.12g\n",
                  static_cast<unsigned long long>(t.j), t.h, t.e_prev, t.e_cur, t.contribution);
    out << buf;
  }
}

EntropyProfile entropy_profile(const SplitSource& src, std::uint64_t n, std::uint64_t cap) {
  if (n == 0) throw std::invalid_argument("source_entropy: n must be >= 1");
  if (n > cap) throw CapExceeded("source_entropy", n, cap);
  EntropyProfile profile;
  profile.n = n;
  profile.h.assign(n + 1, 0.0);
  if (n == 1) return profile;

  const SplitRows rows(src, n, cap);
  for (std::uint64_t k = 3; k <= n; ++k) profile.h[k] = entropy_bits(rows.at(k));

  // e[j] = E_j(n); E_1(n) = n - 1 internal nodes, E_n(n) = 0.
  std::vector<double> e(n + 1, 0.0);
  e[1] = static_cast<double>(n - 1);
  for (std::uint64_t j = 2; j < n; ++j) e[j] = expected_cut_counts(rows, j).at(n);

  CompensatedSum total;
  for (std::uint64_t j = 2; j <= n; ++j) {
    const double c = (e[j - 1] - e[j]) * profile.h[j];
    profile.terms.push_back({j, profile.h[j], e[j - 1], e[j], c});
    total.add(c);
  }
  profile.H = total.value();
  return profile;
}

double source_entropy(const SplitSource& src, std::uint64_t n, std::uint64_t cap) {
  return entropy_profile(src, n, cap).H;
}

double brute_entropy(const SplitSource& src, std::uint64_t n, std::uint64_t cap) {
  CompensatedSum h;
  for_each_tree(
      n,
      [&](const Tree& t) {
        const double p = prob_of_tree(src, t);
        if (p > 0.0) h.add(-p * std::log2(p));
      },
      cap);
  return h.value();
}

double entropy_lower_bound(double rho, std::uint64_t n_sigma, std::uint64_t n) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("entropy_lower_bound: rho must be in (0,1]");
  if (n_sigma < 2) throw std::invalid_argument("entropy_lower_bound: N must be >= 2");
  if (n < n_sigma) throw std::invalid_argument("entropy_lower_bound: n must be >= N");
  return std::log2(1.0 / rho) * static_cast<double>(n) / static_cast<double>(4 * n_sigma - 4);
}

}  // namespace dagstat
