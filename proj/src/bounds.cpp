#include "dagstat/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "dagstat/dag.hpp"
#include "dagstat/detsource.hpp"
#include "dagstat/entropy.hpp"
#include "dagstat/numeric.hpp"
#include "dagstat/sampler.hpp"

namespace dagstat {
namespace {

constexpr double kSnap = 1e-9;
constexpr std::uint64_t kRhoFitMax = 1000;
constexpr std::uint64_t kBandFitMax = 4096;
constexpr std::uint64_t kDetOnset = 8;
constexpr std::uint64_t kDetMaxC = 64;

double snap(double x) {
  const double r = std::round(x);
  return std::fabs(x - r) < kSnap ? r : x;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double small_trees(std::uint64_t b) { return std::pow(4.0, static_cast<double>(b)) / 3.0; }

std::uint64_t fit_top(const SplitSource& src, std::uint64_t hi) {
  const auto top = src.max_level();
  return top ? std::min(hi, *top) : hi;
}

// Smallest integer c whose band holds the forced split for every n in
// [kDetOnset, kBandFitMax].
std::optional<double> fit_det_c(const SplitSource& src) {
  for (std::uint64_t c = 3; c <= kDetMaxC; ++c) {
    bool ok = true;
    for (std::uint64_t n = kDetOnset; ok && n <= kBandFitMax; ++n) {
      const Band band = middle_band(n, static_cast<double>(c));
      const std::uint64_t k = src.forced_split(n);
      ok = band.first <= k && k <= band.last;
    }
    if (ok) return static_cast<double>(c);
  }
  return std::nullopt;
}

}  // namespace

double PsiFunction::operator()(double x) const {
  switch (kind) {
    case Kind::kInverseShift: return 2.0 / (x - 1.0);
    case Kind::kPower: return c / std::pow(x, alpha);
    case Kind::kInverseLog: return c / std::log2(x);
  }
  return 0.0;
}

std::string PsiFunction::describe() const {
  switch (kind) {
    case Kind::kInverseShift: return "2/(x-1)";
    case Kind::kPower: return fmt(c) + "/x^" + fmt(alpha);
    case Kind::kInverseLog: return fmt(c) + "/log2(x)";
  }
  return {};
}

double PhiFunction::operator()(double n) const {
  return kind == Kind::kConstant ? c : c / std::sqrt(n);
}

std::string PhiFunction::describe() const {
  return kind == Kind::kConstant ? fmt(c) : fmt(c) + "/sqrt(n)";
}

std::optional<RhoFit> fit_rho(const SplitSource& src, std::uint64_t lo_n, std::uint64_t hi_n) {
  lo_n = std::max<std::uint64_t>(lo_n, 2);
  if (lo_n > hi_n) return std::nullopt;
  std::vector<double> level_max(hi_n - lo_n + 1);
  std::vector<double> row;
  for (std::uint64_t n = lo_n; n <= hi_n; ++n) {
    row.resize(n - 1);
    src.row(n, row);
    level_max[n - lo_n] = *std::max_element(row.begin(), row.end());
  }
  // Suffix maxima are nonincreasing in the start, so scan from the top and
  // remember the lowest start that still stays below 1.
  std::optional<RhoFit> best;
  double suffix = 0.0;
  for (std::uint64_t n = hi_n + 1; n-- > lo_n;) {
    suffix = std::max(suffix, level_max[n - lo_n]);
    if (suffix >= 1.0) break;
    best = RhoFit{suffix, n};
  }
  return best;
}

Band middle_band(std::uint64_t n, double c) {
  const double nd = static_cast<double>(n);
  const double lo = std::ceil(snap(nd / c));
  const double hi = std::floor(snap(nd - nd / c));
  Band band{static_cast<std::uint64_t>(std::max(lo, 1.0)),
            static_cast<std::uint64_t>(std::clamp(hi, 0.0, nd - 1.0))};
  return band;
}

double band_mass(const SplitSource& src, std::uint64_t n, double c) {
  const Band band = middle_band(n, c);
  if (band.first > band.last) return 0.0;
  const std::vector<double> row = src.row(n);
  CompensatedSum mass;
  for (std::uint64_t k = band.first; k <= band.last; ++k) mass.add(row[k - 1]);
  return mass.value();
}

PhiReport check_phi_membership(const SplitSource& src, double c, const PhiFunction& phi,
                               std::uint64_t lo_n, std::uint64_t hi_n) {
  if (!(c >= 3.0)) throw std::invalid_argument("check_phi_membership: c must be >= 3");
  if (lo_n < 2 || lo_n > hi_n) throw std::invalid_argument("check_phi_membership: need 2 <= lo <= hi");
  PhiReport report;
  for (std::uint64_t n = lo_n; n <= hi_n; ++n) {
    const double mass = band_mass(src, n, c);
    const double want = phi(static_cast<double>(n));
    const bool pass = mass >= want - kSnap;
    report.rows.push_back({n, middle_band(n, c), mass, want, pass});
    report.pass = report.pass && pass;
  }
  return report;
}

std::uint64_t log_cut_point(std::uint64_t n) {
  const std::uint64_t lg = n <= 1 ? 0 : std::bit_width(n - 1);
  return std::max<std::uint64_t>(1, (lg + 3) / 4);
}

std::uint64_t sqrt_cut_point(std::uint64_t n) {
  std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return r;
}

double psi_upper(const PsiFunction& psi, std::uint64_t n) {
  const std::uint64_t b = log_cut_point(n);
  return 4.0 * static_cast<double>(n) * psi(static_cast<double>(b)) + small_trees(b);
}

double rho_lower(double rho, std::uint64_t n_rho, std::uint64_t n) {
  return entropy_lower_bound(rho, n_rho, n) / (2.0 * field_width(n));
}

double phi_upper(double c, const PhiFunction& phi, std::uint64_t n) {
  const std::uint64_t b = log_cut_point(n);
  const double nd = static_cast<double>(n);
  return c * nd / (phi(nd) * static_cast<double>(b)) + small_trees(b);
}

double det_upper(double c, std::uint64_t n) {
  const std::uint64_t b = sqrt_cut_point(n);
  return c * static_cast<double>(n) / static_cast<double>(b) + static_cast<double>(b);
}

double theorem_bound(BoundKind kind, const BoundProfile& p, std::uint64_t n) {
  if (n < 2) throw std::invalid_argument("theorem_bound: n must be >= 2");
  switch (kind) {
    case BoundKind::kPsiUpper:
      if (!p.psi) throw std::invalid_argument("theorem_bound: profile has no psi");
      return psi_upper(*p.psi, n);
    case BoundKind::kRhoLower:
      if (!p.rho) throw std::invalid_argument("theorem_bound: profile has no rho");
      return rho_lower(*p.rho, p.n_rho, n);
    case BoundKind::kPhiUpper:
      if (!p.phi) throw std::invalid_argument("theorem_bound: profile has no phi");
      return phi_upper(p.c, *p.phi, n);
    case BoundKind::kDetUpper:
      if (!p.phi || p.phi->kind != PhiFunction::Kind::kConstant || p.phi->c != 1.0)
        throw std::invalid_argument("theorem_bound: det bound needs phi = 1");
      return det_upper(p.c, n);
  }
  throw std::invalid_argument("theorem_bound: unknown kind");
}

BoundProfile default_profile(const SplitSource& src) {
  BoundProfile p;
  auto set_rho = [&] {
    if (auto fit = fit_rho(src, 3, fit_top(src, kRhoFitMax))) {
      p.rho = fit->rho;
      p.n_rho = fit->n_rho;
    }
  };
  const auto& model = src.model();
  if (std::holds_alternative<BstModel>(model)) {
    p.rho = 0.5;
    p.n_rho = 3;
    p.psi = PsiFunction::inverse_shift();
    p.phi = PhiFunction::constant(0.5);
    p.c = 4.0;
  } else if (const auto* bin = std::get_if<BinomialModel>(&model)) {
    set_rho();
    const double q = std::min(bin->p, 1.0 - bin->p);
    if (q > 0.0) {
      p.c = 6.0 / q;
      p.phi = PhiFunction::constant(1.0 - 4.0 * (1.0 - q) / (q + 4.0));
      p.phi_onset = 3;
    }
  } else if (std::holds_alternative<CatalanModel>(model)) {
    set_rho();
    p.c = 3.0;
    const std::uint64_t top = fit_top(src, kBandFitMax);
    double scale = INFINITY;
    for (std::uint64_t n = 3; n <= top; ++n)
      scale = std::min(scale, band_mass(src, n, p.c) * std::sqrt(static_cast<double>(n)));
    if (std::isfinite(scale) && scale > 0.0) {
      p.phi = PhiFunction::inverse_sqrt(scale);
      p.phi_onset = 3;
    }
  } else if (src.is_deterministic()) {
    if (auto c = fit_det_c(src)) {
      p.c = *c;
      p.phi = PhiFunction::constant(1.0);
      p.phi_onset = kDetOnset;
    }
  } else {
    set_rho();
  }
  return p;
}

Normalizer parse_normalizer(const std::string& name) {
  if (name == "log2") return Normalizer::kLog2;
  if (name == "sqrtlog2") return Normalizer::kSqrtLog2;
  if (name == "one") return Normalizer::kOne;
  throw std::invalid_argument("unknown normalizer '" + name + "' (log2, sqrtlog2, one)");
}

double normalizer_value(Normalizer norm, std::uint64_t n) {
  const double lg = std::log2(static_cast<double>(n));
  switch (norm) {
    case Normalizer::kLog2: return lg;
    case Normalizer::kSqrtLog2: return std::sqrt(lg);
    case Normalizer::kOne: return 1.0;
  }
  return 1.0;
}

std::vector<TrendRow> trend_report(const SplitSource& src, std::span<const std::uint64_t> ns,
                                   std::uint64_t reps, std::uint64_t seed, Normalizer norm,
                                   unsigned workers) {
  if (!std::is_sorted(ns.begin(), ns.end()))
    throw std::invalid_argument("trend_report: n list must be ascending");
  const BoundProfile profile = default_profile(src);
  std::vector<TrendRow> rows;
  rows.reserve(ns.size());
  for (std::uint64_t n : ns) {
    if (n < 2) throw std::invalid_argument("trend_report: n must be >= 2");
    TrendRow row{n, 0.0, 0.0, 0.0, std::nullopt, std::nullopt};
    if (src.is_deterministic()) {
      const DeterministicModel& det = std::get<DeterministicModel>(src.model());
      row.estimate = static_cast<double>(det_dag_size(det.split, n));
    } else {
      const EstimateReport est = estimate_dag_size(src, n, reps, derive_seed(seed, n), workers);
      row.estimate = est.mean;
      row.std_error = est.std_error;
    }
    row.normalized = row.estimate * normalizer_value(norm, n) / static_cast<double>(n);
    if (profile.psi) {
      row.bound_upper = psi_upper(*profile.psi, n);
    } else if (profile.phi && n >= profile.phi_onset) {
      row.bound_upper = src.is_deterministic() ? det_upper(profile.c, n)
                                               : phi_upper(profile.c, *profile.phi, n);
    }
    if (profile.rho && n >= profile.n_rho) row.bound_lower = rho_lower(*profile.rho, profile.n_rho, n);
    rows.push_back(row);
  }
  return rows;
}

void write_trend_csv(std::ostream& out, std::span<const TrendRow> rows) {
  out << "n,estimate,stderr,normalized,bound_upper,bound_lower\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  for (const TrendRow& r : rows) {
    out << r.n << ',' << num(r.estimate) << ',' << num(r.std_error) << ',' << num(r.normalized) << ','
        << (r.bound_upper ? num(*r.bound_upper) : "") << ','
        << (r.bound_lower ? num(*r.bound_lower) : "") << '\n';
  }
}

}  // namespace dagstat
