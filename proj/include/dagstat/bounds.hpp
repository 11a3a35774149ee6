#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dagstat/sources.hpp"

namespace dagstat {

/// Decreasing bound psi on split masses, on x >= 2.
struct PsiFunction {
  enum class Kind { kInverseShift, kPower, kInverseLog };
  Kind kind = Kind::kInverseShift;
  double c = 2.0;
  double alpha = 1.0;

  /// x -> 2/(x-1).
  static PsiFunction inverse_shift() { return {}; }
  /// x -> c / x^alpha.
  static PsiFunction power(double c, double alpha) { return {Kind::kPower, c, alpha}; }
  /// x -> c / log2(x).
  static PsiFunction inverse_log(double c) { return {Kind::kInverseLog, c, 1.0}; }

  double operator()(double x) const;
  std::string describe() const;
};

/// Lower bound phi(n) in (0, 1] on the middle-band mass.
struct PhiFunction {
  enum class Kind { kConstant, kInverseSqrt };
  Kind kind = Kind::kConstant;
  double c = 1.0;

  static PhiFunction constant(double v) { return {Kind::kConstant, v}; }
  /// n -> c / sqrt(n).
  static PhiFunction inverse_sqrt(double c) { return {Kind::kInverseSqrt, c}; }

  double operator()(double n) const;
  std::string describe() const;
};

/// Class-membership constants of one source. Absent members mean the
/// source is not known to belong to the class.
struct BoundProfile {
  std::optional<double> rho;
  std::uint64_t n_rho = 0;  // rho holds for n >= n_rho
  std::optional<PsiFunction> psi;
  std::optional<PhiFunction> phi;
  double c = 0.0;            // band [n/c, n - n/c]; meaningful when phi is set
  std::uint64_t phi_onset = 2;  // phi holds for n >= phi_onset
};

struct RhoFit {
  double rho;
  std::uint64_t n_rho;
};

/// rho = max sigma(k, n-k) over lo_n <= n <= hi_n with n >= n_rho, taking
/// the smallest n_rho that makes rho < 1. nullopt when none does.
std::optional<RhoFit> fit_rho(const SplitSource& src, std::uint64_t lo_n, std::uint64_t hi_n);

/// Integer band ceil(n/c)..floor(n - n/c) clamped to 1..n-1; empty when
/// first > last. Quotients within 1e-9 of an integer snap to it.
struct Band {
  std::uint64_t first;
  std::uint64_t last;
};
Band middle_band(std::uint64_t n, double c);
double band_mass(const SplitSource& src, std::uint64_t n, double c);

struct PhiRow {
  std::uint64_t n;
  Band band;
  double mass;
  double phi;
  bool pass;
};
struct PhiReport {
  std::vector<PhiRow> rows;
  bool pass = true;
};
/// Requires c >= 3 and 2 <= lo_n <= hi_n.
PhiReport check_phi_membership(const SplitSource& src, double c, const PhiFunction& phi,
                               std::uint64_t lo_n, std::uint64_t hi_n);

/// ceil(log4(n)/2) = ceil(ceil(log2 n)/4), at least 1.
std::uint64_t log_cut_point(std::uint64_t n);
/// ceil(sqrt(n)).
std::uint64_t sqrt_cut_point(std::uint64_t n);

/// 4 n psi(b) + 4^b/3 with b = log_cut_point(n).
double psi_upper(const PsiFunction& psi, std::uint64_t n);
/// log(1/rho) n / ((4 N - 4) 2 ceil(log2(2n - 1))).
double rho_lower(double rho, std::uint64_t n_rho, std::uint64_t n);
/// c n / (phi(n) b) + 4^b/3 with b = log_cut_point(n).
double phi_upper(double c, const PhiFunction& phi, std::uint64_t n);
/// c n / b + b with b = sqrt_cut_point(n); deterministic sources with phi = 1.
double det_upper(double c, std::uint64_t n);

enum class BoundKind { kPsiUpper, kRhoLower, kPhiUpper, kDetUpper };
/// Evaluates the named bound from the profile; throws std::invalid_argument
/// when the profile lacks the required constants.
double theorem_bound(BoundKind kind, const BoundProfile& profile, std::uint64_t n);

/// Profile of a source: known constants for bst and binomial, fitted rho for
/// the rest, a fitted c / sqrt(n) band for catalan, and a fitted integer c
/// with phi = 1 for deterministic sources.
BoundProfile default_profile(const SplitSource& src);

enum class Normalizer { kLog2, kSqrtLog2, kOne };
Normalizer parse_normalizer(const std::string& name);
double normalizer_value(Normalizer norm, std::uint64_t n);

struct TrendRow {
  std::uint64_t n;
  double estimate;
  double std_error;
  double normalized;  // estimate * normalizer(n) / n
  std::optional<double> bound_upper;
  std::optional<double> bound_lower;
};

/// One row per n. Random sources use estimate_dag_size with seed
/// derive_seed(seed, n); deterministic sources use the exact DAG size.
std::vector<TrendRow> trend_report(const SplitSource& src, std::span<const std::uint64_t> ns,
                                   std::uint64_t reps, std::uint64_t seed, Normalizer norm,
                                   unsigned workers = 1);
/// CSV with header "n,estimate,stderr,normalized,bound_upper,bound_lower";
/// an absent bound is an empty field.
void write_trend_csv(std::ostream& out, std::span<const TrendRow> rows);

}  // namespace dagstat
