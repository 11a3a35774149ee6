#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dagstat/bounds.hpp"
#include "dagstat/expectation.hpp"
#include "oracles.hpp"

using namespace dagstat;
using doctest::Approx;

TEST_CASE("psi and phi functions") {
  const PsiFunction shift = PsiFunction::inverse_shift();
  CHECK(shift(3.0) == 1.0);
  CHECK(shift(5.0) == 0.5);
  CHECK(shift.describe() == "2/(x-1)");
  CHECK(PsiFunction::power(3.0, 0.5)(4.0) == Approx(1.5));
  CHECK(PsiFunction::inverse_log(4.0)(16.0) == Approx(1.0));
  CHECK(PhiFunction::constant(0.5)(1e9) == 0.5);
  CHECK(PhiFunction::inverse_sqrt(2.0)(16.0) == Approx(0.5));
  CHECK(PhiFunction::inverse_sqrt(2.0).describe() == "2/sqrt(n)");
}

TEST_CASE("fit_rho") {
  const auto bst = fit_rho(SplitSource::bst(), 3, 1000);
  REQUIRE(bst);
  CHECK(bst->rho == 0.5);
  CHECK(bst->n_rho == 3);
  // Level 2 has sigma = 1, so the fit starts at 3.
  const auto from2 = fit_rho(SplitSource::bst(), 2, 50);
  REQUIRE(from2);
  CHECK(from2->n_rho == 3);
  CHECK_FALSE(fit_rho(make_deterministic(quarter_split), 3, 500));
  CHECK_FALSE(fit_rho(SplitSource::bst(), 10, 9));
  // Catalan approaches 1/4 from above; the maximum sits at k = 1.
  const auto cat = fit_rho(SplitSource::uniform_catalan(), 100, 1000);
  REQUIRE(cat);
  CHECK(std::fabs(cat->rho - 0.25) <= 0.01);
  const double want = 100.0 / (2.0 * (2.0 * 100.0 - 3.0));
  CHECK(cat->rho == Approx(want).epsilon(1e-10));
  const auto cat3 = fit_rho(SplitSource::uniform_catalan(), 3, 1000);
  REQUIRE(cat3);
  CHECK(cat3->rho == Approx(0.5));
}

TEST_CASE("middle band") {
  Band b = middle_band(12, 4.0);
  CHECK(b.first == 3);
  CHECK(b.last == 9);
  b = middle_band(10, 4.0);
  CHECK(b.first == 3);
  CHECK(b.last == 7);
  b = middle_band(3, 3.0);
  CHECK(b.first == 1);
  CHECK(b.last == 2);
  b = middle_band(2, 3.0);
  CHECK(b.first == 1);
  CHECK(b.last == 1);
  // 0.3 * 12 rounds below 3.6, so 18 / c lands just above 5 and must snap.
  b = middle_band(18, 0.3 * 12.0);
  CHECK(b.first == 5);
  CHECK(b.last == 13);
}

TEST_CASE("phi membership examples") {
  const PhiReport bst = check_phi_membership(SplitSource::bst(), 4.0, PhiFunction::constant(0.5), 2, 2000);
  CHECK(bst.pass);
  CHECK(bst.rows.size() == 1999);
  for (double p : {0.1, 0.2, 0.3, 0.5}) {
    const double nu = 1.0 - 4.0 * (1.0 - p) / (p + 4.0);
    const PhiReport r = check_phi_membership(SplitSource::binomial(p), 6.0 / p, PhiFunction::constant(nu), 3, 1500);
    CHECK_MESSAGE(r.pass, "p=", p);
  }
  // Catalan band mass decays like 1/sqrt(n).
  const SplitSource cat = SplitSource::uniform_catalan();
  const double a = band_mass(cat, 100, 3.0) * 10.0, b = band_mass(cat, 10000, 3.0) * 100.0;
  CHECK(a / b == Approx(1.0).epsilon(0.2));
  CHECK_FALSE(check_phi_membership(cat, 3.0, PhiFunction::constant(0.5), 3, 200).pass);
  CHECK_THROWS_AS(check_phi_membership(cat, 2.0, PhiFunction::constant(0.5), 3, 10), std::invalid_argument);
}

TEST_CASE("cut points") {
  CHECK(log_cut_point(1) == 1);
  CHECK(log_cut_point(16) == 1);
  CHECK(log_cut_point(17) == 2);
  CHECK(log_cut_point(256) == 2);
  CHECK(log_cut_point(1024) == 3);
  CHECK(log_cut_point(65536) == 4);
  for (std::uint64_t n = 2; n <= 70000; n += 37)
    REQUIRE(log_cut_point(n) == std::max<std::uint64_t>(1, std::uint64_t(std::ceil(std::log2(double(n)) / 4.0 - 1e-12))));
  CHECK(sqrt_cut_point(10000) == 100);
  CHECK(sqrt_cut_point(10001) == 101);
  CHECK(sqrt_cut_point(1) == 1);
  CHECK(sqrt_cut_point(99999999999ULL) == 316228);
}

TEST_CASE("closed forms") {
  CHECK(rho_lower(0.5, 3, 1024) == Approx(1024.0 / (8.0 * 2.0 * 11.0)));
  CHECK(rho_lower(0.5, 3, 1024) == Approx(5.818181818));
  const std::uint64_t n = 65536;
  CHECK(psi_upper(PsiFunction::inverse_shift(), n) == Approx(4.0 * n * (2.0 / 3.0) + 256.0 / 3.0));
  CHECK(det_upper(6.0, 10000) == Approx(700.0));
  CHECK(phi_upper(4.0, PhiFunction::constant(0.5), 1024) == Approx(4.0 * 1024 / (0.5 * 3) + 64.0 / 3.0));
}

TEST_CASE("default profiles") {
  const BoundProfile bst = default_profile(SplitSource::bst());
  CHECK(bst.rho == 0.5);
  CHECK(bst.n_rho == 3);
  REQUIRE(bst.psi);
  REQUIRE(bst.phi);
  CHECK(bst.c == 4.0);
  CHECK(theorem_bound(BoundKind::kRhoLower, bst, 1024) == Approx(5.818181818));
  CHECK_THROWS_AS(theorem_bound(BoundKind::kDetUpper, bst, 1024), std::invalid_argument);

  const BoundProfile bin = default_profile(SplitSource::binomial(0.8));
  CHECK(bin.c == Approx(30.0));
  REQUIRE(bin.phi);
  CHECK((*bin.phi)(1.0) == Approx(1.0 - 4.0 * 0.8 / 4.2));
  REQUIRE(bin.rho);
  CHECK(*bin.rho < 1.0);
  CHECK_FALSE(bin.psi);
  CHECK_THROWS_AS(theorem_bound(BoundKind::kPsiUpper, bin, 1024), std::invalid_argument);

  const BoundProfile cat = default_profile(SplitSource::uniform_catalan());
  REQUIRE(cat.phi);
  CHECK(cat.phi->kind == PhiFunction::Kind::kInverseSqrt);
  CHECK(check_phi_membership(SplitSource::uniform_catalan(), 3.0, *cat.phi, 3, 2000).pass);

  const BoundProfile q = default_profile(make_deterministic(quarter_split));
  CHECK_FALSE(q.rho);
  CHECK(q.c == 6.0);
  CHECK(q.phi_onset == 8);
  CHECK(theorem_bound(BoundKind::kDetUpper, q, 10000) == Approx(700.0));
  CHECK(default_profile(make_deterministic(balanced_split)).c == 3.0);
  CHECK_FALSE(default_profile(make_deterministic(comb_split)).phi);
  CHECK_THROWS_AS(theorem_bound(BoundKind::kRhoLower, q, 100), std::invalid_argument);
}

TEST_CASE("quarter split lies in the c = 6 band from n = 8 on") {
  const SplitSource q = make_deterministic(quarter_split);
  CHECK(check_phi_membership(q, 6.0, PhiFunction::constant(1.0), 8, 5000).pass);
  // n = 7: ceil(7/6) = 2 > k = 1.
  CHECK_FALSE(check_phi_membership(q, 6.0, PhiFunction::constant(1.0), 7, 7).pass);
}

TEST_CASE("sandwich on small n") {
  for (const char* spec : {"bst", "binomial:p=0.3", "binomial:p=0.5", "catalan"}) {
    const SplitSource src = parse_source(spec);
    const BoundProfile p = default_profile(src);
    for (std::uint64_t n = 3; n <= 8; ++n) {
      const double exact = exact_dag_average(src, n);
      const std::uint64_t b = std::min(log_cut_point(n), n);
      INFO(spec, " n=", n);
      CHECK(theorem_bound(BoundKind::kRhoLower, p, n) <= exact);
      CHECK(exact <= cutpoint_upper_bound(src, b, n));
    }
  }
}

TEST_CASE("trend report") {
  const std::vector<std::uint64_t> ns{64, 256, 1024};
  const auto rows = trend_report(SplitSource::bst(), ns, 50, 9, Normalizer::kLog2, 1);
  REQUIRE(rows.size() == 3);
  for (const TrendRow& r : rows) {
    CHECK(r.normalized == Approx(r.estimate * std::log2(double(r.n)) / double(r.n)));
    REQUIRE(r.bound_upper);
    REQUIRE(r.bound_lower);
    CHECK(*r.bound_lower <= r.estimate);
    CHECK(r.estimate <= *r.bound_upper);
  }
  const auto again = trend_report(SplitSource::bst(), ns, 50, 9, Normalizer::kLog2, 3);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].estimate == rows[i].estimate);

  const std::vector<std::uint64_t> det_ns{100, 1000, 10000};
  const auto det = trend_report(make_deterministic(quarter_split), det_ns, 2, 1, Normalizer::kOne);
  CHECK(det[0].std_error == 0.0);
  CHECK(det[2].bound_upper == Approx(700.0));
  CHECK_FALSE(det[0].bound_lower);

  std::ostringstream out;
  write_trend_csv(out, det);
  CHECK(out.str().rfind("n,estimate,stderr,normalized,bound_upper,bound_lower\n100,", 0) == 0);
  CHECK(out.str().find(",70,\n") != std::string::npos);

  const std::vector<std::uint64_t> bad{10, 5};
  CHECK_THROWS_AS(trend_report(SplitSource::bst(), bad, 10, 1, Normalizer::kOne), std::invalid_argument);
  CHECK(parse_normalizer("sqrtlog2") == Normalizer::kSqrtLog2);
  CHECK_THROWS_AS(parse_normalizer("ln"), std::invalid_argument);
  CHECK(normalizer_value(Normalizer::kSqrtLog2, 256) == Approx(std::sqrt(8.0)));
}
