#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <map>
#include <set>
#include <string>

#include "dagstat/dag.hpp"
#include "dagstat/sampler.hpp"

using namespace dagstat;

namespace {

// Upper 1e-4 tail, so a correct sampler fails a fixed-seed run with
// probability 1e-4 per check.
double chi2_critical(std::size_t dof) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(double(dof)), 1e-4));
}

template <class Draw>
void check_fit(const std::vector<double>& pmf, std::uint64_t draws, Draw&& draw) {
  std::vector<std::uint64_t> counts(pmf.size(), 0);
  for (std::uint64_t i = 0; i < draws; ++i) ++counts.at(draw());
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] == 0.0) {
      REQUIRE(counts[i] == 0);
      continue;
    }
    const double expected = pmf[i] * static_cast<double>(draws);
    stat += (static_cast<double>(counts[i]) - expected) * (static_cast<double>(counts[i]) - expected) / expected;
    ++cells;
  }
  if (cells > 1) CHECK(stat < chi2_critical(cells - 1));
}

std::vector<SplitSource> random_sources() {
  return {SplitSource::bst(), SplitSource::binomial(0.3), SplitSource::binomial(0.5),
          SplitSource::uniform_catalan()};
}

}  // namespace

TEST_CASE("rng is the raw mt19937_64 stream") {
  Rng a(42);
  std::mt19937_64 ref(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next() == ref());
  Rng b(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = b.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(b.below(7) < 7);
  }
  CHECK_THROWS_AS(b.below(0), std::invalid_argument);
  CHECK(b.below(1) == 0);
}

TEST_CASE("below is uniform") {
  Rng rng(99);
  check_fit(std::vector<double>(13, 1.0 / 13.0), 130000, [&] { return rng.below(13); });
}

TEST_CASE("derived seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(7, i));
  CHECK(seen.size() == 10000);
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("split sampling follows sigma") {
  for (const SplitSource& src : random_sources()) {
    for (std::uint64_t n : {3, 4, 9, 20, 41}) {
      const auto row = src.row(n);
      std::vector<double> pmf(n, 0.0);
      for (std::uint64_t k = 1; k < n; ++k) pmf[k] = row[k - 1];
      Rng rng(derive_seed(1234, n));
      INFO(src.name(), " n=", n);
      check_fit(pmf, 60000, [&] { return sample_split(src, n, rng); });
    }
  }
}

TEST_CASE("tree sampling follows P_sigma") {
  for (const SplitSource& src : random_sources()) {
    const std::uint64_t n = 6;
    const auto trees = enumerate_trees(n);
    std::map<std::string, std::size_t> index;
    std::vector<double> pmf;
    for (const Tree& t : trees) {
      index[render_tree(t)] = pmf.size();
      pmf.push_back(prob_of_tree(src, t));
    }
    Rng rng(555);
    INFO(src.name());
    check_fit(pmf, 80000, [&] { return index.at(render_tree(sample_tree(src, n, rng))); });
  }
}

TEST_CASE("n = 2 and deterministic sources draw nothing") {
  Rng a(5), b(5);
  CHECK(sample_split(SplitSource::bst(), 2, a) == 1);
  const SplitSource q = make_deterministic(quarter_split);
  CHECK(sample_split(q, 100, a) == 25);
  const Tree t = sample_tree(q, 4, a);
  CHECK(render_tree(t) == "f(a,f(a,f(a,a)))");
  CHECK(a.next() == b.next());
  CHECK(sample_dag_size(q, 4, a) == 4);
}

TEST_CASE("one-pass dag size equals minimizing the sampled tree") {
  for (const SplitSource& src : random_sources()) {
    for (std::uint64_t n : {1, 2, 3, 17, 256, 3000}) {
      for (std::uint64_t r = 0; r < 5; ++r) {
        Rng a(derive_seed(77, r)), b(derive_seed(77, r));
        const Tree t = sample_tree(src, n, a);
        REQUIRE(t.leaf_count() == n);
        REQUIRE(sample_dag_size(src, n, b) == dag_size(t));
        REQUIRE(a.next() == b.next());
      }
    }
  }
}

TEST_CASE("estimate is independent of the worker count") {
  const SplitSource src = SplitSource::bst();
  const EstimateReport one = estimate_dag_size(src, 500, 400, 7, 1);
  for (unsigned w : {2u, 3u, 8u}) {
    const EstimateReport many = estimate_dag_size(src, 500, 400, 7, w);
    CHECK(many.mean == one.mean);
    CHECK(many.std_error == one.std_error);
  }
  CHECK(one.ci95_low == doctest::Approx(one.mean - kCi95Z * one.std_error));
  CHECK(one.ci95_high == doctest::Approx(one.mean + kCi95Z * one.std_error));
  CHECK(one.reps == 400);
  CHECK(one.seed == 7);
}

TEST_CASE("estimate of a constant is exact") {
  const EstimateReport r = estimate_dag_size(make_deterministic(balanced_split), 1024, 10, 3, 4);
  CHECK(r.mean == 11.0);
  CHECK(r.std_error == 0.0);
}

TEST_CASE("estimate agrees with the hand value D_bst(4) = 11/3") {
  const EstimateReport r = estimate_dag_size(SplitSource::bst(), 4, 60000, 11, 2);
  CHECK(std::fabs(r.mean - 11.0 / 3.0) <= 4.0 * r.std_error);
}

TEST_CASE("sampler errors") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_split(SplitSource::bst(), 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_tree(SplitSource::bst(), 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_tree(SplitSource::uniform_catalan(10), 11, rng), std::out_of_range);
  CHECK_THROWS_AS(sample_split(SplitSource::uniform_catalan(10), 11, rng), std::out_of_range);
  CHECK_THROWS_AS(estimate_dag_size(SplitSource::bst(), 10, 1, 1), std::invalid_argument);
  const SplitSource bad = make_deterministic([](std::uint64_t n) { return n; }, "bad");
  CHECK_THROWS(estimate_dag_size(bad, 10, 10, 1, 4));
}
