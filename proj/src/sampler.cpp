#include "dagstat/sampler.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dagstat/numeric.hpp"

namespace dagstat {
namespace {

std::uint64_t catalan_split(std::uint64_t n, Rng& rng) {
  // sigma_eq(t, n-t) = sigma_eq(n-t, t) and the mass sits at the extremes, so
  // scan t = 1, n-1, 2, n-2, ... and step the value by the exact ratio
  // sigma(t+1)/sigma(t) = [2(2t-1)/(t+1)] * [(n-t)/(2(2n-2t-3))].
  const double u = rng.uniform();
  const double nd = static_cast<double>(n);
  double s = nd / (2.0 * (2.0 * nd - 3.0));
  double cum = 0.0;
  std::uint64_t last = 1;
  for (std::uint64_t t = 1; 2 * t <= n; ++t) {
    cum += s;
    if (u < cum) return t;
    last = t;
    if (2 * t != n) {
      cum += s;
      if (u < cum) return n - t;
      last = n - t;
    }
    const double td = static_cast<double>(t);
    s *= (2.0 * (2.0 * td - 1.0) / (td + 1.0)) * ((nd - td) / (2.0 * (2.0 * nd - 2.0 * td - 3.0)));
  }
  return last;  // rounding left u above the accumulated mass
}

std::uint64_t scan_split(std::uint64_t n, Rng& rng, const SigmaTable& table) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::uint64_t last = 1;
  for (std::uint64_t k = 1; k < n; ++k) {
    const double w = table.weight(n, k);
    if (w <= 0.0) continue;
    cum += w;
    last = k;
    if (u < cum) return k;
  }
  return last;
}

// Draws splits for one model; resolved once per generation instead of per node.
template <class F>
decltype(auto) with_split_drawer(const SplitSource& src, F&& body) {
  return std::visit(
      [&](const auto& m) -> decltype(auto) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, BstModel>) {
          return body([](std::uint64_t n, Rng& rng) { return 1 + rng.below(n - 1); });
        } else if constexpr (std::is_same_v<M, BinomialModel>) {
          const double p = m.p;
          return body([p](std::uint64_t n, Rng& rng) {
            std::uint64_t k = 1;
            for (std::uint64_t i = 0; i + 2 < n; ++i) k += rng.uniform() < p ? 1 : 0;
            return k;
          });
        } else if constexpr (std::is_same_v<M, CatalanModel>) {
          const std::uint64_t top = m.log_catalan.size();
          return body([top](std::uint64_t n, Rng& rng) {
            if (n > top)
              throw std::out_of_range("catalan: level n=" + std::to_string(n) +
                                      " beyond max level " + std::to_string(top));
            return catalan_split(n, rng);
          });
        } else if constexpr (std::is_same_v<M, DeterministicModel>) {
          return body([&src](std::uint64_t n, Rng&) { return src.forced_split(n); });
        } else {
          return body([&m](std::uint64_t n, Rng& rng) { return scan_split(n, rng, m.table); });
        }
      },
      src.model());
}

// Top-down generation with an explicit work stack. Work entries are pending
// subtree sizes, or 0 for "join the two most recent results".
template <class Builder, class Draw>
typename Builder::Value generate(std::uint64_t n, Rng& rng, Builder& builder, Draw&& draw) {
  using Value = typename Builder::Value;
  std::vector<std::uint64_t> work{n};
  std::vector<Value> done;
  while (!work.empty()) {
    const std::uint64_t s = work.back();
    work.pop_back();
    if (s == 0) {
      const Value right = done.back();
      done.pop_back();
      done.back() = builder.join(done.back(), right);
    } else if (s == 1) {
      done.push_back(builder.leaf());
    } else {
      const std::uint64_t k = s == 2 ? 1 : draw(s, rng);
      work.push_back(0);
      work.push_back(s - k);
      work.push_back(k);
    }
  }
  return done.back();
}

struct TreeBuilder {
  using Value = std::uint32_t;
  std::vector<Tree::Node> nodes;

  Value leaf() {
    nodes.push_back({});
    return static_cast<Value>(nodes.size() - 1);
  }
  Value join(Value l, Value r) {
    nodes.push_back({l, r});
    return static_cast<Value>(nodes.size() - 1);
  }
};

struct DagSizeBuilder {
  using Value = std::uint32_t;
  absl::flat_hash_map<std::uint64_t, std::uint32_t> table;

  Value leaf() { return 0; }
  Value join(Value l, Value r) {
    const std::uint64_t key = (std::uint64_t{l} << 32) | r;
    return table.try_emplace(key, static_cast<std::uint32_t>(table.size() + 1)).first->second;
  }
};

void check_size(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("sampler: n must be positive");
  if (n >= (std::uint64_t{1} << 31)) throw std::invalid_argument("sampler: n must be below 2^31");
}

std::uint64_t dag_size_with(const SplitSource& src, std::uint64_t n, Rng& rng,
                            DagSizeBuilder& builder) {
  builder.table.clear();
  with_split_drawer(src, [&](auto draw) {
    generate(n, rng, builder, draw);
    return 0;
  });
  return builder.table.size() + 1;
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t sample_split(const SplitSource& src, std::uint64_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_split: n must be >= 2");
  if (auto top = src.max_level(); top && n > *top)
    throw std::out_of_range(src.name() + ": level n=" + std::to_string(n) + " beyond max level");
  if (n == 2) return 1;
  return with_split_drawer(src, [&](auto draw) { return draw(n, rng); });
}

Tree sample_tree(const SplitSource& src, std::uint64_t n, Rng& rng) {
  check_size(n);
  TreeBuilder builder;
  builder.nodes.reserve(2 * n - 1);
  with_split_drawer(src, [&](auto draw) {
    generate(n, rng, builder, draw);
    return 0;
  });
  return Tree::from_postorder(std::move(builder.nodes));
}

std::uint64_t sample_dag_size(const SplitSource& src, std::uint64_t n, Rng& rng) {
  check_size(n);
  DagSizeBuilder builder;
  return dag_size_with(src, n, rng, builder);
}

EstimateReport estimate_dag_size(const SplitSource& src, std::uint64_t n, std::uint64_t reps,
                                 std::uint64_t seed, unsigned workers) {
  check_size(n);
  if (reps < 2) throw std::invalid_argument("estimate_dag_size: reps must be >= 2");
  std::vector<std::uint64_t> sizes(reps);
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      DagSizeBuilder builder;
      for (std::uint64_t r = next++; r < reps; r = next++) {
        Rng rng(derive_seed(seed, r));
        sizes[r] = dag_size_with(src, n, rng, builder);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = reps;
    }
  };
  const unsigned count = static_cast<unsigned>(
      std::clamp<std::uint64_t>(workers, 1, std::min<std::uint64_t>(reps, 256)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  // Aggregation runs in replicate order, so the schedule cannot change it.
  CompensatedSum total;
  for (std::uint64_t s : sizes) total.add(static_cast<double>(s));
  const double mean = total.value() / static_cast<double>(reps);
  CompensatedSum squares;
  for (std::uint64_t s : sizes) {
    const double d = static_cast<double>(s) - mean;
    squares.add(d * d);
  }
  const double variance = squares.value() / static_cast<double>(reps - 1);

  EstimateReport report;
  report.n = n;
  report.reps = reps;
  report.seed = seed;
  report.mean = mean;
  report.std_error = std::sqrt(variance / static_cast<double>(reps));
  report.ci95_low = mean - kCi95Z * report.std_error;
  report.ci95_high = mean + kCi95Z * report.std_error;
  return report;
}

}  // namespace dagstat
