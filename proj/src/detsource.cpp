#include "dagstat/detsource.hpp"

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dagstat {
namespace {

std::uint64_t checked_split(const SplitFn& split, std::uint64_t m) {
  const std::uint64_t k = split(m);
  if (k < 1 || k >= m)
    throw std::invalid_argument("deterministic split: k(" + std::to_string(m) + ") = " +
                                std::to_string(k) + " outside 1.." + std::to_string(m - 1));
  return k;
}

void check_n(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("deterministic source: n must be >= 1");
}

}  // namespace

Tree build_det_tree(const SplitFn& split, std::uint64_t n) {
  check_n(n);
  if (n >= (std::uint64_t{1} << 31)) throw std::invalid_argument("build_det_tree: n must be below 2^31");
  std::vector<Tree::Node> nodes;
  nodes.reserve(2 * n - 1);
  // 0 marks "join the two most recent subtrees".
  std::vector<std::uint64_t> work{n};
  std::vector<std::uint32_t> done;
  while (!work.empty()) {
    const std::uint64_t s = work.back();
    work.pop_back();
    if (s == 0) {
      const std::uint32_t right = done.back();
      done.pop_back();
      nodes.push_back({done.back(), right});
      done.back() = static_cast<std::uint32_t>(nodes.size() - 1);
    } else if (s == 1) {
      nodes.push_back({});
      done.push_back(static_cast<std::uint32_t>(nodes.size() - 1));
    } else {
      const std::uint64_t k = checked_split(split, s);
      work.push_back(0);
      work.push_back(s - k);
      work.push_back(k);
    }
  }
  return Tree::from_postorder(std::move(nodes));
}

std::vector<std::uint64_t> reachable_sizes(const SplitFn& split, std::uint64_t n) {
  check_n(n);
  absl::flat_hash_set<std::uint64_t> seen{n};
  std::vector<std::uint64_t> stack{n};
  while (!stack.empty()) {
    const std::uint64_t m = stack.back();
    stack.pop_back();
    if (m < 2) continue;
    const std::uint64_t k = checked_split(split, m);
    for (std::uint64_t c : {k, m - k})
      if (seen.insert(c).second) stack.push_back(c);
  }
  std::vector<std::uint64_t> sizes(seen.begin(), seen.end());
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

std::uint64_t det_dag_size(const SplitFn& split, std::uint64_t n) {
  return reachable_sizes(split, n).size();
}

std::uint64_t det_count_above(const SplitFn& split, std::uint64_t n, std::uint64_t b) {
  // Ascending order puts both children of m before m.
  absl::flat_hash_map<std::uint64_t, std::uint64_t> count;
  for (std::uint64_t m : reachable_sizes(split, n)) {
    if (m <= b) {
      count[m] = 0;
      continue;
    }
    const std::uint64_t k = split(m);
    count[m] = 1 + count.at(k) + count.at(m - k);
  }
  return count.at(n);
}

LeafSizeSet leaf_size_set(std::uint64_t n) {
  check_n(n);
  LeafSizeSet result{n, {n}};
  std::vector<std::uint64_t> level{n};
  while (!level.empty()) {
    std::vector<std::uint64_t> next;
    for (std::uint64_t l : level) {
      if (l < 2) continue;
      const std::uint64_t lo = std::max<std::uint64_t>(1, l / 4);
      for (std::uint64_t c : {lo, l - lo})
        if (result.members.insert(c).second) next.push_back(c);
    }
    level = std::move(next);
  }
  return result;
}

std::vector<DetRow> det_report(const SplitFn& split, std::span<const std::uint64_t> ns) {
  std::vector<DetRow> rows;
  rows.reserve(ns.size());
  for (std::uint64_t n : ns) {
    const std::uint64_t d = det_dag_size(split, n);
    const double nd = static_cast<double>(n);
    const double lg = std::log2(nd);
    rows.push_back({n, d, static_cast<double>(d) / std::sqrt(nd),
                    n > 1 ? static_cast<double>(d) / (lg * lg) : 0.0});
  }
  return rows;
}

void write_det_csv(std::ostream& out, std::span<const DetRow> rows) {
  out << "n,dag_size,sqrt_n_ratio,log2n_sq_ratio\n";
  char buf[128];
  for (const DetRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%llu,%llu,%.10g,%.10g\n", static_cast<unsigned long long>(r.n),
                  static_cast<unsigned long long>(r.dag_size), r.sqrt_n_ratio, r.log2n_sq_ratio);
    out << buf;
  }
}

}  // namespace dagstat
