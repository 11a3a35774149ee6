#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <vector>

#include "dagstat/sources.hpp"
#include "dagstat/tree.hpp"

namespace dagstat {

// For a deterministic source every subtree of t_n of leaf-size m is t_m, so
// all size-indexed quantities below walk the set of sizes reachable from n
// under m -> {k(m), m - k(m)} and never build the tree.

/// The unique tree t_n with probability 1. Throws std::invalid_argument when
/// split returns k outside 1..m-1 at some reachable level m.
Tree build_det_tree(const SplitFn& split, std::uint64_t n);

/// Leaf-sizes reachable from n, ascending; always contains 1 and n.
std::vector<std::uint64_t> reachable_sizes(const SplitFn& split, std::uint64_t n);

/// |D_{t_n}|, the number of distinct reachable sizes.
std::uint64_t det_dag_size(const SplitFn& split, std::uint64_t n);

/// N(t_n, b), memoized over reachable sizes.
std::uint64_t det_count_above(const SplitFn& split, std::uint64_t n, std::uint64_t b);

/// Distinct subtree leaf-sizes of the quarter-split tree, by level iteration
/// L_0 = {n}, L_i = {max(1, l/4), l - max(1, l/4) : l in L_{i-1}, l >= 2}.
/// The max(1, .) keeps n in {2, 3} from collapsing to the empty split.
struct LeafSizeSet {
  std::uint64_t n = 0;
  std::set<std::uint64_t> members;
};
LeafSizeSet leaf_size_set(std::uint64_t n);

struct DetRow {
  std::uint64_t n;
  std::uint64_t dag_size;
  double sqrt_n_ratio;     // dag_size / sqrt(n)
  double log2n_sq_ratio;   // dag_size / log2(n)^2; 0 for n = 1
};
std::vector<DetRow> det_report(const SplitFn& split, std::span<const std::uint64_t> ns);
/// CSV with header "n,dag_size,sqrt_n_ratio,log2n_sq_ratio".
void write_det_csv(std::ostream& out, std::span<const DetRow> rows);

}  // namespace dagstat
