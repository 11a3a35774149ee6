#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dagstat/tree.hpp"

namespace dagstat {

/**
 * Minimal DAG of a binary tree in canonical numbering.
 *
 * Node ids run 1..m. Id m is the unique leaf; ids 1..m-1 are the internal
 * nodes in first-completion postorder, so the root is m-1 (for m >= 2) and
 * every child id is either m or smaller than its parent's id.
 */
class Dag {
 public:
  struct Node {
    std::uint64_t left;
    std::uint64_t right;
    friend bool operator==(const Node&, const Node&) = default;
  };

  /// Validates the canonical-form invariants; throws std::invalid_argument.
  Dag(std::uint64_t leaf_count, std::vector<Node> internal);

  /// Leaf count n of the represented tree.
  std::uint64_t leaf_count() const noexcept { return n_; }
  /// Node count m.
  std::uint64_t size() const noexcept { return internal_.size() + 1; }
  std::uint64_t leaf_id() const noexcept { return size(); }
  std::uint64_t root_id() const noexcept { return size() == 1 ? 1 : size() - 1; }

  /// Children of internal node `id` in 1..m-1.
  const Node& node(std::uint64_t id) const { return internal_.at(id - 1); }
  std::span<const Node> internal_nodes() const noexcept { return internal_; }

  friend bool operator==(const Dag&, const Dag&) = default;

 private:
  std::uint64_t n_;
  std::vector<Node> internal_;
};

Dag minimize(const Tree& t);

/// |D_t|: number of pairwise distinct subtrees of t.
std::uint64_t dag_size(const Tree& t);

/// Expands a DAG back into its tree. The result has d.leaf_count() leaves,
/// so this is only sensible for DAGs of trees that fit in memory.
Tree unfold(const Dag& d);

// Binary layout, all integers big-endian:
//   "LCDG" | version 0x01 | n (8 bytes) | m (8 bytes) | payload
// The payload is l_1 r_1 l_2 r_2 ... l_{m-1} r_{m-1}, each field exactly
// field_width(n) bits, MSB first, zero-padded to a whole byte.
inline constexpr std::array<std::uint8_t, 4> kDagMagic{'L', 'C', 'D', 'G'};
inline constexpr std::uint8_t kDagFormatVersion = 1;
inline constexpr std::size_t kDagHeaderBytes = 4 + 1 + 8 + 8;

/// ceil(log2(2n - 1)); 0 for n = 1.
unsigned field_width(std::uint64_t n);

/// 2 (m-1) field_width(n).
std::uint64_t payload_bits(const Dag& d);

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode(const Dag& d);

/// Throws DecodeError on bad magic or version, length mismatch, child ids
/// outside 1..m or not below their parent, or a leaf count that differs from
/// the header.
Dag decode(std::span<const std::uint8_t> bytes);

}  // namespace dagstat
