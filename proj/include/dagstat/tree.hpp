#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dagstat/errors.hpp"

namespace dagstat {

inline constexpr std::uint64_t kDefaultEnumerationCap = 14;

/**
 * Full binary tree over the leaf symbol `a` and the binary symbol `f`.
 *
 * Nodes are stored in postorder (left subtree, right subtree, node), so the
 * root is the last entry and every child index is smaller than its parent's.
 * This layout is unique for a given shape, which makes structural equality a
 * plain vector comparison and lets every walk run as a forward loop with no
 * recursion.
 */
class Tree {
 public:
  static constexpr std::uint32_t kNone = UINT32_MAX;

  struct Node {
    std::uint32_t left = kNone;
    std::uint32_t right = kNone;

    bool is_leaf() const noexcept { return left == kNone; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  /// The single-leaf tree `a`.
  Tree() : nodes_(1) {}

  static Tree leaf() { return Tree(); }
  static Tree join(const Tree& left, const Tree& right);

  /// Adopts a postorder node array; throws std::invalid_argument unless it is
  /// the canonical postorder layout of some full binary tree.
  static Tree from_postorder(std::vector<Node> nodes);

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t root() const noexcept { return nodes_.size() - 1; }
  bool is_leaf() const noexcept { return nodes_.size() == 1; }
  std::uint64_t leaf_count() const noexcept { return (nodes_.size() + 1) / 2; }

  /// Copies of the root's children. Precondition: !is_leaf().
  Tree left() const;
  Tree right() const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  explicit Tree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}
  Tree subtree(std::size_t root) const;

  std::vector<Node> nodes_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses t ::= "a" | "f(" t "," t ")" with optional ASCII whitespace
/// between tokens. The whole input must be consumed.
Tree parse_tree(std::string_view text);

/// Term text without whitespace, e.g. "f(a,f(a,a))".
std::string render_tree(const Tree& t);

inline std::uint64_t leaf_count(const Tree& t) { return t.leaf_count(); }

/// Leaf-size of every node, indexed like Tree::nodes().
std::vector<std::uint64_t> subtree_leaf_counts(const Tree& t);

/// N(t, b): number of nodes whose leaf-size exceeds b.
std::uint64_t count_above(const Tree& t, std::uint64_t b);

/// Structural class of every node, indexed like Tree::nodes(). Two nodes get
/// the same class iff their subtrees are equal. Class 0 is the leaf; internal
/// classes are numbered 1, 2, ... in order of first completion in postorder.
std::vector<std::uint32_t> subtree_classes(const Tree& t);

/// S(t, b): number of pairwise distinct subtrees with at most b leaves.
std::uint64_t distinct_small_subtrees(const Tree& t, std::uint64_t b);

/// Swaps the children of every node.
Tree mirror(const Tree& t);

/// f(f(...f(a,a)...,a),a) with n leaves.
Tree left_comb(std::uint64_t n);
/// f(a,f(a,...f(a,a)...)) with n leaves.
Tree right_comb(std::uint64_t n);

/// Visits every tree with n leaves exactly once. Order: left subtree size
/// ascending, then left subtrees in enumeration order, then right subtrees.
/// Throws CapExceeded when n > cap.
void for_each_tree(std::uint64_t n, const std::function<void(const Tree&)>& visit,
                   std::uint64_t cap = kDefaultEnumerationCap);

std::vector<Tree> enumerate_trees(std::uint64_t n, std::uint64_t cap = kDefaultEnumerationCap);

/// Catalan number C_k, exact up to k = 36.
std::uint64_t catalan(std::uint64_t k);

/// Newline-delimited term corpus. Blank lines and lines starting with '#'
/// are skipped. ParseError offsets are relative to the offending line.
std::vector<Tree> read_corpus(std::istream& in);
void write_corpus(std::ostream& out, std::span<const Tree> trees);

}  // namespace dagstat
