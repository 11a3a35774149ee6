#include "dagstat/tree.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>

namespace dagstat {
namespace {

using Node = Tree::Node;

// Rebuilds child links from a postorder sequence of leaf/internal flags.
std::vector<Node> link_postorder(const std::vector<bool>& internal) {
  std::vector<Node> nodes(internal.size());
  std::vector<std::uint32_t> done;
  for (std::size_t i = 0; i < internal.size(); ++i) {
    if (internal[i]) {
      nodes[i].right = done.back();
      done.pop_back();
      nodes[i].left = done.back();
      done.back() = static_cast<std::uint32_t>(i);
    } else {
      done.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return nodes;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

Tree Tree::join(const Tree& left, const Tree& right) {
  const auto offset = static_cast<std::uint32_t>(left.nodes_.size());
  std::vector<Node> nodes;
  nodes.reserve(left.nodes_.size() + right.nodes_.size() + 1);
  nodes.insert(nodes.end(), left.nodes_.begin(), left.nodes_.end());
  for (Node n : right.nodes_) {
    if (!n.is_leaf()) {
      n.left += offset;
      n.right += offset;
    }
    nodes.push_back(n);
  }
  nodes.push_back(Node{static_cast<std::uint32_t>(left.root()),
                       static_cast<std::uint32_t>(offset + right.root())});
  return Tree(std::move(nodes));
}

Tree Tree::from_postorder(std::vector<Node> nodes) {
  if (nodes.empty()) throw std::invalid_argument("tree: empty node array");
  if (nodes.size() >= kNone) throw std::invalid_argument("tree: too many nodes");
  std::vector<std::uint32_t> done;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (n.is_leaf()) {
      if (n.right != kNone) throw std::invalid_argument("tree: leaf with a right child");
      done.push_back(static_cast<std::uint32_t>(i));
      continue;
    }
    if (done.size() < 2 || done[done.size() - 1] != n.right || done[done.size() - 2] != n.left)
      throw std::invalid_argument("tree: node " + std::to_string(i) +
                                  " is not in canonical postorder");
    done.pop_back();
    done.back() = static_cast<std::uint32_t>(i);
  }
  if (done.size() != 1) throw std::invalid_argument("tree: node array is a forest");
  return Tree(std::move(nodes));
}

Tree Tree::subtree(std::size_t root) const {
  std::size_t first = root;
  while (!nodes_[first].is_leaf()) first = nodes_[first].left;
  const auto offset = static_cast<std::uint32_t>(first);
  std::vector<Node> nodes(nodes_.begin() + static_cast<std::ptrdiff_t>(first),
                          nodes_.begin() + static_cast<std::ptrdiff_t>(root) + 1);
  for (Node& n : nodes) {
    if (!n.is_leaf()) {
      n.left -= offset;
      n.right -= offset;
    }
  }
  return Tree(std::move(nodes));
}

Tree Tree::left() const {
  if (is_leaf()) throw std::logic_error("tree: leaf has no children");
  return subtree(nodes_.back().left);
}

Tree Tree::right() const {
  if (is_leaf()) throw std::logic_error("tree: leaf has no children");
  return subtree(nodes_.back().right);
}

Tree parse_tree(std::string_view text) {
  enum class Phase { first, second };
  std::vector<Phase> open;
  std::vector<bool> internal;
  std::size_t pos = 0;
  bool expect_term = true;

  auto skip_ws = [&] {
    while (pos < text.size() && is_space(text[pos])) ++pos;
  };
  auto require = [&](char c) {
    skip_ws();
    if (pos >= text.size()) throw ParseError(std::string("expected '") + c + "', got end of input", pos);
    if (text[pos] != c)
      throw ParseError(std::string("expected '") + c + "', got '" + text[pos] + "'", pos);
    ++pos;
  };

  while (true) {
    skip_ws();
    if (expect_term) {
      if (pos >= text.size()) throw ParseError("expected a term, got end of input", pos);
      const char c = text[pos];
      if (c == 'a') {
        ++pos;
        internal.push_back(false);
        expect_term = false;
      } else if (c == 'f') {
        ++pos;
        require('(');
        open.push_back(Phase::first);
      } else {
        throw ParseError(std::string("expected 'a' or 'f', got '") + c + "'", pos);
      }
      continue;
    }
    if (open.empty()) break;
    if (open.back() == Phase::first) {
      require(',');
      open.back() = Phase::second;
      expect_term = true;
    } else {
      require(')');
      open.pop_back();
      internal.push_back(true);
    }
  }
  if (pos != text.size()) throw ParseError("trailing input after term", pos);
  if (internal.size() >= Tree::kNone) throw ParseError("term too large", 0);
  return Tree::from_postorder(link_postorder(internal));
}

std::string render_tree(const Tree& t) {
  const auto nodes = t.nodes();
  std::string out;
  out.reserve(t.leaf_count() + 4 * (t.leaf_count() - 1));
  // Non-negative entries are node indices; kComma and kClose are emit actions.
  constexpr std::int64_t kComma = -1;
  constexpr std::int64_t kClose = -2;
  std::vector<std::int64_t> work{static_cast<std::int64_t>(t.root())};
  while (!work.empty()) {
    const std::int64_t item = work.back();
    work.pop_back();
    if (item == kComma) {
      out.push_back(',');
    } else if (item == kClose) {
      out.push_back(')');
    } else {
      const Node& n = nodes[static_cast<std::size_t>(item)];
      if (n.is_leaf()) {
        out.push_back('a');
      } else {
        out += "f(";
        work.push_back(kClose);
        work.push_back(n.right);
        work.push_back(kComma);
        work.push_back(n.left);
      }
    }
  }
  return out;
}

std::vector<std::uint64_t> subtree_leaf_counts(const Tree& t) {
  const auto nodes = t.nodes();
  std::vector<std::uint64_t> size(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    size[i] = nodes[i].is_leaf() ? 1 : size[nodes[i].left] + size[nodes[i].right];
  return size;
}

std::uint64_t count_above(const Tree& t, std::uint64_t b) {
  const auto size = subtree_leaf_counts(t);
  return static_cast<std::uint64_t>(
      std::count_if(size.begin(), size.end(), [b](std::uint64_t s) { return s > b; }));
}

std::vector<std::uint32_t> subtree_classes(const Tree& t) {
  const auto nodes = t.nodes();
  std::vector<std::uint32_t> cls(nodes.size());
  absl::flat_hash_map<std::uint64_t, std::uint32_t> table;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) {
      cls[i] = 0;
      continue;
    }
    const std::uint64_t key =
        (std::uint64_t{cls[nodes[i].left]} << 32) | std::uint64_t{cls[nodes[i].right]};
    auto [it, inserted] = table.try_emplace(key, static_cast<std::uint32_t>(table.size() + 1));
    cls[i] = it->second;
  }
  return cls;
}

std::uint64_t distinct_small_subtrees(const Tree& t, std::uint64_t b) {
  if (b == 0) return 0;
  const auto size = subtree_leaf_counts(t);
  const auto cls = subtree_classes(t);
  std::vector<bool> seen(t.node_count(), false);
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (size[i] <= b && !seen[cls[i]]) {
      seen[cls[i]] = true;
      ++count;
    }
  }
  return count;
}

Tree mirror(const Tree& t) {
  // The mirror's postorder is the reverse of the original's preorder.
  const auto nodes = t.nodes();
  std::vector<bool> internal;
  internal.reserve(nodes.size());
  std::vector<std::uint32_t> work{static_cast<std::uint32_t>(t.root())};
  while (!work.empty()) {
    const Node& n = nodes[work.back()];
    work.pop_back();
    internal.push_back(!n.is_leaf());
    if (!n.is_leaf()) {
      work.push_back(n.right);
      work.push_back(n.left);
    }
  }
  std::reverse(internal.begin(), internal.end());
  return Tree::from_postorder(link_postorder(internal));
}

Tree left_comb(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("left_comb: n must be positive");
  std::vector<bool> internal{false};
  for (std::uint64_t i = 1; i < n; ++i) {
    internal.push_back(false);
    internal.push_back(true);
  }
  return Tree::from_postorder(link_postorder(internal));
}

Tree right_comb(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("right_comb: n must be positive");
  std::vector<bool> internal(n, false);
  internal.resize(2 * n - 1, true);
  return Tree::from_postorder(link_postorder(internal));
}

void for_each_tree(std::uint64_t n, const std::function<void(const Tree&)>& visit,
                   std::uint64_t cap) {
  if (n == 0) throw std::invalid_argument("for_each_tree: n must be positive");
  if (n > cap) throw CapExceeded("for_each_tree", n, cap);
  if (n == 1) {
    visit(Tree::leaf());
    return;
  }
  std::vector<std::vector<Tree>> by_size(n);
  by_size[1].push_back(Tree::leaf());
  for (std::uint64_t s = 2; s < n; ++s) {
    by_size[s].reserve(catalan(s - 1));
    for (std::uint64_t k = 1; k < s; ++k)
      for (const Tree& l : by_size[k])
        for (const Tree& r : by_size[s - k]) by_size[s].push_back(Tree::join(l, r));
  }
  for (std::uint64_t k = 1; k < n; ++k)
    for (const Tree& l : by_size[k])
      for (const Tree& r : by_size[n - k]) visit(Tree::join(l, r));
}

std::vector<Tree> enumerate_trees(std::uint64_t n, std::uint64_t cap) {
  std::vector<Tree> out;
  for_each_tree(n, [&out](const Tree& t) { out.push_back(t); }, cap);
  return out;
}

std::uint64_t catalan(std::uint64_t k) {
  if (k > 36) throw std::overflow_error("catalan: C_k exceeds 64 bits for k > 36");
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) c = c * 2 * (2 * i - 1) / (i + 1);
  return static_cast<std::uint64_t>(c);
}

std::vector<Tree> read_corpus(std::istream& in) {
  std::vector<Tree> trees;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r\n\v\f");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r\n\v\f");
    trees.push_back(parse_tree(std::string_view(line).substr(first, last - first + 1)));
  }
  return trees;
}

void write_corpus(std::ostream& out, std::span<const Tree> trees) {
  for (const Tree& t : trees) out << render_tree(t) << '\n';
}

}  // namespace dagstat
