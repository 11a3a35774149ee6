#include "dagstat/dag.hpp"

#include <algorithm>
#include <bit>

namespace dagstat {
namespace {

std::string dag_violation(std::uint64_t n, const std::vector<Dag::Node>& internal) {
  if (n == 0) return "leaf count must be positive";
  const std::uint64_t m = internal.size() + 1;
  if (m > 2 * n - 1) return "node count " + std::to_string(m) + " exceeds 2n-1";
  for (std::uint64_t k = 1; k < m; ++k) {
    for (std::uint64_t child : {internal[k - 1].left, internal[k - 1].right}) {
      if (child < 1 || child > m)
        return "child id " + std::to_string(child) + " of node " + std::to_string(k) +
               " outside 1.." + std::to_string(m);
      if (child != m && child >= k)
        return "child id " + std::to_string(child) + " of node " + std::to_string(k) +
               " is not below its parent";
    }
  }
  // Leaf counts saturate at n + 1 so corrupted input cannot overflow.
  std::vector<std::uint64_t> leaves(m + 1, 1);
  for (std::uint64_t k = 1; k < m; ++k) {
    const auto [l, r] = internal[k - 1];
    leaves[k] = std::min(leaves[l] + leaves[r], n + 1);
  }
  const std::uint64_t root = m == 1 ? 1 : m - 1;
  if (leaves[root] != n)
    return "unfolded leaf count " + (leaves[root] > n ? "above " + std::to_string(n)
                                                      : std::to_string(leaves[root])) +
           " differs from " + std::to_string(n);
  std::vector<bool> reached(m + 1, false);
  reached[root] = true;
  for (std::uint64_t k = root; k >= 1 && m > 1; --k) {
    if (!reached[k]) return "node " + std::to_string(k) + " is unreachable from the root";
    reached[internal[k - 1].left] = reached[internal[k - 1].right] = true;
  }
  return {};
}

class BitWriter {
 public:
  void put(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) {
      if (used_ % 8 == 0) bytes_.push_back(0);
      if ((value >> i) & 1U) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (used_ % 8));
      ++used_;
    }
  }
  std::vector<std::uint8_t> take() && { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t used_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint64_t get(unsigned width) {
    std::uint64_t value = 0;
    for (unsigned i = 0; i < width; ++i, ++pos_)
      value = (value << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1U);
    return value;
  }
  bool rest_is_zero() const {
    for (std::uint64_t p = pos_; p < bytes_.size() * 8; ++p)
      if ((bytes_[p / 8] >> (7 - p % 8)) & 1U) return false;
    return true;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t pos_ = 0;
};

void put_be64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint64_t get_be64(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

Dag::Dag(std::uint64_t leaf_count, std::vector<Node> internal)
    : n_(leaf_count), internal_(std::move(internal)) {
  if (auto why = dag_violation(n_, internal_); !why.empty())
    throw std::invalid_argument("dag: " + why);
}

Dag minimize(const Tree& t) {
  const auto nodes = t.nodes();
  const auto cls = subtree_classes(t);
  const std::uint32_t internal_classes = *std::max_element(cls.begin(), cls.end());
  const std::uint64_t m = std::uint64_t{internal_classes} + 1;
  auto id_of = [m](std::uint32_t c) { return c == 0 ? m : std::uint64_t{c}; };

  std::vector<Dag::Node> internal(internal_classes);
  std::uint32_t next = 1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    // Classes are handed out in first-completion order, so a class is new
    // exactly when it equals the next unused id.
    if (cls[i] == next) {
      internal[next - 1] = {id_of(cls[nodes[i].left]), id_of(cls[nodes[i].right])};
      ++next;
    }
  }
  return Dag(t.leaf_count(), std::move(internal));
}

std::uint64_t dag_size(const Tree& t) {
  const auto cls = subtree_classes(t);
  return std::uint64_t{*std::max_element(cls.begin(), cls.end())} + 1;
}

Tree unfold(const Dag& d) {
  const std::uint64_t leaf = d.leaf_id();
  std::vector<Tree::Node> nodes;
  std::vector<std::uint32_t> done;
  struct Item {
    std::uint64_t id;
    bool expanded;
  };
  std::vector<Item> work{{d.size() == 1 ? leaf : d.root_id(), false}};
  while (!work.empty()) {
    const Item item = work.back();
    work.pop_back();
    if (item.id == leaf) {
      done.push_back(static_cast<std::uint32_t>(nodes.size()));
      nodes.push_back({});
    } else if (!item.expanded) {
      const auto& n = d.node(item.id);
      work.push_back({item.id, true});
      work.push_back({n.right, false});
      work.push_back({n.left, false});
    } else {
      const std::uint32_t right = done.back();
      done.pop_back();
      const std::uint32_t left = done.back();
      done.back() = static_cast<std::uint32_t>(nodes.size());
      nodes.push_back({left, right});
    }
  }
  return Tree::from_postorder(std::move(nodes));
}

unsigned field_width(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("field_width: n must be positive");
  if (n == 1) return 0;
  // ceil(log2(x)) for x >= 2 is the bit width of x - 1.
  return static_cast<unsigned>(std::bit_width(2 * n - 2));
}

std::uint64_t payload_bits(const Dag& d) {
  return 2 * (d.size() - 1) * field_width(d.leaf_count());
}

std::vector<std::uint8_t> encode(const Dag& d) {
  std::vector<std::uint8_t> out(kDagMagic.begin(), kDagMagic.end());
  out.push_back(kDagFormatVersion);
  put_be64(out, d.leaf_count());
  put_be64(out, d.size());
  const unsigned w = field_width(d.leaf_count());
  BitWriter bits;
  for (const auto& n : d.internal_nodes()) {
    bits.put(n.left, w);
    bits.put(n.right, w);
  }
  const auto payload = std::move(bits).take();
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Dag decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kDagHeaderBytes) throw DecodeError("decode: truncated header");
  if (!std::equal(kDagMagic.begin(), kDagMagic.end(), bytes.begin()))
    throw DecodeError("decode: bad magic");
  if (bytes[4] != kDagFormatVersion)
    throw DecodeError("decode: unsupported version " + std::to_string(bytes[4]));
  const std::uint64_t n = get_be64(bytes.subspan(5, 8));
  const std::uint64_t m = get_be64(bytes.subspan(13, 8));
  if (n == 0 || m == 0) throw DecodeError("decode: n and m must be positive");
  if (n > (std::uint64_t{1} << 62) || m > 2 * n - 1)
    throw DecodeError("decode: node count " + std::to_string(m) + " exceeds 2n-1");

  const unsigned w = field_width(n);
  const unsigned __int128 bits = static_cast<unsigned __int128>(2) * (m - 1) * w;
  const unsigned __int128 want = (bits + 7) / 8;
  const auto payload = bytes.subspan(kDagHeaderBytes);
  if (payload.size() < want) throw DecodeError("decode: truncated payload");
  if (payload.size() > want) throw DecodeError("decode: trailing bytes after payload");

  BitReader reader(payload);
  std::vector<Dag::Node> internal(m - 1);
  for (auto& node : internal) {
    node.left = reader.get(w);
    node.right = reader.get(w);
  }
  if (!reader.rest_is_zero()) throw DecodeError("decode: nonzero padding bits");
  if (auto why = dag_violation(n, internal); !why.empty()) throw DecodeError("decode: " + why);
  return Dag(n, std::move(internal));
}

}  // namespace dagstat
