#include <doctest.h>

#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "dagstat/dag.hpp"
#include "oracles.hpp"

using namespace dagstat;

namespace {

std::vector<std::uint8_t> golden(const char* name) {
  std::ifstream in(std::string(DAGSTAT_GOLDEN_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kFigure = "f(f(a,f(a,f(a,a))),f(f(a,f(a,a)),f(a,a)))";

std::vector<std::uint8_t> header(std::uint64_t n, std::uint64_t m) {
  std::vector<std::uint8_t> out{'L', 'C', 'D', 'G', 1};
  for (std::uint64_t v : {n, m})
    for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  return out;
}

}  // namespace

TEST_CASE("dag size matches the string oracle on all small trees") {
  for (std::uint64_t n = 1; n <= 9; ++n)
    for (const Tree& t : enumerate_trees(n)) REQUIRE(dag_size(t) == oracle::dag_size(t));
}

TEST_CASE("known dag sizes") {
  CHECK(dag_size(parse_tree("a")) == 1);
  CHECK(dag_size(parse_tree("f(a,a)")) == 2);
  CHECK(dag_size(parse_tree(kFigure)) == 6);
  CHECK(dag_size(right_comb(50)) == 50);
  // The perfect tree with 2^k leaves has one distinct subtree per level.
  Tree perfect = Tree::leaf();
  for (int k = 1; k <= 12; ++k) {
    perfect = Tree::join(perfect, perfect);
    CHECK(dag_size(perfect) == static_cast<std::uint64_t>(k + 1));
  }
}

TEST_CASE("canonical numbering of the example term") {
  const Dag d = minimize(parse_tree(kFigure));
  CHECK(d.leaf_count() == 9);
  CHECK(d.size() == 6);
  CHECK(d.leaf_id() == 6);
  CHECK(d.root_id() == 5);
  const std::vector<Dag::Node> want{{6, 6}, {6, 1}, {6, 2}, {2, 1}, {3, 4}};
  CHECK(std::vector<Dag::Node>(d.internal_nodes().begin(), d.internal_nodes().end()) == want);
}

TEST_CASE("minimize and unfold are inverse") {
  for (std::uint64_t n = 1; n <= 9; ++n) {
    for (const Tree& t : enumerate_trees(n)) {
      const Dag d = minimize(t);
      REQUIRE(d.size() == dag_size(t));
      REQUIRE(unfold(d) == t);
      // Children are the shared leaf or smaller ids.
      for (std::uint64_t id = 1; id < d.size(); ++id)
        for (std::uint64_t c : {d.node(id).left, d.node(id).right}) CHECK((c == d.leaf_id() || c < id));
    }
  }
}

TEST_CASE("field width is ceil(log2(2n-1))") {
  CHECK(field_width(1) == 0);
  CHECK(field_width(2) == 2);
  CHECK(field_width(3) == 3);
  CHECK(field_width(5) == 4);
  CHECK(field_width(9) == 5);
  CHECK(field_width(10) == 5);
  CHECK(field_width(1024) == 11);
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    unsigned w = 0;
    while ((std::uint64_t{1} << w) < 2 * n - 1) ++w;
    REQUIRE(field_width(n) == w);
  }
  CHECK_THROWS(field_width(0));
}

TEST_CASE("golden encodings") {
  const auto faa = encode(minimize(parse_tree("f(a,a)")));
  CHECK(faa == golden("faa.lcdg"));
  CHECK(faa.size() == kDagHeaderBytes + 1);
  CHECK(faa.back() == 0xA0);

  const Dag fig = minimize(parse_tree(kFigure));
  CHECK(payload_bits(fig) == 50);
  const auto bytes = encode(fig);
  CHECK(bytes.size() == kDagHeaderBytes + 7);
  CHECK(bytes == golden("figure.lcdg"));
  CHECK(render_tree(unfold(decode(bytes))) == kFigure);

  const auto leaf = encode(minimize(Tree::leaf()));
  CHECK(leaf == header(1, 1));
  CHECK(decode(leaf).size() == 1);
  CHECK(unfold(decode(leaf)).is_leaf());
}

TEST_CASE("round trip and payload length over T_7") {
  for (std::uint64_t n = 1; n <= 7; ++n) {
    for (const Tree& t : enumerate_trees(n)) {
      const Dag d = minimize(t);
      const auto bytes = encode(d);
      const std::uint64_t bits = 2 * (d.size() - 1) * field_width(n);
      CHECK(payload_bits(d) == bits);
      CHECK(bytes.size() == kDagHeaderBytes + (bits + 7) / 8);
      CHECK(decode(bytes) == d);
      CHECK(unfold(decode(bytes)) == t);
    }
  }
}

TEST_CASE("decode rejects malformed input") {
  const auto good = golden("faa.lcdg");
  auto mutated = [&](auto edit) {
    auto b = good;
    edit(b);
    return b;
  };
  CHECK_THROWS_AS(decode(std::vector<std::uint8_t>(good.begin(), good.begin() + 10)), DecodeError);
  CHECK_THROWS_AS(decode(mutated([](auto& b) { b[0] = 'X'; })), DecodeError);
  CHECK_THROWS_AS(decode(mutated([](auto& b) { b[4] = 2; })), DecodeError);
  CHECK_THROWS_AS(decode(mutated([](auto& b) { b.pop_back(); })), DecodeError);
  CHECK_THROWS_AS(decode(mutated([](auto& b) { b.push_back(0); })), DecodeError);
  // Nonzero padding bit.
  CHECK_THROWS_AS(decode(mutated([](auto& b) { b.back() = 0xA1; })), DecodeError);
  // Child id 3 > m = 2: fields 11 10.
  CHECK_THROWS_AS(decode(mutated([](auto& b) { b.back() = 0xE0; })), DecodeError);
  // Child id 0: fields 00 10.
  CHECK_THROWS_AS(decode(mutated([](auto& b) { b.back() = 0x20; })), DecodeError);
  // Header n = 3 but the DAG unfolds to 2 leaves: width 3, fields 010 010.
  {
    auto b = header(3, 2);
    b.push_back(0x48);
    CHECK_THROWS_AS(decode(b), DecodeError);
  }
  // m = 0 and m > 2n - 1.
  CHECK_THROWS_AS(decode(header(2, 0)), DecodeError);
  CHECK_THROWS_AS(decode(header(1, 2)), DecodeError);
  // Node 1 pointing at itself: n = 3, m = 3, width 3, fields 001 011 011 011.
  {
    auto b = header(3, 3);
    for (std::uint8_t x : {0x2D, 0xB0}) b.push_back(x);
    CHECK_THROWS_AS(decode(b), DecodeError);
  }
}

TEST_CASE("dag constructor validates") {
  CHECK_NOTHROW(Dag(2, {{2, 2}}));
  CHECK_THROWS_AS(Dag(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(Dag(3, {{2, 2}}), std::invalid_argument);
  // Node 1 unreachable from root 2.
  CHECK_THROWS_AS(Dag(2, {{3, 3}, {3, 3}}), std::invalid_argument);
}
