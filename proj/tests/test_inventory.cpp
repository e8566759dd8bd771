#include <doctest.h>

#include <cstdint>

#include "signrec/errors.hpp"
#include "signrec/inventory.hpp"
#include "signrec/lexicon.hpp"
#include "test_helpers.hpp"

using namespace signrec;

TEST_CASE("inventory induced from a lexicon file") {
  TempDir dir;
  const std::string path = dir.file("lex.csv");
  write_file(path,
             "gloss,shape,place\n"
             "A,fist,chin\n"
             "B,open,chest\n"
             "C,fist,brow\n");
  PhonemeInventory inv = load_inventory(path);
  REQUIRE(inv.type_count() == 2);
  CHECK(inv.type(0).name == "shape");
  CHECK(inv.type(0).cardinality() == 2);
  CHECK(inv.type(1).cardinality() == 3);
  // value ids follow lexicographic value-name order
  CHECK(inv.type(0).value_id("fist") == 0);
  CHECK(inv.type(0).value_id("open") == 1);
  CHECK(inv.type(1).value_id("brow") == 0);
  CHECK(inv.type(1).value_id("chest") == 1);
  CHECK(inv.type(1).value_id("chin") == 2);
  CHECK(inv.type(1).value_id("nowhere") == kMissing);
}

TEST_CASE("smallest legal inventory") {
  TempDir dir;
  const std::string path = dir.file("lex.csv");
  write_file(path, "gloss,t1\nA,a\nB,b\n");
  PhonemeInventory inv = load_inventory(path);
  REQUIRE(inv.type_count() == 1);
  CHECK(inv.type(0).cardinality() == 2);
  CHECK(inv.type(0).value_id("a") == 0);
  CHECK(inv.type(0).value_id("b") == 1);
}

TEST_CASE("two loads of the same file produce identical mappings") {
  TempDir dir;
  const std::string path = dir.file("lex.csv");
  write_file(path, "gloss,t1,t2\nA,z,q\nB,a,r\nC,m,q\n");
  PhonemeInventory a = load_inventory(path);
  PhonemeInventory b = load_inventory(path);
  CHECK(a == b);
}

TEST_CASE("inventory round trip through save_lexicon") {
  TempDir dir;
  const std::string path = dir.file("lex.csv");
  write_file(path, "gloss,t1,t2\nA,z,q\nB,a,r\nC,m,-1\n");
  Lexicon lex = load_lexicon(path);
  const std::string out = dir.file("roundtrip.csv");
  save_lexicon(lex, out);
  Lexicon reloaded = load_lexicon(out);
  CHECK(lex.inventory() == reloaded.inventory());
  REQUIRE(reloaded.size() == lex.size());
  for (int i = 0; i < lex.size(); ++i) {
    CHECK(reloaded.sign(i).gloss == lex.sign(i).gloss);
    CHECK(reloaded.sign(i).phonemes == lex.sign(i).phonemes);
  }
}

TEST_CASE("load errors") {
  TempDir dir;
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_inventory(dir.file("nope.csv")), DataError);
  }
  SUBCASE("empty file") {
    write_file(dir.file("empty.csv"), "");
    CHECK_THROWS_AS(load_inventory(dir.file("empty.csv")), DataError);
  }
  SUBCASE("header only") {
    write_file(dir.file("h.csv"), "gloss,t1\n");
    CHECK_THROWS_AS(load_inventory(dir.file("h.csv")), DataError);
  }
  SUBCASE("duplicate column names") {
    write_file(dir.file("dup.csv"), "gloss,t1,t1\nA,a,b\nB,b,a\n");
    CHECK_THROWS_AS(load_inventory(dir.file("dup.csv")), DataError);
  }
  SUBCASE("column with fewer than 2 distinct values") {
    write_file(dir.file("one.csv"), "gloss,t1\nA,a\nB,a\n");
    CHECK_THROWS_AS(load_inventory(dir.file("one.csv")), DataError);
  }
  SUBCASE("no gloss column") {
    write_file(dir.file("ng.csv"), "word,t1\nA,a\nB,b\n");
    CHECK_THROWS_AS(load_inventory(dir.file("ng.csv")), DataError);
  }
}

namespace {

// Pascal's triangle, the independent count for subset enumeration.
std::uint64_t binomial(int n, int k) {
  std::vector<std::vector<std::uint64_t>> c(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  for (int i = 0; i <= n; ++i) {
    c[i][0] = 1;
    for (int j = 1; j <= i; ++j)
      c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
  }
  return c[n][k];
}

}  // namespace

TEST_CASE("subset enumeration counts match binomial coefficients") {
  CHECK(all_subsets_of_size(16, 2).size() == 120);
  CHECK(all_subsets_of_size(16, 8).size() == 12870);
  CHECK(all_subsets_of_size(5, 0).size() == 1);
  CHECK(all_subsets_of_size(5, 0)[0].empty());
  for (int n = 0; n <= 16; ++n)
    CHECK(all_subsets_of_size(16, n).size() == binomial(16, n));
}

TEST_CASE("subset enumeration is lexicographic, sorted, duplicate-free") {
  const auto subsets = all_subsets_of_size(6, 3);
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const auto& ids = subsets[i].ids();
    for (std::size_t j = 1; j < ids.size(); ++j) CHECK(ids[j - 1] < ids[j]);
    if (i > 0) CHECK(subsets[i - 1] < subsets[i]);
  }
  CHECK_THROWS_AS(all_subsets_of_size(4, 5), DataError);
}

TEST_CASE("PhonemeSubset invariants") {
  PhonemeSubset s({3, 1, 2});
  CHECK(s.ids() == std::vector<int>{1, 2, 3});
  CHECK(s.contains(2));
  CHECK(!s.contains(0));
  CHECK(s.with(0).ids() == std::vector<int>{0, 1, 2, 3});
  CHECK_THROWS_AS(PhonemeSubset({1, 1}), DataError);
  CHECK_THROWS_AS(PhonemeSubset({-1}), DataError);
}

TEST_CASE("asllex shape validation") {
  // build a 16-type inventory with the documented cardinalities
  std::vector<PhonemeType> types(16);
  const char* names[16] = {"Dominant Handshape", "Nondominant Handshape",
                           "Second Handshape", "Major Location",
                           "Minor Location", "Second Minor Location",
                           "Path Movement", "Repeated Movement", "Wrist Twist",
                           "Contact", "Flexion", "Selected Fingers",
                           "Sign Type", "Spread", "Spread Change",
                           "Thumb Position"};
  for (int t = 0; t < 16; ++t) {
    types[t].id = t;
    types[t].name = names[t];
    int card = 2;
    if (types[t].name == "Minor Location") card = 37;
    if (types[t].name == "Dominant Handshape") card = 49;
    if (types[t].name == "Path Movement") card = 8;
    for (int v = 0; v < card; ++v)
      types[t].value_names.push_back("v" + std::to_string(100 + v));
  }
  PhonemeInventory inv(std::move(types));
  CHECK(inv.total_value_count() < 200);
  CHECK_NOTHROW(validate_asllex_shape(inv));

  Lexicon toy = make_lexicon({2, 2}, {{0, 0}, {1, 1}});
  CHECK_THROWS_AS(validate_asllex_shape(toy.inventory()), DataError);
}
