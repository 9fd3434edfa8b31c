#include <sstream>

#include "doctest.h"
#include "instances.hpp"
#include "sceptre/corpus.hpp"
#include "sceptre/errors.hpp"

using namespace sceptre;
using sceptre::testing::make_corpus;

namespace {

const char* kTree =
    "root\t\tAll\n"
    "shoes\troot\tShoes\n"
    "hats\troot\tHats\n";

const char* kProducts =
    R"({"id":"a","title":"A","categories":[["root","shoes"]],"price":10,"brand":"x","rating":4.5,"reviews":["good shoe","good fit"]})"
    "\n"
    R"({"id":"b","title":"B","categories":[["root","shoes"]],"price":12,"reviews":["bad shoe"],"descriptions":["a shoe"]})"
    "\n"
    R"({"id":"c","title":"C","categories":[["root","hats"]],"reviews":["warm hat zzz"]})"
    "\n";

}  // namespace

TEST_CASE("ingest: empty streams give an empty corpus") {
  const auto c = make_corpus("", "");
  CHECK(c.size() == 0);
  CHECK(c.tree.empty());
  CHECK(c.edge_sets.empty());
  CHECK(c.stats.total_dropped() == 0);
}

TEST_CASE("ingest: three products and two edges") {
  const auto c = make_corpus(kProducts, kTree, {{GraphType::substitute_viewed, "a\tb\nb\ta\n"}});
  CHECK(c.size() == 3);
  REQUIRE(c.edges(GraphType::substitute_viewed) != nullptr);
  CHECK(c.edges(GraphType::substitute_viewed)->edges.size() == 2);
  CHECK(c.products[0].price == doctest::Approx(10.0));
  CHECK_FALSE(c.products[2].price.has_value());
  CHECK(*c.products[0].brand == "x");
}

TEST_CASE("ingest: edges to unknown products, self loops and repeats are dropped and counted") {
  const auto c =
      make_corpus(kProducts, kTree, {{GraphType::complement_also_bought, "a\tzz\na\ta\na\tc\na\tc\n"}});
  const auto n = static_cast<std::size_t>(GraphType::complement_also_bought);
  CHECK(c.stats.dropped_unknown[n] == 1);
  CHECK(c.stats.dropped_self_loops[n] == 1);
  CHECK(c.stats.dropped_duplicates[n] == 1);
  CHECK(c.edges(GraphType::complement_also_bought)->edges.size() == 1);
}

TEST_CASE("ingest: malformed product line reports its line number") {
  std::string products = std::string(kProducts) + "{not json\n";
  try {
    make_corpus(products, kTree);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("ingest: cyclic tree is a structural error") {
  CHECK_THROWS_AS(make_corpus("", "root\t\tR\na\tb\tA\nb\ta\tB\n"), StructureError);
  CHECK_THROWS_AS(make_corpus("", "root\t\tR\nother\t\tO\n"), StructureError);
}

TEST_CASE("ingest: deterministic serialization") {
  const auto a = make_corpus(kProducts, kTree, {{GraphType::substitute_viewed, "a\tb\n"}});
  const auto b = make_corpus(kProducts, kTree, {{GraphType::substitute_viewed, "a\tb\n"}});
  CHECK(serialize_corpus(a) == serialize_corpus(b));
}

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
  CHECK(tokenize("Good, SHOE!fit") == std::vector<std::string>{"good", "shoe", "fit"});
  TokenizerOptions bigrams;
  bigrams.bigrams = true;
  CHECK(tokenize("warm wool hat", bigrams) ==
        std::vector<std::string>{"warm", "wool", "hat", "warm_wool", "wool_hat"});
}

TEST_CASE("build_vocabulary: frequency threshold, tie rule and hand counts") {
  const auto c = make_corpus(
      R"({"id":"a","categories":[["root"]],"reviews":["good shoe"]})"
      "\n"
      R"({"id":"b","categories":[["root"]],"reviews":["good fit"]})"
      "\n",
      "root\t\tAll\n");
  VocabularyOptions o;
  const auto v = build_vocabulary(c, o);
  REQUIRE(v.size() == 3);
  CHECK(*v.id("good") == 0);
  // "fit" and "shoe" both occur once: lexicographic order decides
  CHECK(*v.id("fit") == 1);
  CHECK(*v.id("shoe") == 2);
  CHECK(v.entry(0).document_frequency == 2);

  const auto full = make_corpus(kProducts, kTree);
  o.min_count = 2;
  const auto pruned = build_vocabulary(full, o);
  CHECK_FALSE(pruned.id("zzz").has_value());
  CHECK(pruned.id("shoe").has_value());

  o.min_count = 1;
  o.max_size = 2;
  const auto capped = build_vocabulary(full, o);
  CHECK(capped.size() == 2);
  CHECK(capped.token(0) == "shoe");
}

TEST_CASE("build_documents: concatenation, source selection and OOV skipping") {
  const auto c = make_corpus(kProducts, kTree);
  const auto v = build_vocabulary(c, {});
  const auto docs = build_documents(c, v, {});
  CHECK(docs.documents[0].length() == 4);

  TextSources descriptions_only{false, true};
  const auto desc = build_documents(c, v, descriptions_only);
  CHECK(desc.is_empty(0));
  CHECK(desc.documents[1].length() == 2);
  CHECK(std::find(desc.empty.begin(), desc.empty.end(), 0u) != desc.empty.end());

  VocabularyOptions o;
  o.min_count = 2;
  const auto pruned = build_vocabulary(c, o);
  const auto short_docs = build_documents(c, pruned, {});
  // "warm hat zzz": every token occurs once in the corpus
  CHECK(short_docs.is_empty(2));
  CHECK(short_docs.documents[0].length() == 3);
}

TEST_CASE("vocabulary ids are a permutation and decode/encode is the identity") {
  const auto c = make_corpus(kProducts, kTree);
  const auto v = build_vocabulary(c, {});
  std::vector<bool> seen(v.size(), false);
  for (TokenId id = 0; id < v.size(); ++id) {
    CHECK(*v.id(v.token(id)) == id);
    seen[id] = true;
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  const auto docs = build_documents(c, v, {});
  std::size_t total = 0;
  for (const auto& d : docs.documents) {
    std::string text;
    for (auto t : d.tokens) text += v.token(t) + " ";
    CHECK(encode(text, v) == d.tokens);
    total += d.length();
  }
  CHECK(total == docs.total_tokens());
}

TEST_CASE("multi-category products take the union of their paths") {
  const auto c = make_corpus(R"({"id":"a","categories":[["root","shoes"],["root","hats"]],"reviews":["x"]})"
                             "\n",
                             kTree);
  CHECK(c.product_nodes[0].size() == 3);
  CHECK(c.product_deepest[0].size() == 2);
}

TEST_CASE("immediate family: node, parent, children and siblings") {
  const auto c = make_corpus("", "root\t\tR\na\troot\tA\nb\troot\tB\na1\ta\tA1\n");
  const auto a = *c.tree.find("a");
  auto fam = c.tree.immediate_family(a);
  std::sort(fam.begin(), fam.end());
  std::vector<NodeIndex> expect{*c.tree.find("root"), a, *c.tree.find("b"), *c.tree.find("a1")};
  std::sort(expect.begin(), expect.end());
  CHECK(fam == expect);
}
