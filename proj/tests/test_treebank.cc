#include <sstream>

#include "doctest.h"
#include "test_util.h"
#include "xlparse/common.h"
#include "xlparse/treebank.h"

using namespace xlparse;
using namespace xlparse::testing;

namespace {

const char* kCatSleeps =
    "1\tthe\t_\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tcat\t_\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
    "3\tsleeps\t_\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n";

Treebank parse(const std::string& text, const ConlluOptions& o = {}) {
  std::istringstream in(text);
  return read_conllu(in, "en", o);
}

std::string write(const Treebank& tb) {
  std::ostringstream out;
  write_conllu(out, tb);
  return out.str();
}

}  // namespace

TEST_CASE("read_conllu maps the retained columns") {
  const Treebank tb = parse(kCatSleeps);
  REQUIRE(tb.size() == 1);
  const Sentence& s = tb.sentences[0];
  CHECK(s.size() == 3);
  CHECK(s.heads() == std::vector<int>{-1, 2, 3, 0});
  CHECK(s.at(1).form == "the");
  CHECK(s.at(2).upos == "NOUN");
  CHECK(*s.at(3).deprel == "root");
  CHECK(s.language == "en");
  CHECK(tb.token_count() == 3);
}

TEST_CASE("multiword ranges and empty nodes are skipped") {
  const std::string text =
      "1\tI\t_\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tdo\t_\tAUX\t_\t_\t0\troot\t_\t_\n"
      "3-4\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "3\tdo\t_\tAUX\t_\t_\t2\tconj\t_\t_\n"
      "4\tn't\t_\tPART\t_\t_\t3\tadvmod\t_\t_\n"
      "4.1\tghost\t_\tX\t_\t_\t_\t_\t_\t_\n";
  const Treebank tb = parse(text);
  REQUIRE(tb.size() == 1);
  CHECK(tb.sentences[0].size() == 4);
  CHECK(tb.sentences[0].at(3).form == "do");
  CHECK(tb.sentences[0].at(4).form == "n't");
}

TEST_CASE("read_conllu reports bad input with the line number") {
  SUBCASE("head out of range") {
    const std::string text =
        "1\tthe\t_\tDET\t_\t_\t2\tdet\t_\t_\n"
        "2\tcat\t_\tNOUN\t_\t_\t9\tnsubj\t_\t_\n"
        "3\tsleeps\t_\tVERB\t_\t_\t0\troot\t_\t_\n";
    try {
      parse(text);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("head out of range") != std::string::npos);
    }
  }
  SUBCASE("column count") { CHECK_THROWS_AS(parse("1\tthe\tDET\n"), ParseError); }
  SUBCASE("non-integer head") { CHECK_THROWS_AS(parse("1\tthe\t_\tDET\t_\t_\tx\tdet\t_\t_\n"), ParseError); }
  SUBCASE("strict tagset") {
    ConlluOptions o;
    o.strict_upos = true;
    CHECK_THROWS_AS(parse("1\tthe\t_\tFOO\t_\t_\t0\troot\t_\t_\n", o), ParseError);
    CHECK_NOTHROW(parse("1\tthe\t_\tFOO\t_\t_\t0\troot\t_\t_\n"));
  }
}

TEST_CASE("write_conllu round-trips") {
  const Treebank tb = parse(kCatSleeps);
  const Treebank back = parse(write(tb));
  CHECK(back.sentences == tb.sentences);

  Sentence s = strip_tree(tb.sentences[0]);
  s.at(1).lexform = "le";
  s.comments.push_back("sent_id = 1");
  Treebank partial;
  partial.sentences.push_back(s);
  const std::string text = write(partial);
  CHECK(text.find("1\tthe\t_\tDET\t_\t_\t_\t_\t_\tLex=le\n") != std::string::npos);
  CHECK(text.rfind("# sent_id = 1\n", 0) == 0);
  CHECK(parse(text).sentences[0].tokens == s.tokens);

  CHECK(write(Treebank{}).empty());
}

TEST_CASE("read(write(t)) = t on random trees") {
  Rng rng(11);
  Treebank tb;
  tb.language = "xx";
  for (int k = 0; k < 50; ++k) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 15));
    tb.sentences.push_back(with_random_tags(make_sentence(random_tree_heads(n, rng)), rng));
  }
  std::istringstream in(write(tb));
  CHECK(read_conllu(in, "xx").sentences == tb.sentences);
}

TEST_CASE("is_projective examples") {
  CHECK(is_projective(make_sentence({2, 3, 0})));
  CHECK_FALSE(is_projective(make_sentence({3, 4, 0, 1})));
  CHECK(is_projective(make_sentence({0})));
  CHECK_THROWS_AS(is_projective(make_sentence({2, -1, 0})), DataError);
}

TEST_CASE("is_projective agrees with the crossing-pair check") {
  Rng rng(5);
  int nonprojective = 0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 15));
    const auto heads = random_tree_heads(n, rng);
    const bool expected = brute_force_projective(heads);
    nonprojective += expected ? 0 : 1;
    REQUIRE(is_projective(make_sentence(heads)) == expected);
  }
  CHECK(nonprojective > 100);
}

TEST_CASE("validate_tree rejects cycles in random functional graphs") {
  Rng rng(9);
  int trees = 0, rejected = 0;
  for (int k = 0; k < 2000; ++k) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 8));
    std::vector<int> heads(n);
    for (int m = 1; m <= n; ++m) {
      int h;
      do {
        h = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(n + 1)));
      } while (h == m);
      heads[m - 1] = h;
    }
    for (bool single : {true, false}) {
      const bool expected = brute_force_is_tree(heads, single);
      REQUIRE(is_valid_tree(make_sentence(heads), single) == expected);
      if (expected) ++trees;
      else ++rejected;
    }
  }
  CHECK(trees > 100);
  CHECK(rejected > 100);
  CHECK_THROWS_AS(validate_tree(make_sentence({2, 1})), DataError);
  CHECK_THROWS_AS(validate_tree(make_sentence({0, 0})), DataError);
  CHECK_NOTHROW(validate_tree(make_sentence({0, 0}), false));
}

TEST_CASE("PartialTree density is an exact ratio") {
  const auto p = PartialTree::from_sentence(make_sentence({2, 3, 0, 3, -1}));
  CHECK(p.attached == 4);
  CHECK(p.density() == doctest::Approx(0.8));
  CHECK(p.density_at_least(80));
  CHECK_FALSE(p.density_at_least(81));
  CHECK_FALSE(p.full_projective);

  const auto full = PartialTree::from_sentence(make_sentence({2, 3, 0}));
  CHECK(full.full_projective);
  CHECK(full.density_at_least(100));
  CHECK_FALSE(PartialTree::from_sentence(make_sentence({3, 4, 0, 1})).full_projective);
}

TEST_CASE("tokenized corpora") {
  {
    std::istringstream in("a b c\n\nd\n");
    CHECK(read_tokenized_corpus(in) == MonolingualCorpus{{"a", "b", "c"}, {"d"}});
  }
  {
    std::istringstream in("");
    CHECK(read_tokenized_corpus(in).empty());
  }
  {
    std::istringstream in("x\t y   z\t\tw\n");
    CHECK(read_tokenized_corpus(in) == MonolingualCorpus{{"x", "y", "z", "w"}});
  }
  std::ostringstream out;
  write_tokenized_corpus(out, {{"a", "b"}, {"c"}});
  CHECK(out.str() == "a b\nc\n");
}

TEST_CASE("lexform helpers") {
  const Sentence s = with_own_lexforms(make_sentence({2, 0}));
  CHECK(*s.at(1).lexform == "w1");
  const Sentence bare = strip_tree(s);
  CHECK_FALSE(bare.at(1).head.has_value());
  CHECK_FALSE(bare.at(1).deprel.has_value());
  CHECK(bare.at(1).lexform == s.at(1).lexform);
}

TEST_CASE("string helpers") {
  CHECK(split_whitespace("  a \t b ") == std::vector<std::string>{"a", "b"});
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(trim("  x ") == "x");
  CHECK(join({"a", "b"}, "+") == "a+b");
  CHECK(hash_string("abc") == hash_string("abc"));
  CHECK(hash_string("abc") != hash_string("abd"));
}
