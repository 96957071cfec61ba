#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "test_util.h"
#include "xlparse/clustering.h"
#include "xlparse/common.h"

using namespace xlparse;
using namespace xlparse::testing;

namespace {

// Average mutual information of adjacent class pairs inside sentences,
// computed from scratch. Words without a class only add to the marginals
// of their partner: marginals count bigrams with any partner.
double class_mi(const MonolingualCorpus& corpus, const std::map<std::string, int>& cls) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> left, right;
  double total = 0.0;
  for (const auto& s : corpus)
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      total += 1.0;
      const auto a = cls.find(s[k]), b = cls.find(s[k + 1]);
      if (a != cls.end()) left[a->second] += 1.0;
      if (b != cls.end()) right[b->second] += 1.0;
      if (a != cls.end() && b != cls.end()) joint[{a->second, b->second}] += 1.0;
    }
  double mi = 0.0;
  for (const auto& [ab, c] : joint) mi += c / total * std::log(c * total / (left[ab.first] * right[ab.second]));
  return mi;
}

std::map<std::string, int> as_classes(const std::vector<std::vector<std::string>>& clusters) {
  std::map<std::string, int> cls;
  for (std::size_t k = 0; k < clusters.size(); ++k)
    for (const auto& w : clusters[k]) cls[w] = static_cast<int>(k);
  return cls;
}

// Sentences alternating a word of class A with a word of class B.
MonolingualCorpus alternating(int sentences, Rng& rng) {
  MonolingualCorpus c;
  for (int k = 0; k < sentences; ++k) {
    std::vector<std::string> s;
    const int len = 2 + static_cast<int>(uniform_below(rng, 6));
    for (int i = 0; i < len; ++i)
      s.push_back((i % 2 == 0 ? "a" : "b") + std::to_string(1 + uniform_below(rng, 4)));
    c.push_back(s);
  }
  return c;
}

MonolingualCorpus random_corpus(int sentences, int vocab, Rng& rng) {
  MonolingualCorpus c;
  for (int k = 0; k < sentences; ++k) {
    std::vector<std::string> s;
    const int len = 1 + static_cast<int>(uniform_below(rng, 8));
    // Skewed draw so frequencies differ.
    for (int i = 0; i < len; ++i) {
      const auto u = uniform_below(rng, static_cast<std::uint64_t>(vocab));
      s.push_back("v" + std::to_string(std::min(u, uniform_below(rng, static_cast<std::uint64_t>(vocab)))));
    }
    c.push_back(s);
  }
  return c;
}

TranslationLexicon lexicon(const std::string& from, const std::string& to, const std::map<std::string, std::string>& m) {
  TranslationLexicon lex(from, to);
  for (const auto& [a, b] : m) lex.add_count(a, b);
  return lex;
}

MonolingualCorpus repeat(const std::vector<std::string>& words, int sentences, int len) {
  MonolingualCorpus c;
  for (int k = 0; k < sentences; ++k) {
    std::vector<std::string> s;
    for (int i = 0; i < len; ++i) s.push_back(words[(k + i) % words.size()]);
    c.push_back(s);
  }
  return c;
}

bool prefix_free(const Clustering& c) {
  std::set<std::string> leaves;
  for (const auto& [w, e] : c.words()) leaves.insert(e.bits);
  for (const auto& a : leaves)
    for (const auto& b : leaves)
      if (a != b && b.rfind(a, 0) == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("code-switching examples") {
  const MonolingualCorpus en = {{"the", "cat"}, {"a", "dog", "runs"}};
  const MonolingualCorpus fr = {{"le", "chat"}};
  CodeSwitchSpec spec;
  spec.corpora = {{"en", en}, {"fr", fr}};
  spec.lexicons[{"en", "fr"}] = lexicon("en", "fr", {{"the", "le"}, {"cat", "chat"}, {"a", "un"}, {"dog", "chien"}, {"runs", "court"}});
  spec.lexicons[{"fr", "en"}] = lexicon("fr", "en", {{"le", "the"}, {"chat", "cat"}});

  SUBCASE("alpha 0 concatenates the inputs") {
    spec.alpha = 0.0;
    const auto r = generate_codeswitch(spec);
    CHECK(r.corpus == MonolingualCorpus{{"the", "cat"}, {"a", "dog", "runs"}, {"le", "chat"}});
    CHECK(r.replaced == 0);
    CHECK(r.tokens == 7);
  }
  SUBCASE("alpha 1 with full coverage replaces every token") {
    spec.alpha = 1.0;
    const auto r = generate_codeswitch(spec);
    CHECK(r.corpus == MonolingualCorpus{{"le", "chat"}, {"un", "chien", "court"}, {"the", "cat"}});
    CHECK(r.replaced == 7);
    CHECK(r.replaced_into.at("fr") == 5);
  }
  SUBCASE("NULL translations keep the word") {
    spec.alpha = 1.0;
    spec.lexicons[{"fr", "en"}] = lexicon("fr", "en", {{"le", "the"}});
    const auto r = generate_codeswitch(spec);
    CHECK(r.corpus.back() == std::vector<std::string>{"the", "chat"});
    CHECK(r.sampled == 7);
    CHECK(r.replaced == 6);
  }
  SUBCASE("a missing lexicon is an error") {
    spec.lexicons.erase({"fr", "en"});
    CHECK_THROWS_AS(generate_codeswitch(spec), DataError);
  }
  SUBCASE("alpha outside [0, 1] is an error") {
    spec.alpha = 1.5;
    CHECK_THROWS_AS(generate_codeswitch(spec), DataError);
  }
}

TEST_CASE("code-switching rate and language choice follow their distributions") {
  const std::vector<std::string> words = {"p", "q", "r", "s", "t"};
  std::map<std::string, std::string> to_y, to_z;
  for (const auto& w : words) {
    to_y[w] = "y_" + w;
    to_z[w] = "z_" + w;
  }
  CodeSwitchSpec spec;
  spec.corpora = {{"x", repeat(words, 1000, 10)}, {"y", {}}, {"z", {}}};
  for (const auto& a : {"x", "y", "z"})
    for (const auto& b : {"x", "y", "z"})
      if (std::string(a) != b) spec.lexicons[{a, b}] = TranslationLexicon(a, b);
  spec.lexicons[{"x", "y"}] = lexicon("x", "y", to_y);
  spec.lexicons[{"x", "z"}] = lexicon("x", "z", to_z);
  spec.alpha = 0.3;
  spec.seed = 17;
  const auto r = generate_codeswitch(spec);
  REQUIRE(r.tokens == 10000);
  const double sigma = std::sqrt(0.3 * 0.7 / 10000.0);
  CHECK(std::abs(static_cast<double>(r.replaced) / 10000.0 - 0.3) < 3 * sigma);
  // Each of the two other languages is chosen with probability 1/2.
  const double n = static_cast<double>(r.replaced);
  CHECK(std::abs(static_cast<double>(r.replaced_into.at("y")) - n / 2) < 3 * std::sqrt(n / 4));
  std::size_t counted = 0;
  for (const auto& s : r.corpus)
    for (const auto& w : s) counted += w.size() > 2 && w[1] == '_';
  CHECK(counted == r.replaced);

  CHECK(generate_codeswitch(spec).corpus == r.corpus);
  std::ostringstream a, b;
  write_codeswitch_corpus(a, r, spec.seed, spec.alpha);
  write_codeswitch_corpus(b, generate_codeswitch(spec), spec.seed, spec.alpha);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("# seed=17 alpha=0.3\n", 0) == 0);
  spec.seed = 18;
  CHECK(generate_codeswitch(spec).corpus != r.corpus);
}

TEST_CASE("Brown clustering recovers the MI-optimal two-class partition") {
  Rng rng(12);
  const MonolingualCorpus corpus = alternating(400, rng);
  std::vector<std::string> types;
  for (int i = 1; i <= 4; ++i) types.push_back("a" + std::to_string(i));
  for (int i = 1; i <= 4; ++i) types.push_back("b" + std::to_string(i));

  // Exhaustive search over the 127 two-way splits of the 8 types.
  double best = -1.0;
  unsigned best_mask = 0;
  for (unsigned mask = 1; mask < 255; mask += 2) {
    std::map<std::string, int> cls;
    for (int k = 0; k < 8; ++k) cls[types[k]] = (mask >> k) & 1;
    const double mi = class_mi(corpus, cls);
    if (mi > best) {
      best = mi;
      best_mask = mask;
    }
  }
  REQUIRE(best_mask == 0x0f);

  for (bool exact : {false, true}) {
    BrownOptions o;
    o.exact = exact;
    for (int k : {2, 4, 8}) {
      const Clustering c = brown_cluster(corpus, k, o);
      CHECK(c.num_clusters() == k);
      for (int i = 1; i < 8; ++i) CHECK((*c.lookup(types[i], 1) == *c.lookup(types[0], 1)) == (i < 4));
      CHECK(prefix_free(c));
    }
  }
}

TEST_CASE("Brown clustering edge cases") {
  SUBCASE("K at least the number of types gives one cluster per type") {
    Rng rng(3);
    const auto corpus = random_corpus(60, 7, rng);
    std::set<std::string> types;
    for (const auto& s : corpus) types.insert(s.begin(), s.end());
    const Clustering c = brown_cluster(corpus, 50);
    CHECK(c.num_words() == types.size());
    CHECK(c.num_clusters() == static_cast<int>(types.size()));
    CHECK(prefix_free(c));
  }
  SUBCASE("a corpus with two types") {
    const Clustering c = brown_cluster({{"a", "a", "a", "b"}}, 1);
    CHECK(c.num_clusters() == 1);
    CHECK(*c.lookup("a") == *c.lookup("b"));
    CHECK(c.words().at("a").count == 3);
    const Clustering two = brown_cluster({{"a", "a", "a", "b"}}, 2);
    CHECK(*two.lookup("a") == "0");
    CHECK(*two.lookup("b") == "1");
  }
  SUBCASE("min_count drops rare words") {
    BrownOptions o;
    o.min_count = 2;
    const Clustering c = brown_cluster({{"a", "b", "a", "c", "b", "d"}}, 2, o);
    CHECK(c.lookup("c") == nullptr);
    CHECK(c.lookup("d") == nullptr);
    for (const auto& [w, e] : c.words()) CHECK(e.count >= 2);
    o.min_count = 5;
    CHECK_THROWS_AS(brown_cluster({{"a", "b"}}, 2, o), DataError);
  }
  SUBCASE("normalization") {
    BrownOptions o;
    o.lowercase = true;
    o.normalize_digits = true;
    const Clustering c = brown_cluster({{"The", "the", "1999", "2024"}}, 2, o);
    CHECK(c.words().at("the").count == 2);
    CHECK(c.words().at("0000").count == 2);
    CHECK(c.lookup("The") == nullptr);
  }
  SUBCASE("bad K") { CHECK_THROWS_AS(brown_cluster({{"a"}}, 0), DataError); }
}

TEST_CASE("Brown merges are MI-minimal and their losses are exact") {
  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const auto corpus = random_corpus(80, 12, rng);
    for (bool exact : {true, false}) {
      BrownOptions o;
      o.exact = exact;
      std::vector<BrownMerge> trace;
      const Clustering c = brown_cluster(corpus, 3, o, &trace);
      REQUIRE(!trace.empty());
      CHECK(prefix_free(c));
      for (const auto& m : trace) {
        const auto& before = m.clusters_before;
        const double mi_before = class_mi(corpus, as_classes(before));
        auto merged_loss = [&](int l, int r) {
          auto after = before;
          after[l].insert(after[l].end(), after[r].begin(), after[r].end());
          after.erase(after.begin() + r);
          return mi_before - class_mi(corpus, as_classes(after));
        };
        REQUIRE(m.loss == doctest::Approx(merged_loss(m.left, m.right)).epsilon(1e-9).scale(1.0));
        for (int l = 0; l < static_cast<int>(before.size()); ++l)
          for (int r = l + 1; r < static_cast<int>(before.size()); ++r) REQUIRE(m.loss <= merged_loss(l, r) + 1e-9);
      }
    }
  }
}

TEST_CASE("cluster files") {
  Clustering c;
  c.add("dog", "0110", 5);
  c.add("cat", "0110", 7);
  c.add("the", "10", 40);
  std::ostringstream out;
  write_clusters(out, c);
  CHECK(out.str() == "0110\tcat\t7\n0110\tdog\t5\n10\tthe\t40\n");
  std::istringstream in(out.str());
  CHECK(read_clusters(in) == c);
  CHECK(*c.lookup("dog", 2) == "01");
  CHECK(*c.lookup("the", 4) == "10");
  CHECK_FALSE(c.lookup("bird", 4));
  CHECK(c.num_clusters() == 2);

  std::istringstream dup("01\ta\t1\n10\ta\t2\n");
  CHECK_THROWS_AS(read_clusters(dup), ParseError);
  std::istringstream bits("0x\ta\t1\n");
  CHECK_THROWS_AS(read_clusters(bits), ParseError);
  std::istringstream cols("01 a 1\n");
  CHECK_THROWS_AS(read_clusters(cols), ParseError);
  std::istringstream count("01\ta\t-3\n");
  CHECK_THROWS_AS(read_clusters(count), ParseError);
  std::istringstream blank("\n01\ta\t1\n\n");
  CHECK(read_clusters(blank).num_words() == 1);
}
