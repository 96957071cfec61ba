#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "test_util.h"
#include "xlparse/clustering.h"
#include "xlparse/features.h"
#include "xlparse/weights.h"

using namespace xlparse;
using namespace xlparse::testing;

namespace {

Sentence tagged(const std::vector<std::string>& upos, const std::vector<std::string>& forms = {}) {
  std::vector<int> heads(upos.size(), -1);
  Sentence s = make_sentence(heads, {}, upos);
  for (std::size_t k = 0; k < forms.size(); ++k) s.tokens[k].form = forms[k];
  return s;
}

std::multiset<std::string> described(const FeatureContext& ctx, const Configuration& c, const TemplateSet& ts) {
  std::multiset<std::string> out;
  for (const auto& [f, text] : describe_features(ctx, c, ts)) out.insert(text);
  return out;
}

// A random reachable configuration with a few arcs.
Configuration random_config(int n, int num_labels, Rng& rng) {
  Configuration c = initial_config(n);
  const int steps = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(2 * n)));
  for (int k = 0; k < steps && !c.terminal(); ++k) {
    const auto acts = allowed_actions(c, num_labels);
    c = apply(c, acts[uniform_below(rng, acts.size())]);
  }
  if (c.terminal()) c = initial_config(n);
  return c;
}

std::multiset<FeatureId> as_set(const std::vector<FeatureId>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("template inventory sizes are pinned") {
  const auto [p0, p1] = family_range(Family::kPos);
  const auto [l0, l1] = family_range(Family::kLexical);
  const auto [c0, c1] = family_range(Family::kCluster);
  CHECK(p0 == 0);
  CHECK(p1 - p0 == 46);
  CHECK(l0 == p1);
  CHECK(l1 - l0 == 31);
  CHECK(c0 == l1);
  CHECK(c1 - c0 == 136);
  CHECK(feature_templates().size() == 213);
  for (const auto& t : feature_templates()) CHECK(family_of(t.id) == t.family);
}

TEST_CASE("delexicalized features on the initial configuration") {
  const Sentence s = tagged({"DET", "NOUN", "VERB"});
  LabelAlphabet labels({"det", "root"});
  const FeatureContext ctx(s, {}, labels);
  const Configuration c = initial_config(s);
  const std::multiset<std::string> expected = {
      "S0p=<ROOT>",
      "N0p=DET",
      "N1p=NOUN",
      "N2p=VERB",
      "S0p.N0p=<ROOT>|DET",
      "N0p.N1p=DET|NOUN",
      "N0p.N1p.N2p=DET|NOUN|VERB",
      "S0p.N0p.N1p=<ROOT>|DET|NOUN",
      "S0p.S0d=<ROOT>|1",
      "N0p.S0d=DET|1",
      "S0p.N0p.S0d=<ROOT>|DET|1",
      "S0p.S0vr=<ROOT>|0",
      "S0p.S0vl=<ROOT>|0",
      "N0p.N0vl=DET|0",
      "S0l=<none>",
      "S0p.S0sr=<ROOT>|{}",
      "S0p.S0sl=<ROOT>|{}",
      "N0p.N0sl=DET|{}",
  };
  CHECK(described(ctx, c, TemplateSet::delexicalized()) == expected);
  const auto ids = extract_features(ctx, c, TemplateSet::delexicalized());
  CHECK(ids.size() == expected.size());
  for (const auto& f : ids) CHECK(family_of(static_cast<int>(f.template_id)) == Family::kPos);
}

TEST_CASE("NULL lexforms contribute no lexical features") {
  Sentence s = tagged({"DET", "NOUN", "VERB"});
  s.at(1).lexform = "le";
  s.at(3).lexform = "dort";  // token 2 has a NULL translation
  LabelAlphabet labels({"det"});
  const FeatureContext ctx(s, {}, labels);
  Configuration c = apply(initial_config(s), Action::shift());  // S0 = 1, N0 = 2
  TemplateSet lex{false, false, true};
  const auto feats = described(ctx, c, lex);
  CHECK(!feats.empty());
  for (const auto& f : feats) {
    CHECK(f.find("N0w") == std::string::npos);
  }
  c = apply(c, Action::left(0));  // S0 = ROOT, N0 = 2 with S0l... N0l = 1
  for (const auto& f : described(ctx, c, lex)) CHECK(f.find("N0w") == std::string::npos);
}

TEST_CASE("cluster features carry 4- and 6-bit prefixes and full strings") {
  Clustering xl;
  xl.add("gato", "010110", 5);
  Clustering mono;
  mono.add("cat", "1110", 3);
  Sentence s = tagged({"NOUN"}, {"gato"});
  s.at(1).lexform = "cat";
  LabelAlphabet labels({"root"});
  const FeatureContext ctx(s, {&xl, &mono}, labels);
  const auto feats = described(ctx, initial_config(s), TemplateSet{false, true, false});
  CHECK(feats.count("N0x4=0101") == 1);
  CHECK(feats.count("N0x6=010110") == 1);
  CHECK(feats.count("N0xf=010110") == 1);
  CHECK(feats.count("N0cf=1110") == 1);
  CHECK(feats.count("S0x4.N0x6=<ROOT>|010110") == 0);
  CHECK(feats.count("S0p.N0x4=<ROOT>|0101") == 1);
  for (const auto& f : feats) {
    const std::string name = f.substr(0, f.find('='));
    const bool has_cluster_atom = name.find("x4") != std::string::npos || name.find("x6") != std::string::npos ||
                                  name.find("xf") != std::string::npos || name.find("cf") != std::string::npos;
    CHECK(has_cluster_atom);
  }
}

TEST_CASE("cluster_prefix") {
  CHECK(cluster_prefix("010110", 4) == "0101");
  CHECK(cluster_prefix("01", 4) == "01");
  CHECK_THROWS(cluster_prefix("", 4));
  CHECK_THROWS(cluster_prefix("01", 0));
}

TEST_CASE("template sets") {
  CHECK(TemplateSet::delexicalized().is_delexicalized());
  CHECK_FALSE(TemplateSet::full().is_delexicalized());
  CHECK(TemplateSet::full().to_string() == "P+C+L");
  CHECK(TemplateSet::parse("P+L") == TemplateSet{true, false, true});
  CHECK_THROWS(TemplateSet::parse("P+X"));
}

TEST_CASE("family separation and determinism on random configurations") {
  Rng rng(42);
  LabelAlphabet labels(test_labels());
  Clustering xl, mono;
  for (int w = 0; w < 6; ++w) {
    std::string bits;
    for (int b = 0; b < 3 + w % 5; ++b) bits += (w >> (b % 3)) & 1 ? '1' : '0';
    bits += std::to_string(w % 2);
    xl.add("w" + std::to_string(w + 1), bits, 1);
    mono.add("t" + std::to_string(w + 1), bits, 1);
  }
  const TemplateSet all = TemplateSet::full();
  for (int k = 0; k < 300; ++k) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 10));
    Sentence s = with_random_tags(make_sentence(std::vector<int>(n, -1)), rng);
    for (auto& t : s.tokens)
      if (uniform_unit(rng) < 0.7) t.lexform = "t" + std::to_string(t.index);
    const FeatureContext ctx(s, {&xl, &mono}, labels);
    const Configuration c = random_config(n, labels.size(), rng);

    const auto full = extract_features(ctx, c, all);
    REQUIRE(full == extract_features(ctx, c, all));
    for (Family f : {Family::kCluster, Family::kLexical}) {
      TemplateSet without = all;
      if (f == Family::kCluster) without.cluster = false;
      else without.lexical = false;
      const auto [b, e] = family_range(f);
      std::multiset<FeatureId> expected;
      for (const auto& id : full)
        if (static_cast<int>(id.template_id) < b || static_cast<int>(id.template_id) >= e) expected.insert(id);
      REQUIRE(as_set(extract_features(ctx, c, without)) == expected);
    }
    // Without clusterings and lexforms the full set collapses to P.
    Sentence bare = s;
    for (auto& t : bare.tokens) t.lexform.reset();
    const FeatureContext bare_ctx(bare, {}, labels);
    REQUIRE(as_set(extract_features(bare_ctx, c, all)) == as_set(extract_features(bare_ctx, c, TemplateSet::delexicalized())));
  }
}

TEST_CASE("score arithmetic") {
  WeightVector w;
  const FeatureId f1{0, 1}, f2{0, 2}, f3{1, 1};
  CHECK(score(w, {}) == 0.0);
  w.set(f1, 0, 2.0);
  w.set(f2, 0, -0.5);
  const std::vector<FeatureId> both = {f1, f2};
  CHECK(score(w, both) == 1.5);
  const std::vector<FeatureId> with_unseen = {f1, f2, f3};
  CHECK(score(w, with_unseen) == 1.5);
}

TEST_CASE("score is additive over feature multisets") {
  Rng rng(3);
  WeightVector w(4);
  std::vector<FeatureId> pool;
  for (int k = 0; k < 40; ++k) pool.push_back({static_cast<std::uint32_t>(k % 5), rng()});
  for (const auto& f : pool)
    for (int a = 0; a < 4; ++a) w.set(f, a, static_cast<double>(static_cast<int>(uniform_below(rng, 21)) - 10) / 4.0);
  for (int k = 0; k < 200; ++k) {
    std::vector<FeatureId> a, b;
    for (int j = 0; j < 8; ++j) a.push_back(pool[uniform_below(rng, pool.size())]);
    for (int j = 0; j < 5; ++j) b.push_back(pool[uniform_below(rng, pool.size())]);
    std::vector<FeatureId> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    for (int out = 0; out < 4; ++out) REQUIRE(w.score(ab, out) == w.score(a, out) + w.score(b, out));
    std::vector<double> all;
    w.scores(ab, false, all);
    for (int out = 0; out < 4; ++out) REQUIRE(all[out] == w.score(ab, out));
  }
}

TEST_CASE("lazy averaging equals the mean of per-instance snapshots") {
  Rng rng(8);
  WeightVector w(2);
  std::vector<FeatureId> feats = {{0, 1}, {0, 2}, {1, 7}};
  std::map<std::pair<int, int>, double> raw;
  std::map<std::pair<int, int>, double> snapshot_sum;
  const int instances = 25;
  for (int t = 0; t < instances; ++t) {
    const int updates = static_cast<int>(uniform_below(rng, 4));
    for (int u = 0; u < updates; ++u) {
      const int f = static_cast<int>(uniform_below(rng, feats.size()));
      const int a = static_cast<int>(uniform_below(rng, 2));
      const double d = uniform_unit(rng) < 0.5 ? 1.0 : -1.0;
      w.update(feats[f], a, d);
      raw[{f, a}] += d;
    }
    w.tick();
    for (int f = 0; f < 3; ++f)
      for (int a = 0; a < 2; ++a) snapshot_sum[{f, a}] += raw[{f, a}];
    for (int f = 0; f < 3; ++f)
      for (int a = 0; a < 2; ++a) {
        REQUIRE(w.weight(feats[f], a, false) == raw[{f, a}]);
        REQUIRE(w.weight(feats[f], a, true) == doctest::Approx(snapshot_sum[{f, a}] / (t + 1)).epsilon(1e-12));
      }
  }
  const WeightVector avg = w.averaged();
  for (int f = 0; f < 3; ++f)
    for (int a = 0; a < 2; ++a)
      CHECK(avg.weight(feats[f], a) == doctest::Approx(snapshot_sum[{f, a}] / instances).epsilon(1e-12));
  CHECK(avg.time() == 0);
}
