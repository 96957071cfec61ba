#include <set>
#include <sstream>

#include "doctest.h"
#include "test_util.h"
#include "xlparse/common.h"
#include "xlparse/features.h"
#include "xlparse/synthetic.h"
#include "xlparse/transfer.h"

using namespace xlparse;
using namespace xlparse::testing;

namespace {

WalsProfile profile(const std::string& lang, const std::vector<std::string>& values) {
  WalsProfile p;
  p.language = lang;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!values[k].empty()) p.values[kWalsFeatures[k]] = values[k];
  return p;
}

Sentence cat_sleeps() { return make_sentence({2, 3, 0}, {"det", "nsubj", "root"}, {"DET", "NOUN", "VERB"}); }

std::vector<PartialTree> trees_with_density(const std::vector<std::vector<int>>& heads) {
  std::vector<PartialTree> out;
  for (const auto& h : heads) out.push_back(PartialTree::from_sentence(make_sentence(h)));
  return out;
}

// Random injective links between n source and m target tokens.
Links random_injective(int n, int m, Rng& rng) {
  std::vector<int> tgt(m);
  for (int j = 0; j < m; ++j) tgt[j] = j;
  shuffle_in_place(tgt, rng);
  Links l;
  for (int i = 0, used = 0; i < n && used < m; ++i)
    if (uniform_unit(rng) < 0.75) l.emplace(i, tgt[used++]);
  return l;
}

Model delex_model(const Treebank& tb, int epochs = 3) {
  Model m(collect_labels(tb), TemplateSet::delexicalized(), 8);
  TrainOptions o;
  o.epochs = epochs;
  return train(m, tb, o);
}

Treebank single(const Sentence& s) {
  Treebank tb;
  tb.sentences.push_back(s);
  return tb;
}

bool has_family(const WeightVector& w, Family f) {
  const auto [b, e] = family_range(f);
  bool found = false;
  w.for_each_row([&](const FeatureId& id, std::span<const double>) {
    const int t = static_cast<int>(id.template_id);
    found = found || (t >= b && t < e);
  });
  return found;
}

}  // namespace

TEST_CASE("WALS source selection") {
  std::map<std::string, WalsProfile> profiles;
  profiles["es"] = profile("es", {"SV", "VO", "Prep", "NG", "NAdj", "NRel"});
  profiles["fr"] = profile("fr", {"SV", "VO", "Prep", "NG", "NAdj", "NRel"});
  profiles["de"] = profile("de", {"SV", "X", "Prep", "GN", "AdjN", "NRel"});
  profiles["ja"] = profile("ja", {"SV", "OV", "Postp", "GN", "AdjN", "RelN"});
  profiles["xx"] = profile("xx", {"", "", "", "", "", ""});
  CHECK(wals_matches(profiles["es"], profiles["fr"]) == 6);
  CHECK(wals_matches(profiles["es"], profiles["de"]) == 3);
  CHECK(wals_matches(profiles["es"], profiles["xx"]) == 0);
  CHECK(wals_matches(profiles["xx"], profiles["xx"]) == 0);
  CHECK(select_sources("es", profiles, 4) == std::vector<std::string>{"fr"});
  CHECK(select_sources("es", profiles, 3) == std::vector<std::string>{"de", "fr"});
  CHECK(select_sources("es", profiles, 0) == std::vector<std::string>{"de", "fr", "ja", "xx"});
  CHECK_THROWS_AS(select_sources("zz", profiles, 4), DataError);
  for (const auto& [a, pa] : profiles)
    for (const auto& [b, pb] : profiles) CHECK(wals_matches(pa, pb) == wals_matches(pb, pa));
}

TEST_CASE("WALS CSV") {
  std::istringstream in(
      "88A,lang,82A,83A,85A,86A,87A\n"
      "Dem-N,es,SV,VO,Prep,NG,NAdj\n"
      "Dem-N,fr,SV,_,Prep,,NA\n");
  const auto p = read_wals_csv(in);
  REQUIRE(p.size() == 2);
  CHECK(p.at("es").values.size() == 6);
  CHECK(p.at("fr").values.size() == 3);
  CHECK(p.at("fr").values.at("88A") == "Dem-N");
  CHECK(wals_matches(p.at("es"), p.at("fr")) == 3);
  std::istringstream missing("lang,82A,83A\nes,SV,VO\n");
  CHECK_THROWS_AS(read_wals_csv(missing), ParseError);
  std::istringstream ragged("lang,82A,83A,85A,86A,87A,88A\nes,SV\n");
  CHECK_THROWS_AS(read_wals_csv(ragged), ParseError);
  std::istringstream dup("lang,82A,83A,85A,86A,87A,88A\nes,,,,,,\nes,,,,,,\n");
  CHECK_THROWS_AS(read_wals_csv(dup), ParseError);
}

TEST_CASE("lexicalize") {
  Treebank tb;
  tb.language = "fr";
  Sentence s = make_sentence({2, 0}, {"det", "root"}, {"DET", "NOUN"});
  s.at(1).form = "le";
  s.at(2).form = "chat";
  s.language = "fr";
  tb.sentences.push_back(s);
  TranslationLexicon lex("fr", "en");
  lex.add_count("chat", "cat");
  const Treebank out = lexicalize(tb, lex);
  CHECK(*out.sentences[0].at(2).lexform == "cat");
  CHECK_FALSE(out.sentences[0].at(1).lexform);
  const Treebank twice = lexicalize(out, lex);
  CHECK(twice == out);
  for (int i = 1; i <= 2; ++i) {
    CHECK(out.sentences[0].at(i).form == s.at(i).form);
    CHECK(out.sentences[0].at(i).head == s.at(i).head);
    CHECK(out.sentences[0].at(i).deprel == s.at(i).deprel);
  }
  CHECK_THROWS_AS(lexicalize(tb, TranslationLexicon("de", "en")), DataError);
}

TEST_CASE("projection examples") {
  const Sentence src = cat_sleeps();
  const Sentence tgt = strip_tree(make_sentence({-1, -1, -1}));
  SUBCASE("identity links copy the tree") {
    const auto p = project(src, tgt, {{0, 0}, {1, 1}, {2, 2}});
    CHECK(p.sentence.heads() == std::vector<int>{-1, 2, 3, 0});
    CHECK(*p.sentence.at(2).deprel == "nsubj");
    CHECK(p.density() == 1.0);
    CHECK(p.full_projective);
    CHECK(assign_tier(p, default_tiers()) == 100);
  }
  SUBCASE("no links, no arcs") {
    const auto p = project(src, tgt, {});
    CHECK(p.attached == 0);
    CHECK(p.density() == 0.0);
    CHECK_FALSE(assign_tier(p, default_tiers()));
  }
  SUBCASE("one unaligned token in five gives density 0.8") {
    const Sentence s5 = make_sentence({2, 0, 2, 5, 3}, {}, {"DET", "VERB", "NOUN", "ADJ", "NOUN"});
    const Sentence t5 = strip_tree(make_sentence({-1, -1, -1, -1, -1}));
    // Target token 4 stays unaligned; source token 4's arc is lost.
    const auto p = project(s5, t5, {{0, 0}, {1, 1}, {2, 2}, {4, 4}});
    CHECK(p.attached == 4);
    CHECK(p.density() == doctest::Approx(0.8));
    CHECK(p.sentence.heads() == std::vector<int>{-1, 2, 0, 2, -1, 3});
    CHECK(assign_tier(p, default_tiers()) == 80);
    CHECK(assign_tier(p, {100, 90}) == std::nullopt);
  }
  SUBCASE("non-injective links are rejected") {
    CHECK_THROWS_WITH_AS(project(src, tgt, {{0, 0}, {1, 0}}), doctest::Contains("alignments not intersected"),
                         DataError);
    CHECK_THROWS_AS(project(src, tgt, {{0, 5}}), DataError);
    CHECK_THROWS_AS(project(strip_tree(src), tgt, {}), DataError);
  }
}

TEST_CASE("projected arcs are exactly the linked source arcs") {
  Rng rng(33);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 10));
    const int m = 1 + static_cast<int>(uniform_below(rng, 10));
    const Sentence src = with_random_tags(make_sentence(random_tree_heads(n, rng)), rng);
    const Sentence tgt = strip_tree(make_sentence(std::vector<int>(m, -1)));
    const Links links = random_injective(n, m, rng);
    std::map<int, int> s2t{{0, 0}};
    for (const auto& [i, j] : links) s2t[i + 1] = j + 1;
    std::set<std::tuple<int, int, std::string>> expected, got;
    for (const auto& t : src.tokens)
      if (s2t.count(t.index) && s2t.count(*t.head)) expected.emplace(s2t[*t.head], s2t[t.index], *t.deprel);
    const PartialTree p = project(src, tgt, links);
    for (const auto& t : p.sentence.tokens)
      if (t.head) got.emplace(*t.head, t.index, *t.deprel);
    REQUIRE(got == expected);
    REQUIRE(p.attached == static_cast<int>(expected.size()));
    if (assign_tier(p, default_tiers()) == 100) {
      LabelAlphabet labels = collect_labels(single(p.sentence));
      REQUIRE_NOTHROW(oracle_sequence(p.sentence, labels));
    }
  }
}

TEST_CASE("tiers") {
  const auto trees = trees_with_density({{2, 3, 0}, {2, 0, -1, 3, 4, 5, 6, 7, 8, 9}, {2, 0, -1, -1, 4}});
  CHECK(assign_tier(trees[0], default_tiers()) == 100);
  CHECK(assign_tier(trees[1], default_tiers()) == 90);
  CHECK(assign_tier(trees[2], default_tiers()) == std::nullopt);
  CHECK(assign_tier(trees[2], {100, 60}) == 60);
  // Full but not projective never reaches tier 100.
  const auto np = PartialTree::from_sentence(make_sentence({3, 4, 0, 1}));
  CHECK(assign_tier(np, default_tiers()) == 90);
  const auto buckets = bucket_by_tier(trees, default_tiers());
  CHECK(buckets.size() == 2);
  CHECK(buckets.begin()->first == 100);
  CHECK_THROWS_AS(validate_tiers({90, 100}), UsageError);
  CHECK_THROWS_AS(validate_tiers({}), UsageError);
  CHECK_THROWS_AS(validate_tiers({110}), UsageError);
  CHECK_THROWS_AS(validate_tiers({80, 80}), UsageError);
}

TEST_CASE("constrained completion keeps every projected arc") {
  const Model m = delex_model(deterministic_treebank(40, 1), 1);
  Rng rng(44);
  LabelAlphabet labels = m.labels;
  int full = 0;
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 10));
    Sentence s = with_random_tags(make_sentence(random_projective_heads(n, rng)), rng);
    for (auto& t : s.tokens) t.deprel = labels.labels()[uniform_below(rng, labels.labels().size())];
    const bool keep_all = k % 4 == 0;
    if (!keep_all)
      for (auto& t : s.tokens)
        if (uniform_unit(rng) < 0.4) {
          t.head.reset();
          t.deprel.reset();
        }
    const ArcConstraints cons = ArcConstraints::from_sentence(s, labels);
    const Sentence done = beam_decode(m, s, &cons).tree;
    for (const auto& t : s.tokens)
      if (t.head) {
        REQUIRE(done.at(t.index).head == t.head);
        REQUIRE(done.at(t.index).deprel == t.deprel);
      }
    if (keep_all) {
      REQUIRE(done.heads() == s.heads());
      ++full;
    }
  }
  CHECK(full == 50);
}

TEST_CASE("density-driven training") {
  const Treebank seed = deterministic_treebank(30, 2);
  const Model proto(LabelAlphabet{}, TemplateSet::full(), 8);
  TransferConfig cfg;
  cfg.epochs = 2;
  SUBCASE("no tiers is plain training") {
    const Model d = density_train(proto, seed, {}, cfg);
    Model m(collect_labels(seed), TemplateSet::full(), 8);
    TrainOptions o;
    o.epochs = 2;
    const Model plain = train(m, seed, o);
    CHECK(d.weights == plain.weights);
    CHECK(d.labels == plain.labels);
  }
  SUBCASE("stages add partial trees tier by tier") {
    Treebank more = deterministic_treebank(20, 9);
    TieredTrees tiered;
    Rng rng(3);
    for (auto& s : more.sentences) {
      PartialTree p = PartialTree::from_sentence(s);
      Sentence partial = s;
      if (uniform_unit(rng) < 0.5 && s.size() >= 10) {
        partial.at(1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(s.size())))).head.reset();
        for (auto& t : partial.tokens)
          if (!t.head) t.deprel.reset();
        p = PartialTree::from_sentence(partial);
      }
      if (auto tier = assign_tier(p, cfg.tiers)) tiered[*tier].push_back(p);
    }
    REQUIRE(tiered.count(100));
    std::vector<DensityStage> trace;
    const Model d = density_train(proto, seed, tiered, cfg, &trace);
    REQUIRE(!trace.empty());
    CHECK(trace.front().tier == 100);
    CHECK(trace.front().pool_size == seed.size() + tiered[100].size());
    std::size_t total = seed.size();
    for (const auto& [t, v] : tiered) total += v.size();
    CHECK(trace.back().pool_size == total);
    CHECK(d.metadata.at("density.pool") == std::to_string(total));
    CHECK(density_train(proto, seed, tiered, cfg).weights == d.weights);
  }
  SUBCASE("an empty pool is an error") {
    CHECK_THROWS_WITH_AS(density_train(proto, Treebank{}, {}, cfg), doctest::Contains("no full trees to initialize"),
                         DataError);
  }
  SUBCASE("tier 100 must hold full projective trees") {
    TieredTrees bad;
    bad[100].push_back(PartialTree::from_sentence(make_sentence({2, -1})));
    CHECK_THROWS_AS(density_train(proto, seed, bad, cfg), DataError);
  }
}

TEST_CASE("self-training") {
  const Treebank train_tb = deterministic_treebank(60, 4);
  const Model delex = delex_model(train_tb);
  const Model proto(LabelAlphabet{}, TemplateSet::full(), 8);
  TransferConfig cfg;
  SUBCASE("a single sentence is reproduced") {
    Treebank one;
    one.sentences.push_back(strip_tree(deterministic_treebank(1, 50).sentences[0]));
    // Averaging over three passes of one sentence still underfits it.
    cfg.epochs = 10;
    const Model st = self_train(delex, one, proto, cfg);
    const Sentence own = with_own_lexforms(one).sentences[0];
    CHECK(beam_decode(st, own).tree.heads() == beam_decode(delex, one.sentences[0]).tree.heads());
    CHECK(has_family(st.weights, Family::kLexical));
  }
  SUBCASE("a grammar the delexicalized model parses perfectly stays perfect") {
    Treebank raw = deterministic_treebank(80, 5);
    for (auto& s : raw.sentences) s = strip_tree(s);
    const Model st = self_train(delex, raw, proto, cfg);
    const Treebank held = deterministic_treebank(40, 6);
    long a = 0, b = 0, total = 0;
    for (const auto& s : held.sentences) {
      const auto p1 = beam_decode(delex, strip_tree(s)).tree;
      const auto p2 = beam_decode(st, with_own_lexforms(single(strip_tree(s))).sentences[0]).tree;
      for (int i = 1; i <= s.size(); ++i, ++total) {
        a += *p1.at(i).head == *s.at(i).head;
        b += *p2.at(i).head == *s.at(i).head;
      }
    }
    CHECK(b >= a);
  }
  SUBCASE("an empty corpus is an error") { CHECK_THROWS_AS(self_train(delex, Treebank{}, proto, cfg), DataError); }
}

TEST_CASE("partial-tree files") {
  const auto trees = trees_with_density({{2, 3, 0}, {2, 0, -1, 3}});
  std::ostringstream out;
  write_partial_trees(out, trees);
  const std::string text = out.str();
  CHECK(text.find("# density=3/3\n") != std::string::npos);
  CHECK(text.find("# density=3/4\n") != std::string::npos);
  CHECK(text.find("3\tw3\t_\tNOUN\t_\t_\t_\t_\t_\t_\n") != std::string::npos);
  std::istringstream in(text);
  const auto back = read_partial_trees(in, "xx");
  REQUIRE(back.size() == 2);
  CHECK(back[1].attached == 3);
  CHECK(back[1].sentence.heads() == trees[1].sentence.heads());
  std::ostringstream again;
  write_partial_trees(again, back);
  CHECK(again.str() == text);
}
