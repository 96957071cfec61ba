#include <sstream>

#include "doctest.h"
#include "test_util.h"
#include "xlparse/common.h"
#include "xlparse/parser.h"
#include "xlparse/synthetic.h"

using namespace xlparse;
using namespace xlparse::testing;

namespace {

std::string bytes(const Model& m) {
  std::ostringstream out;
  save_model(out, m);
  return out.str();
}

Model trained_model(int sentences, int epochs, std::uint64_t seed = 1) {
  const Treebank tb = deterministic_treebank(sentences, seed);
  Model m(collect_labels(tb), TemplateSet::delexicalized(), 8);
  TrainOptions o;
  o.epochs = epochs;
  return train(m, tb, o);
}

// Random POS sequences, which the synthetic grammar never produces.
Treebank random_sentences(int count, std::uint64_t seed) {
  Rng rng(seed);
  Treebank tb;
  const std::vector<std::string> tags = {"DET", "ADJ", "NOUN", "VERB", "ADV", "PUNCT"};
  for (int k = 0; k < count; ++k) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 12));
    Sentence s = make_sentence(std::vector<int>(n, -1));
    for (auto& t : s.tokens) t.upos = tags[uniform_below(rng, tags.size())];
    tb.sentences.push_back(s);
  }
  return tb;
}

}  // namespace

TEST_CASE("zero-weight model decodes by the tie-break order") {
  Model m(LabelAlphabet({"det", "root"}), TemplateSet::delexicalized(), 1);
  const Sentence s = make_sentence({-1, -1}, {}, {"DET", "NOUN"});
  const auto r = beam_decode(m, s);
  // SHIFT is the lowest ordinal at every step, so nothing gets attached.
  CHECK(r.actions == std::vector<Action>{Action::shift(), Action::shift()});
  CHECK(r.tree.heads() == std::vector<int>{-1, 0, 0});
  CHECK(*r.tree.at(1).deprel == "dep");
  CHECK(r.score == 0.0);
}

TEST_CASE("hand-set weights pick the higher-scoring of the two one-token parses") {
  LabelAlphabet labels({"root"});
  Model m(labels, TemplateSet::delexicalized(), 4);
  const Sentence s = make_sentence({-1}, {}, {"VERB"});
  const FeatureContext ctx(s, {}, labels);
  const auto feats = extract_features(ctx, initial_config(s), m.templates);
  const int right_root = action_index(Action::right(0), 1);
  m.weights.set(feats.front(), right_root, 1.0);
  // Sequences: [SHIFT] scores 0, [RIGHT(root)] scores 1.
  auto r = beam_decode(m, s);
  CHECK(r.tree.heads() == std::vector<int>{-1, 0});
  CHECK(*r.tree.at(1).deprel == "root");
  CHECK(r.score == 1.0);
  CHECK(score_sequence(m, s, r.actions) == 1.0);

  m.weights.set(feats.front(), 0, 2.0);
  r = beam_decode(m, s);
  CHECK(r.actions == std::vector<Action>{Action::shift()});
  CHECK(*r.tree.at(1).deprel == "dep");
}

TEST_CASE("beam 1 equals greedy and final scores grow with the beam") {
  const Model m = trained_model(60, 1);
  const Treebank grammar = deterministic_treebank(50, 99);
  const Treebank noise = random_sentences(50, 5);
  int strict = 0;
  for (const auto* tb : {&grammar, &noise}) {
    for (const auto& s : tb->sentences) {
      const Sentence bare = strip_tree(s);
      const auto g = greedy_decode(m, bare);
      const auto b1 = beam_decode(m, bare, nullptr, 1);
      REQUIRE(g.tree == b1.tree);
      REQUIRE(g.actions == b1.actions);
      double prev = b1.score;
      for (int width : {2, 4, 8}) {
        const auto r = beam_decode(m, bare, nullptr, width);
        REQUIRE(r.score >= prev);
        if (r.score > prev) ++strict;
        REQUIRE(score_sequence(m, bare, r.actions) == doctest::Approx(r.score).epsilon(1e-12));
        prev = r.score;
      }
    }
  }
  MESSAGE("sentences where a wider beam found a strictly better parse: " << strict);
}

TEST_CASE("a perceptron update widens the gold margin by the squared difference norm") {
  LabelAlphabet labels({"det", "nsubj", "root"});
  Model m(labels, TemplateSet::delexicalized(), 4);
  const Sentence s = make_sentence({2, 3, 0}, {"det", "nsubj", "root"}, {"DET", "NOUN", "VERB"});
  const FeatureContext ctx(s, {}, labels);
  const auto gold = oracle_sequence(s, labels);
  const std::vector<Action> wrong = {Action::shift(), Action::shift(), Action::left(1), Action::left(0)};
  Rng rng(4);
  for (int k = 0; k < 3; ++k) {
    // Start from arbitrary weights so the check is not trivial.
    const auto gc = sequence_features(m, ctx, 3, gold);
    for (const auto& [key, v] : gc) m.weights.set(key.first, key.second, uniform_unit(rng) - 0.5);
    const double before = score_sequence(m, s, gold) - score_sequence(m, s, wrong);
    const auto vc = sequence_features(m, ctx, 3, wrong);
    const double norm = perceptron_update(m.weights, gc, vc);
    const double after = score_sequence(m, s, gold) - score_sequence(m, s, wrong);
    CHECK(norm > 0.0);
    CHECK(after - before == doctest::Approx(norm).epsilon(1e-12));
  }
}

TEST_CASE("training") {
  SUBCASE("one sentence is fitted exactly") {
    Treebank tb;
    tb.sentences.push_back(
        make_sentence({2, 3, 0, 5, 3, 3}, {"det", "nsubj", "root", "det", "obj", "punct"},
                      {"DET", "NOUN", "VERB", "DET", "NOUN", "PUNCT"}));
    Model m(collect_labels(tb), TemplateSet::delexicalized(), 4);
    TrainOptions o;
    o.epochs = 5;
    const Model fit = train(m, tb, o);
    CHECK(beam_decode(fit, strip_tree(tb.sentences[0])).tree == tb.sentences[0]);
  }
  SUBCASE("the deterministic grammar is learned") {
    const Treebank tb = deterministic_treebank(100, 1);
    Model m(collect_labels(tb), TemplateSet::delexicalized(), 8);
    TrainStats st;
    const Model fit = train(m, tb, {}, &st);
    CHECK(st.used == 100);
    long correct = 0, total = 0;
    for (const auto& s : tb.sentences) {
      const auto p = beam_decode(fit, strip_tree(s)).tree;
      for (int i = 1; i <= s.size(); ++i, ++total) correct += *p.at(i).head == *s.at(i).head;
    }
    CHECK(static_cast<double>(correct) / total >= 0.99);
  }
  SUBCASE("zero epochs return the initial model") {
    const Treebank tb = deterministic_treebank(5, 1);
    Model m(collect_labels(tb), TemplateSet::delexicalized(), 8);
    m.weights.set({0, 1}, 0, 0.5);
    TrainOptions o;
    o.epochs = 0;
    CHECK(bytes(train(m, tb, o)) == bytes(m));
  }
  SUBCASE("runs are bit-identical") {
    CHECK(bytes(trained_model(40, 2)) == bytes(trained_model(40, 2)));
  }
  SUBCASE("the seed changes the sentence order") {
    const Treebank tb = deterministic_treebank(40, 1);
    Model m(collect_labels(tb), TemplateSet::delexicalized(), 8);
    TrainOptions a, b;
    a.epochs = b.epochs = 1;
    b.seed = 2;
    CHECK(bytes(train(m, tb, a)) != bytes(train(m, tb, b)));
  }
  SUBCASE("bad input") {
    Model m(LabelAlphabet({"dep", "root"}), TemplateSet::delexicalized(), 8);
    CHECK_THROWS_AS(train(m, Treebank{}), DataError);
    Treebank missing;
    missing.sentences.push_back(make_sentence({2, -1}));
    CHECK_THROWS_AS(train(m, missing), DataError);
    Treebank mixed;
    mixed.sentences.push_back(make_sentence({3, 4, 0, 1}));
    mixed.sentences.push_back(make_sentence({2, 0}));
    TrainStats st;
    train(m, mixed, {}, &st);
    CHECK(st.skipped_nonprojective == 1);
    CHECK(st.used == 1);
  }
  SUBCASE("early update also fits") {
    const Treebank tb = deterministic_treebank(60, 3);
    Model m(collect_labels(tb), TemplateSet::delexicalized(), 4);
    TrainOptions o;
    o.early_update = true;
    o.epochs = 4;
    const Model fit = train(m, tb, o);
    long correct = 0, total = 0;
    for (const auto& s : tb.sentences) {
      const auto p = beam_decode(fit, strip_tree(s)).tree;
      for (int i = 1; i <= s.size(); ++i, ++total) correct += *p.at(i).head == *s.at(i).head;
    }
    CHECK(static_cast<double>(correct) / total >= 0.95);
  }
}

TEST_CASE("model files") {
  const Model m = trained_model(40, 2);
  SUBCASE("round-trip keeps every weight and every parse") {
    std::istringstream in(bytes(m));
    const Model back = load_model(in);
    CHECK(back.weights == m.weights);
    CHECK(back.labels == m.labels);
    CHECK(back.templates == m.templates);
    CHECK(back.metadata == m.metadata);
    CHECK(bytes(back) == bytes(m));
    const Treebank test = deterministic_treebank(50, 77);
    for (const auto& s : test.sentences) {
      const auto a = beam_decode(m, strip_tree(s));
      const auto b = beam_decode(back, strip_tree(s));
      REQUIRE(a.tree == b.tree);
      REQUIRE(a.score == b.score);
    }
  }
  SUBCASE("clusterings travel inside the file") {
    Model c = m;
    auto xl = std::make_shared<Clustering>();
    xl->add("w1", "0110", 3);
    c.crosslingual = xl;
    c.cluster_refs = {"crosslingual=test"};
    std::istringstream in(bytes(c));
    const Model back = load_model(in);
    REQUIRE(back.crosslingual);
    CHECK(*back.crosslingual == *xl);
    CHECK_FALSE(back.monolingual);
    CHECK(back.cluster_refs == c.cluster_refs);
  }
  SUBCASE("truncation is an error at every length") {
    const std::string full = bytes(m);
    for (std::size_t len : {std::size_t{0}, std::size_t{3}, std::size_t{9}, full.size() / 2, full.size() - 1}) {
      std::istringstream in(full.substr(0, len));
      CHECK_THROWS_AS(load_model(in), DataError);
    }
  }
  SUBCASE("version mismatch is an error") {
    std::string data = bytes(m);
    data[4] = 9;
    std::istringstream in(data);
    CHECK_THROWS_WITH_AS(load_model(in), doctest::Contains("version"), DataError);
  }
  SUBCASE("an empty model scores zero after a round-trip") {
    Model empty(LabelAlphabet({"root"}), TemplateSet::full(), 3);
    std::istringstream in(bytes(empty));
    const Model back = load_model(in);
    CHECK(back.weights.num_features() == 0);
    CHECK(back.beam_width == 3);
    CHECK(beam_decode(back, make_sentence({-1, -1})).score == 0.0);
  }
}

TEST_CASE("parallel decoding matches sequential decoding") {
  const Model m = trained_model(40, 2);
  Treebank test = deterministic_treebank(60, 8);
  for (auto& s : test.sentences) s = strip_tree(s);
  CHECK(parse_treebank(m, test, 1) == parse_treebank(m, test, 3));
}
