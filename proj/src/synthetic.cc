#include "xlparse/synthetic.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "xlparse/common.h"
#include "xlparse/rng.h"

namespace xlparse {

namespace {

std::string make_word(Rng& rng, const std::string& consonants, const std::string& vowels) {
  const int syllables = 2 + static_cast<int>(uniform_below(rng, 2));
  std::string w;
  for (int k = 0; k < syllables; ++k) {
    w += consonants[uniform_below(rng, consonants.size())];
    w += vowels[uniform_below(rng, vowels.size())];
  }
  return w;
}

// Distinct pseudo-words; consonant sets keep the languages disjoint.
std::vector<std::string> make_words(Rng& rng, int count, const std::string& consonants,
                                    const std::string& vowels, std::set<std::string>& used) {
  std::vector<std::string> out;
  while (static_cast<int>(out.size()) < count) {
    std::string w = make_word(rng, consonants, vowels);
    if (used.insert(w).second) out.push_back(w);
  }
  return out;
}

struct Tok {
  std::string form;
  std::string upos;
  int head;
  std::string deprel;
};

Sentence to_sentence(const std::vector<Tok>& toks, const std::string& language) {
  Sentence s;
  s.language = language;
  for (std::size_t k = 0; k < toks.size(); ++k) {
    Token t;
    t.index = static_cast<int>(k) + 1;
    t.form = toks[k].form;
    t.upos = toks[k].upos;
    t.head = toks[k].head;
    t.deprel = toks[k].deprel;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

std::string pick(Rng& rng, const std::vector<std::string>& v) { return v[uniform_below(rng, v.size())]; }

bool coin(Rng& rng, double p) { return uniform_unit(rng) < p; }

}  // namespace

Treebank deterministic_treebank(int sentences, std::uint64_t seed, const std::string& language) {
  Rng rng(seed);
  std::set<std::string> used;
  const std::string c = "ptkmnslr", v = "aeiou";
  const auto det = make_words(rng, 4, c, v, used), adj = make_words(rng, 10, c, v, used),
             noun = make_words(rng, 30, c, v, used), verb = make_words(rng, 12, c, v, used),
             adv = make_words(rng, 6, c, v, used);
  Treebank tb;
  tb.language = language;
  for (int k = 0; k < sentences; ++k) {
    std::vector<Tok> t;
    const bool adj1 = coin(rng, 0.4), adj2 = coin(rng, 0.4), has_adv = coin(rng, 0.4);
    const int subj = adj1 ? 3 : 2;
    const int verb_pos = subj + 1;
    const int obj = verb_pos + (adj2 ? 3 : 2);
    t.push_back({pick(rng, det), "DET", subj, "det"});
    if (adj1) t.push_back({pick(rng, adj), "ADJ", subj, "amod"});
    t.push_back({pick(rng, noun), "NOUN", verb_pos, "nsubj"});
    t.push_back({pick(rng, verb), "VERB", 0, "root"});
    t.push_back({pick(rng, det), "DET", obj, "det"});
    if (adj2) t.push_back({pick(rng, adj), "ADJ", obj, "amod"});
    t.push_back({pick(rng, noun), "NOUN", verb_pos, "obj"});
    if (has_adv) t.push_back({pick(rng, adv), "ADV", verb_pos, "advmod"});
    t.push_back({".", "PUNCT", verb_pos, "punct"});
    tb.sentences.push_back(to_sentence(t, language));
  }
  return tb;
}

DictionaryCorpus dictionary_parallel_corpus(int pairs, int vocabulary, std::uint64_t seed) {
  Rng rng(seed);
  std::set<std::string> used;
  const auto src = make_words(rng, vocabulary, "ptkmnslr", "aeiou", used);
  const auto tgt = make_words(rng, vocabulary, "bdgvzfhj", "aeiouy", used);
  DictionaryCorpus out;
  for (int k = 0; k < vocabulary; ++k) out.dictionary[src[k]] = tgt[k];
  // Zipf(1) word choice by inverse CDF.
  std::vector<double> cdf(vocabulary);
  double z = 0.0;
  for (int k = 0; k < vocabulary; ++k) cdf[k] = (z += 1.0 / (k + 1.0));
  for (auto& x : cdf) x /= z;
  for (int p = 0; p < pairs; ++p) {
    const int len = 3 + static_cast<int>(uniform_below(rng, 8));
    std::vector<std::string> s, t;
    for (int k = 0; k < len; ++k) {
      const double u = uniform_unit(rng);
      const int w = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      s.push_back(src[std::min(w, vocabulary - 1)]);
      t.push_back(out.dictionary[s.back()]);
    }
    shuffle_in_place(t, rng);
    out.pairs.emplace_back(std::move(s), std::move(t));
  }
  return out;
}

namespace {

struct Vocab {
  std::vector<std::string> det, adj, noun, verb, adp_i, adp_a, noun_i, noun_a, adp_g, noun_g, part;
};

struct Pair {
  std::vector<Tok> source, target;
};

class WorldGenerator {
 public:
  explicit WorldGenerator(const WorldOptions& o) : o_(o), rng_(o.seed) {
    std::set<std::string> used;
    const std::string sc = "ptkmnslr", sv = "aeiou", tc = "bdgvzfhj", tv = "aeiouy";
    auto both = [&](int n, std::vector<std::string>& s, std::vector<std::string>& t) {
      s = make_words(rng_, n, sc, sv, used);
      t = make_words(rng_, n, tc, tv, used);
    };
    both(4, src_.det, tgt_.det);
    both(10, src_.adj, tgt_.adj);
    both(24, src_.noun, tgt_.noun);
    both(12, src_.verb, tgt_.verb);
    both(3, src_.adp_i, tgt_.adp_i);
    both(3, src_.adp_a, tgt_.adp_a);
    both(12, src_.noun_i, tgt_.noun_i);
    both(12, src_.noun_a, tgt_.noun_a);
    both(1, src_.adp_g, tgt_.adp_g);
    both(12, src_.noun_g, tgt_.noun_g);
    tgt_.part = make_words(rng_, 3, tc, tv, used);
    auto add = [&](const std::vector<std::string>& s, const std::vector<std::string>& t) {
      for (std::size_t k = 0; k < s.size(); ++k) dict_[s[k]] = t[k];
    };
    add(src_.det, tgt_.det);
    add(src_.adj, tgt_.adj);
    add(src_.noun, tgt_.noun);
    add(src_.verb, tgt_.verb);
    add(src_.adp_i, tgt_.adp_i);
    add(src_.adp_a, tgt_.adp_a);
    add(src_.noun_i, tgt_.noun_i);
    add(src_.noun_a, tgt_.noun_a);
    add(src_.adp_g, tgt_.adp_g);
    add(src_.noun_g, tgt_.noun_g);
    dict_["."] = ".";
  }

  const std::map<std::string, std::string>& dictionary() const { return dict_; }

  // Source and target renderings of one abstract sentence, 1-based heads.
  Pair sentence() {
    // Abstract units: each unit is a source token with a role.
    struct Unit {
      std::string src;
      std::string upos;
      int head;  // index into units, -1 = root
      std::string deprel;
    };
    std::vector<Unit> u;
    auto np = [&](int head, const std::string& rel) {
      const int det_i = static_cast<int>(u.size());
      u.push_back({pick(rng_, src_.det), "DET", -2, "det"});
      int adj_i = -1;
      if (coin(rng_, 0.4)) {
        adj_i = static_cast<int>(u.size());
        u.push_back({pick(rng_, src_.adj), "ADJ", -2, "amod"});
      }
      const int n = static_cast<int>(u.size());
      u.push_back({pick(rng_, src_.noun), "NOUN", head, rel});
      u[det_i].head = n;
      if (adj_i >= 0) u[adj_i].head = n;
      return n;
    };
    const int subj = np(-3, "nsubj");
    const int verb = static_cast<int>(u.size());
    u.push_back({pick(rng_, src_.verb), "VERB", -1, "root"});
    u[subj].head = verb;
    int last_noun = np(verb, "obj");
    const int pps = static_cast<int>(uniform_below(rng_, o_.max_pp + 1));
    for (int k = 0; k < pps; ++k) {
      const int adp = static_cast<int>(u.size());
      const int n = adp + 1;
      if (coin(rng_, o_.generic_pp_rate)) {
        // Shared preposition; the noun's index parity decides the attachment.
        const std::size_t w = uniform_below(rng_, src_.noun_g.size());
        const bool instrument = w % 2 == 0;
        u.push_back({src_.adp_g.front(), "ADP", n, "case"});
        u.push_back({src_.noun_g[w], "NOUN", instrument ? verb : last_noun, instrument ? "obl" : "nmod"});
      } else {
        const bool instrument = coin(rng_, 0.5);
        u.push_back({pick(rng_, instrument ? src_.adp_i : src_.adp_a), "ADP", n, "case"});
        u.push_back({pick(rng_, instrument ? src_.noun_i : src_.noun_a), "NOUN", instrument ? verb : last_noun,
                     instrument ? "obl" : "nmod"});
      }
      last_noun = n;
    }
    u.push_back({".", "PUNCT", verb, "punct"});

    Pair p;
    for (const auto& x : u) p.source.push_back({x.src, x.upos, x.head + 1, x.deprel});

    // Target order: same as the source plus an optional particle after the verb.
    const bool part = coin(rng_, o_.part_rate);
    std::vector<int> pos_of(u.size(), 0);
    for (std::size_t k = 0; k < u.size(); ++k)
      pos_of[k] = static_cast<int>(k) + 1 + (part && static_cast<int>(k) > verb ? 1 : 0);
    for (std::size_t k = 0; k < u.size(); ++k) {
      const auto& x = u[k];
      p.target.push_back({dict_.at(x.src), x.upos, x.head < 0 ? 0 : pos_of[x.head], x.deprel});
      if (part && static_cast<int>(k) == verb) p.target.push_back({pick(rng_, tgt_.part), "PART", pos_of[verb], "advmod"});
    }
    return p;
  }

 private:
  WorldOptions o_;
  Rng rng_;
  Vocab src_, tgt_;
  std::map<std::string, std::string> dict_;
};

std::vector<std::string> forms(const std::vector<Tok>& t) {
  std::vector<std::string> out;
  for (const auto& x : t) out.push_back(x.form);
  return out;
}

}  // namespace

World make_world(const WorldOptions& o) {
  WorldGenerator gen(o);
  World w;
  w.options = o;
  w.dictionary = gen.dictionary();
  const auto& sl = o.source_language;
  const auto& tl = o.target_language;
  w.source_train.language = w.parallel_source.language = sl;
  w.target_test.language = w.target_raw.language = w.parallel_target.language = w.parallel_target_gold.language = tl;
  for (int k = 0; k < o.source_train; ++k) w.source_train.sentences.push_back(to_sentence(gen.sentence().source, sl));
  for (int k = 0; k < o.parallel; ++k) {
    Pair p = gen.sentence();
    w.parallel_source.sentences.push_back(strip_tree(to_sentence(p.source, sl)));
    Sentence t = to_sentence(p.target, tl);
    w.parallel_target.sentences.push_back(strip_tree(t));
    w.parallel_target_gold.sentences.push_back(std::move(t));
  }
  for (int k = 0; k < o.target_test; ++k) w.target_test.sentences.push_back(to_sentence(gen.sentence().target, tl));
  for (int k = 0; k < o.target_raw; ++k)
    w.target_raw.sentences.push_back(strip_tree(to_sentence(gen.sentence().target, tl)));
  for (int k = 0; k < o.monolingual; ++k) {
    w.source_mono.push_back(forms(gen.sentence().source));
    w.target_mono.push_back(forms(gen.sentence().target));
  }
  return w;
}

void write_world(const World& w, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto& sl = w.options.source_language;
  const auto& tl = w.options.target_language;
  auto path = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  auto open = [&](const std::string& name) {
    std::ofstream out(path(name));
    if (!out) throw DataError("cannot write " + path(name));
    return out;
  };
  write_conllu_file(path(sl + ".train.conllu"), w.source_train);
  write_conllu_file(path(tl + ".test.conllu"), w.target_test);
  write_conllu_file(path(tl + ".raw.conllu"), w.target_raw);
  write_conllu_file(path("parallel." + sl + ".conllu"), w.parallel_source);
  write_conllu_file(path("parallel." + tl + ".conllu"), w.parallel_target);
  {
    auto out = open(sl + ".mono.txt");
    write_tokenized_corpus(out, w.source_mono);
  }
  {
    auto out = open(tl + ".mono.txt");
    write_tokenized_corpus(out, w.target_mono);
  }
  {
    auto out = open("dictionary.tsv");
    out << "# lexicon src=" << sl << " tgt=" << tl << '\n';
    for (const auto& [s, t] : w.dictionary) out << s << '\t' << t << "\t1\n";
  }
  {
    auto out = open("world.conf");
    out << "# Synthetic two-language world (seed " << w.options.seed << ").\n"
        << "target = " << tl << '\n'
        << "sources = " << sl << '\n'
        << "treebank." << sl << " = " << sl << ".train.conllu\n"
        << "test = " << tl << ".test.conllu\n"
        << "raw = " << tl << ".raw.conllu\n"
        << "mono." << sl << " = " << sl << ".mono.txt\n"
        << "mono." << tl << " = " << tl << ".mono.txt\n"
        << "parallel." << sl << ".source = parallel." << sl << ".conllu\n"
        << "parallel." << sl << ".target = parallel." << tl << ".conllu\n"
        << "clusters.k = 12\n"
        << "clusters.exact = true\n"
        << "seed = 1\n"
        << "epochs = 3\n"
        << "beam = 8\n";
  }
  for (const std::string mode : {"delex-baseline", "delex+selftrain", "clusters", "lexicalized", "density"}) {
    auto out = open(mode + ".conf");
    out << "include = world.conf\n"
        << "name = " << mode << '\n'
        << "mode = " << mode << '\n';
  }
}

}  // namespace xlparse
