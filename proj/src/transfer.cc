#include "xlparse/transfer.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "xlparse/common.h"

namespace xlparse {

std::map<std::string, WalsProfile> read_wals_csv(std::istream& in) {
  std::map<std::string, WalsProfile> out;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  int lang_col = -1;
  std::map<std::string, int> feature_col;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split(line, ',');
    for (auto& c : cols) c = std::string(trim(c));
    if (header.empty()) {
      header = cols;
      for (int k = 0; k < static_cast<int>(cols.size()); ++k) {
        if (cols[k] == "lang" || cols[k] == "language") lang_col = k;
        for (const auto& f : kWalsFeatures)
          if (cols[k] == f) feature_col[f] = k;
      }
      if (lang_col < 0) throw ParseError(lineno, "WALS header has no 'lang' column");
      for (const auto& f : kWalsFeatures)
        if (!feature_col.count(f)) throw ParseError(lineno, "WALS header lacks feature column " + f);
      continue;
    }
    if (cols.size() != header.size())
      throw ParseError(lineno, "expected " + std::to_string(header.size()) + " columns, found " +
                                   std::to_string(cols.size()));
    WalsProfile p;
    p.language = cols[lang_col];
    if (p.language.empty()) throw ParseError(lineno, "empty language code");
    for (const auto& [f, k] : feature_col) {
      const auto& v = cols[k];
      if (!v.empty() && v != "_" && v != "NA") p.values[f] = v;
    }
    if (out.count(p.language)) throw ParseError(lineno, "duplicate language '" + p.language + "'");
    out.emplace(p.language, std::move(p));
  }
  return out;
}

int wals_matches(const WalsProfile& a, const WalsProfile& b) {
  int n = 0;
  for (const auto& f : kWalsFeatures) {
    auto x = a.values.find(f);
    auto y = b.values.find(f);
    if (x != a.values.end() && y != b.values.end() && x->second == y->second) ++n;
  }
  return n;
}

std::vector<std::string> select_sources(const std::string& target,
                                        const std::map<std::string, WalsProfile>& profiles, int threshold) {
  auto t = profiles.find(target);
  if (t == profiles.end()) throw DataError("no WALS profile for target language '" + target + "'");
  std::vector<std::string> out;
  for (const auto& [code, p] : profiles)
    if (code != target && wals_matches(t->second, p) >= threshold) out.push_back(code);
  return out;
}

Treebank lexicalize(const Treebank& treebank, const TranslationLexicon& lexicon) {
  if (lexicon.src_lang() != treebank.language)
    throw DataError("lexicon translates from '" + lexicon.src_lang() + "' but the treebank is '" +
                    treebank.language + "'");
  Treebank out = treebank;
  for (auto& s : out.sentences)
    for (auto& t : s.tokens) t.lexform = lexicon.lookup(t.form);
  return out;
}

PartialTree project(const Sentence& source, const Sentence& target, const Links& links) {
  if (!source.has_all_heads()) throw DataError("project: source tree is incomplete");
  const int ns = source.size(), nt = target.size();
  std::vector<int> s2t(ns + 1, -1), t2s(nt + 1, -1);
  for (const auto& [i, j] : links) {
    if (i < 0 || j < 0 || i >= ns || j >= nt)
      throw DataError("project: link " + std::to_string(i) + "-" + std::to_string(j) + " out of bounds");
    if (s2t[i + 1] >= 0 || t2s[j + 1] >= 0) throw DataError("alignments not intersected");
    s2t[i + 1] = j + 1;
    t2s[j + 1] = i + 1;
  }
  s2t[0] = 0;
  Sentence out = target;
  for (auto& t : out.tokens) {
    t.head.reset();
    t.deprel.reset();
  }
  bool rooted = false;
  int dropped_roots = 0;
  for (const auto& tok : source.tokens) {
    const int m = s2t[tok.index];
    const int h = s2t[*tok.head];
    if (m < 0 || h < 0) continue;
    if (h == 0) {
      if (rooted) {
        ++dropped_roots;
        continue;
      }
      rooted = true;
    }
    out.at(m).head = h;
    out.at(m).deprel = tok.deprel;
  }
  if (dropped_roots > 0)
    log_info("project: dropped " + std::to_string(dropped_roots) + " extra projected root(s)");
  return PartialTree::from_sentence(std::move(out));
}

void validate_tiers(const TierSchedule& tiers) {
  if (tiers.empty()) throw UsageError("tier schedule is empty");
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    if (tiers[k] <= 0 || tiers[k] > 100) throw UsageError("tiers must lie in (0, 100]");
    if (k > 0 && tiers[k] >= tiers[k - 1]) throw UsageError("tiers must be strictly decreasing");
  }
}

std::optional<int> assign_tier(const PartialTree& tree, const TierSchedule& tiers) {
  for (int t : tiers) {
    if (t == 100 ? tree.full_projective : tree.density_at_least(t)) return t;
  }
  return std::nullopt;
}

TieredTrees bucket_by_tier(const std::vector<PartialTree>& trees, const TierSchedule& tiers) {
  validate_tiers(tiers);
  TieredTrees out;
  for (const auto& t : trees)
    if (auto tier = assign_tier(t, tiers)) out[*tier].push_back(t);
  return out;
}

namespace {

Model fresh_model(const Model& prototype, const LabelAlphabet& labels, int beam) {
  Model m(labels, prototype.templates, beam);
  m.crosslingual = prototype.crosslingual;
  m.monolingual = prototype.monolingual;
  m.cluster_refs = prototype.cluster_refs;
  m.fallback_label = prototype.fallback_label;
  m.metadata = prototype.metadata;
  return m;
}

TrainOptions train_options(const TransferConfig& config) {
  TrainOptions o;
  o.epochs = config.epochs;
  o.seed = config.seed;
  o.beam_width = config.beam_width;
  return o;
}

}  // namespace

Model density_train(const Model& prototype, const Treebank& seed_trees, const TieredTrees& tiered,
                    const TransferConfig& config, std::vector<DensityStage>* trace) {
  validate_tiers(config.tiers);
  Treebank pool;
  pool.language = seed_trees.language;
  pool.sentences = seed_trees.sentences;
  Treebank all_labels = pool;
  for (const auto& [tier, trees] : tiered)
    for (const auto& t : trees) all_labels.sentences.push_back(t.sentence);
  const LabelAlphabet labels = collect_labels(all_labels);

  std::size_t added = 0;
  if (auto it = tiered.find(100); it != tiered.end()) {
    for (const auto& t : it->second) {
      if (!t.full_projective) throw DataError("tier 100 contains a tree that is not full and projective");
      pool.sentences.push_back(t.sentence);
      ++added;
    }
  }
  if (pool.sentences.empty()) throw DataError("no full trees to initialize");
  const int beam = config.beam_width > 0 ? config.beam_width : prototype.beam_width;
  Model model = train(fresh_model(prototype, labels, beam), pool, train_options(config));
  if (trace) trace->push_back({100, added, pool.sentences.size()});

  for (int tier : config.tiers) {
    if (tier == 100) continue;
    auto it = tiered.find(tier);
    if (it == tiered.end() || it->second.empty()) continue;
    std::size_t violated = 0;
    for (const auto& pt : it->second) {
      const ArcConstraints cons = ArcConstraints::from_sentence(pt.sentence, model.labels);
      Sentence done = beam_decode(model, pt.sentence, &cons).tree;
      for (const auto& tok : pt.sentence.tokens)
        if (tok.head && done.at(tok.index).head != tok.head) {
          ++violated;
          break;
        }
      pool.sentences.push_back(std::move(done));
    }
    if (violated > 0)
      log_info("density_train: tier " + std::to_string(tier) + ": " + std::to_string(violated) +
               " completions could not keep every projected arc");
    model = train(fresh_model(prototype, labels, beam), pool, train_options(config));
    if (trace) trace->push_back({tier, it->second.size(), pool.sentences.size()});
  }
  model.metadata["density.pool"] = std::to_string(pool.sentences.size());
  return model;
}

Model self_train(const Model& delex_model, const Treebank& target_corpus, const Model& prototype,
                 const TransferConfig& config) {
  if (target_corpus.sentences.empty()) throw DataError("self_train: empty target corpus");
  Treebank parsed = with_own_lexforms(parse_treebank(delex_model, target_corpus));
  const int beam = config.beam_width > 0 ? config.beam_width : prototype.beam_width;
  Model model = train(fresh_model(prototype, delex_model.labels, beam), parsed, train_options(config));
  model.metadata["selftrain.sentences"] = std::to_string(parsed.sentences.size());
  return model;
}

void write_partial_trees(std::ostream& out, const std::vector<PartialTree>& trees) {
  for (const auto& t : trees) {
    Sentence s = t.sentence;
    std::erase_if(s.comments, [](const std::string& c) { return c.rfind("density=", 0) == 0; });
    s.comments.push_back("density=" + std::to_string(t.attached) + "/" + std::to_string(s.size()));
    write_conllu_sentence(out, s);
  }
}

std::vector<PartialTree> read_partial_trees(std::istream& in, const std::string& language) {
  Treebank tb = read_conllu(in, language);
  std::vector<PartialTree> out;
  out.reserve(tb.sentences.size());
  for (auto& s : tb.sentences) out.push_back(PartialTree::from_sentence(std::move(s)));
  return out;
}

}  // namespace xlparse
