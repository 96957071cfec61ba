#include "xlparse/parser.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "xlparse/common.h"
#include "xlparse/rng.h"

namespace xlparse {

Model::Model(LabelAlphabet l, TemplateSet t, int beam)
    : weights(xlparse::num_actions(l.size())), templates(t), labels(std::move(l)), beam_width(beam) {}

namespace {

struct BeamItem {
  Configuration config;
  double score = 0.0;
  std::vector<Action> history;
  bool gold = false;
};

struct Candidate {
  double score;
  int ordinal;  // -1 for a terminal item carried forward
  int parent;
};

bool candidate_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.ordinal != b.ordinal) return a.ordinal < b.ordinal;
  return a.parent < b.parent;
}

class Scorer {
 public:
  Scorer(const Model& m, const FeatureContext& ctx) : model_(m), ctx_(ctx) {}

  // Scores of every action in configuration c.
  const std::vector<double>& scores(const Configuration& c) {
    feats_.clear();
    extract_features(ctx_, c, model_.templates, feats_);
    model_.weights.scores(feats_, false, scores_);
    return scores_;
  }

 private:
  const Model& model_;
  const FeatureContext& ctx_;
  std::vector<FeatureId> feats_;
  std::vector<double> scores_;
};

// One beam step. gold_next is the next gold action for items on the gold
// path (nullptr once gold is terminal or when not tracking).
std::vector<BeamItem> expand(const Model& model, Scorer& scorer, const std::vector<BeamItem>& beam,
                             const ArcConstraints* constraints, int width, const Action* gold_next) {
  const int L = model.labels.size();
  std::vector<Candidate> cands;
  for (int p = 0; p < static_cast<int>(beam.size()); ++p) {
    const auto& item = beam[p];
    if (item.config.terminal()) {
      cands.push_back({item.score, -1, p});
      continue;
    }
    const auto& s = scorer.scores(item.config);
    for (const auto& a : allowed_actions(item.config, L, constraints)) {
      const int idx = action_index(a, L);
      cands.push_back({item.score + s[idx], idx, p});
    }
  }
  const std::size_t keep = std::min<std::size_t>(cands.size(), static_cast<std::size_t>(width));
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                    candidate_before);
  std::vector<BeamItem> next;
  next.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    const auto& cand = cands[k];
    const auto& parent = beam[cand.parent];
    BeamItem item;
    item.score = cand.score;
    item.config = parent.config;
    item.history = parent.history;
    if (cand.ordinal < 0) {
      item.gold = parent.gold && gold_next == nullptr;
    } else {
      const Action a = action_from_index(cand.ordinal, L);
      apply_in_place(item.config, a);
      item.history.push_back(a);
      item.gold = parent.gold && gold_next != nullptr && *gold_next == a;
    }
    next.push_back(std::move(item));
  }
  return next;
}

bool all_terminal(const std::vector<BeamItem>& beam) {
  return std::all_of(beam.begin(), beam.end(), [](const auto& i) { return i.config.terminal(); });
}

void check_constraints(const ArcConstraints* constraints, const Sentence& sentence) {
  if (constraints && !constraints->required.empty() &&
      static_cast<int>(constraints->required.size()) != sentence.size() + 1)
    throw DataError("arc constraints do not match the sentence length");
}

BeamItem beam_search(const Model& model, Scorer& scorer, const Sentence& sentence,
                     const ArcConstraints* constraints, int width) {
  std::vector<BeamItem> beam{BeamItem{initial_config(sentence), 0.0, {}, false}};
  while (!all_terminal(beam)) beam = expand(model, scorer, beam, constraints, width, nullptr);
  return std::move(beam.front());
}

}  // namespace

DecodeResult beam_decode(const Model& model, const Sentence& sentence, const ArcConstraints* constraints,
                         int beam_width) {
  const int width = beam_width > 0 ? beam_width : model.beam_width;
  if (width < 1) throw UsageError("beam width must be >= 1");
  check_constraints(constraints, sentence);
  const FeatureContext ctx(sentence, model.clusters(), model.labels);
  Scorer scorer(model, ctx);
  BeamItem best = beam_search(model, scorer, sentence, constraints, 1);
  for (int w = 2; w <= width; ++w) {
    BeamItem cand = beam_search(model, scorer, sentence, constraints, w);
    if (cand.score > best.score) best = std::move(cand);
  }
  return {config_to_tree(best.config, sentence, model.labels, model.fallback_label), best.score,
          best.history};
}

DecodeResult greedy_decode(const Model& model, const Sentence& sentence, const ArcConstraints* constraints) {
  check_constraints(constraints, sentence);
  const FeatureContext ctx(sentence, model.clusters(), model.labels);
  Scorer scorer(model, ctx);
  const int L = model.labels.size();
  Configuration c = initial_config(sentence);
  DecodeResult out;
  while (!c.terminal()) {
    const auto& s = scorer.scores(c);
    const auto actions = allowed_actions(c, L, constraints);
    Action best = actions.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& a : actions) {
      const double v = s[action_index(a, L)];
      if (v > best_score) {
        best_score = v;
        best = a;
      }
    }
    out.score += best_score;
    apply_in_place(c, best);
    out.actions.push_back(best);
  }
  out.tree = config_to_tree(c, sentence, model.labels, model.fallback_label);
  return out;
}

Treebank parse_treebank(const Model& model, const Treebank& treebank, int threads) {
  Treebank out;
  out.language = treebank.language;
  out.sentences.resize(treebank.sentences.size());
  const std::size_t n = treebank.sentences.size();
  auto parse_one = [&](std::size_t k) {
    out.sentences[k] = beam_decode(model, treebank.sentences[k]).tree;
  };
  if (threads <= 1 || n < 2) {
    for (std::size_t k = 0; k < n; ++k) parse_one(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> workers;
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t k = next++; k < n; k = next++) parse_one(k);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double score_sequence(const Model& model, const Sentence& sentence, std::span<const Action> actions) {
  const FeatureContext ctx(sentence, model.clusters(), model.labels);
  Scorer scorer(model, ctx);
  Configuration c = initial_config(sentence);
  double total = 0.0;
  for (const auto& a : actions) {
    total += scorer.scores(c)[action_index(a, model.labels.size())];
    c = apply(c, a);
  }
  return total;
}

FeatureCounts sequence_features(const Model& model, const FeatureContext& ctx, int num_tokens,
                                std::span<const Action> actions) {
  FeatureCounts counts;
  Configuration c = initial_config(num_tokens);
  std::vector<FeatureId> feats;
  const int L = model.labels.size();
  for (const auto& a : actions) {
    feats.clear();
    extract_features(ctx, c, model.templates, feats);
    const int idx = action_index(a, L);
    for (const auto& f : feats) counts[{f, idx}] += 1.0;
    apply_in_place(c, a);
  }
  return counts;
}

double perceptron_update(WeightVector& weights, const FeatureCounts& gold, const FeatureCounts& violator) {
  FeatureCounts delta = gold;
  for (const auto& [key, v] : violator) delta[key] -= v;
  double norm = 0.0;
  for (const auto& [key, d] : delta) {
    if (d == 0.0) continue;
    weights.update(key.first, key.second, d);
    norm += d * d;
  }
  return norm;
}

Model train(const Model& model_init, const Treebank& treebank, const TrainOptions& options, TrainStats* stats) {
  if (treebank.sentences.empty()) throw DataError("cannot train on an empty treebank");
  if (options.epochs < 0) throw UsageError("epochs must be >= 0");
  if (options.epochs == 0) return model_init;
  const int width = options.beam_width > 0 ? options.beam_width : model_init.beam_width;
  if (width < 1) throw UsageError("beam width must be >= 1");

  Model model = model_init;
  TrainStats st;
  struct Instance {
    const Sentence* sentence;
    std::vector<Action> gold;
  };
  std::vector<Instance> data;
  for (std::size_t k = 0; k < treebank.sentences.size(); ++k) {
    const auto& s = treebank.sentences[k];
    if (s.tokens.empty()) continue;
    if (!s.has_all_heads())
      throw DataError("training sentence " + std::to_string(k + 1) + " has missing heads");
    if (!is_valid_tree(s) || !is_projective(s)) {
      ++st.skipped_nonprojective;
      continue;
    }
    data.push_back({&s, oracle_sequence(s, model.labels)});
  }
  if (st.skipped_nonprojective > 0)
    log_info("train: skipped " + std::to_string(st.skipped_nonprojective) +
             " sentences without a single-root projective tree");
  if (data.empty()) throw DataError("no projective training trees");
  st.used = data.size();

  std::vector<FeatureContext> contexts;
  contexts.reserve(data.size());
  for (const auto& d : data) contexts.emplace_back(*d.sentence, model.clusters(), model.labels);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  const int L = model.labels.size();
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle_in_place(order, rng);
    for (std::size_t k : order) {
      const auto& inst = data[k];
      const auto& ctx = contexts[k];
      Scorer scorer(model, ctx);
      const std::size_t glen = inst.gold.size();
      std::vector<BeamItem> beam{BeamItem{initial_config(*inst.sentence), 0.0, {}, true}};
      Configuration gold_config = beam.front().config;
      double gold_score = 0.0;
      double max_violation = -std::numeric_limits<double>::infinity();
      std::vector<Action> violator;
      std::size_t gold_prefix = 0;
      for (std::size_t t = 0; !(all_terminal(beam) && t >= glen); ++t) {
        const Action* gold_next = t < glen ? &inst.gold[t] : nullptr;
        if (gold_next) {
          gold_score += scorer.scores(gold_config)[action_index(*gold_next, L)];
          apply_in_place(gold_config, *gold_next);
        }
        beam = expand(model, scorer, beam, nullptr, width, gold_next);
        const bool gold_in_beam = std::any_of(beam.begin(), beam.end(), [](const auto& i) { return i.gold; });
        if (!beam.front().gold) {
          const double v = beam.front().score - gold_score;
          if (options.early_update ? !gold_in_beam : v > max_violation) {
            max_violation = v;
            violator = beam.front().history;
            gold_prefix = std::min(t + 1, glen);
          }
        }
        if (options.early_update && !gold_in_beam) break;
      }
      if (!beam.front().gold && gold_prefix == 0) {
        // Early update with gold still in the beam: compare full sequences.
        violator = beam.front().history;
        gold_prefix = glen;
      }
      if (!beam.front().gold) {
        const auto gold_counts = sequence_features(
            model, ctx, inst.sentence->size(), std::span<const Action>(inst.gold.data(), gold_prefix));
        const auto viol_counts = sequence_features(model, ctx, inst.sentence->size(), violator);
        perceptron_update(model.weights, gold_counts, viol_counts);
        ++st.updates;
      }
      model.weights.tick();
    }
  }
  model.weights = model.weights.averaged();
  model.metadata["train.epochs"] = std::to_string(options.epochs);
  model.metadata["train.seed"] = std::to_string(options.seed);
  model.metadata["train.sentences"] = std::to_string(st.used);
  model.metadata["train.update"] = options.early_update ? "early" : "max-violation";
  if (stats) *stats = st;
  return model;
}

namespace {

constexpr char kMagic[4] = {'X', 'L', 'P', 'M'};
constexpr char kEndMagic[4] = {'E', 'N', 'D', '!'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw DataError("model file is truncated");
  }
  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 28)) throw DataError("model file is corrupt (string length)");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

 private:
  std::istream& in_;
};

void write_clustering(Writer& w, const Clustering* c) {
  w.u8(c ? 1 : 0);
  if (!c) return;
  const auto entries = c->sorted();
  w.u64(entries.size());
  for (const auto& [word, e] : entries) {
    w.str(word);
    w.str(e.bits);
    w.u64(static_cast<std::uint64_t>(e.count));
  }
}

std::shared_ptr<const Clustering> read_clustering(Reader& r) {
  if (r.u8() == 0) return nullptr;
  auto c = std::make_shared<Clustering>();
  const std::uint64_t n = r.u64();
  for (std::uint64_t k = 0; k < n; ++k) {
    std::string word = r.str();
    std::string bits = r.str();
    c->add(word, bits, static_cast<long>(r.u64()));
  }
  return c;
}

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  Writer w(out);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  const auto& table = feature_templates();
  w.u32(static_cast<std::uint32_t>(table.size()));
  for (const auto& t : table) {
    w.u32(static_cast<std::uint32_t>(t.id));
    w.u8(static_cast<std::uint8_t>(t.family));
    w.str(t.name);
  }
  w.str(model.templates.to_string());
  w.u32(static_cast<std::uint32_t>(model.beam_width));
  w.str(model.fallback_label);
  w.u32(static_cast<std::uint32_t>(model.labels.size()));
  for (const auto& l : model.labels.labels()) w.str(l);
  w.u32(static_cast<std::uint32_t>(model.cluster_refs.size()));
  for (const auto& c : model.cluster_refs) w.str(c);
  w.u32(static_cast<std::uint32_t>(model.metadata.size()));
  for (const auto& [k, v] : model.metadata) {
    w.str(k);
    w.str(v);
  }
  write_clustering(w, model.crosslingual.get());
  write_clustering(w, model.monolingual.get());

  const int outputs = model.weights.num_outputs();
  std::vector<std::pair<FeatureId, std::vector<double>>> rows;
  // A trained model holds its averaged weights as raw weights.
  model.weights.for_each_row([&](const FeatureId& f, std::span<const double> row) {
    if (std::any_of(row.begin(), row.end(), [](double x) { return x != 0.0; }))
      rows.emplace_back(f, std::vector<double>(row.begin(), row.end()));
  });
  w.u32(static_cast<std::uint32_t>(outputs));
  w.u64(rows.size());
  for (const auto& [f, row] : rows) {
    w.u32(f.template_id);
    w.u64(f.payload);
    for (double v : row) w.f64(v);
  }
  w.bytes(kEndMagic, 4);
  if (!out) throw Error("failed writing model");
}

Model load_model(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw DataError("not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw DataError("model version mismatch: file has " + std::to_string(version) + ", expected " +
                    std::to_string(kVersion));
  const auto& table = feature_templates();
  const std::uint32_t ntemplates = r.u32();
  if (ntemplates != table.size()) throw DataError("model template table does not match this build");
  for (std::uint32_t k = 0; k < ntemplates; ++k) {
    const std::uint32_t id = r.u32();
    const auto family = static_cast<Family>(r.u8());
    const std::string name = r.str();
    if (id != static_cast<std::uint32_t>(table[k].id) || family != table[k].family || name != table[k].name)
      throw DataError("model template table does not match this build (template " + std::to_string(k) + ")");
  }
  const TemplateSet templates = TemplateSet::parse(r.str());
  const int beam = static_cast<int>(r.u32());
  const std::string fallback = r.str();
  LabelAlphabet labels;
  const std::uint32_t nlabels = r.u32();
  for (std::uint32_t k = 0; k < nlabels; ++k) labels.add(r.str());
  Model model(labels, templates, beam);
  model.fallback_label = fallback;
  const std::uint32_t nrefs = r.u32();
  for (std::uint32_t k = 0; k < nrefs; ++k) model.cluster_refs.push_back(r.str());
  const std::uint32_t nmeta = r.u32();
  for (std::uint32_t k = 0; k < nmeta; ++k) {
    std::string key = r.str();
    model.metadata[key] = r.str();
  }
  model.crosslingual = read_clustering(r);
  model.monolingual = read_clustering(r);
  const std::uint32_t outputs = r.u32();
  if (static_cast<int>(outputs) != model.num_actions())
    throw DataError("model weight rows do not match the label alphabet");
  const std::uint64_t nrows = r.u64();
  for (std::uint64_t k = 0; k < nrows; ++k) {
    FeatureId f;
    f.template_id = r.u32();
    f.payload = r.u64();
    if (f.template_id >= table.size()) throw DataError("model file is corrupt (template id)");
    for (std::uint32_t a = 0; a < outputs; ++a) {
      const double v = r.f64();
      if (v != 0.0) model.weights.set(f, static_cast<int>(a), v);
    }
  }
  char end[4];
  r.bytes(end, 4);
  if (std::memcmp(end, kEndMagic, 4) != 0) throw DataError("model file is corrupt (bad trailer)");
  return model;
}

void save_model_file(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  save_model(out, model);
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path);
  return load_model(in);
}

}  // namespace xlparse
