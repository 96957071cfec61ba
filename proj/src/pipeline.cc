#include "xlparse/pipeline.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "xlparse/common.h"

namespace xlparse {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 15];
  return s;
}

std::string file_digest(const std::string& path) { return hex64(hash_string(read_file(path))); }

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  ExperimentConfig c;
  const std::string dir = fs::absolute(path).parent_path().string();
  c.load_into(read_file(path), dir, 0);
  return c;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& base_dir) {
  ExperimentConfig c;
  c.load_into(text, base_dir, 0);
  return c;
}

void ExperimentConfig::load_into(const std::string& text, const std::string& base_dir, int depth) {
  if (depth > 16) throw UsageError("config includes nested too deeply");
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    if (key == "include") {
      fs::path p(value);
      if (p.is_relative()) p = fs::path(base_dir) / p;
      load_into(read_file(p.string()), p.parent_path().string(), depth + 1);
    } else {
      set(key, value, base_dir);
    }
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value, const std::string& base_dir) {
  values_[key] = Entry{value, base_dir};
}

std::string ExperimentConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("config is missing required key '" + key + "'");
  return it->second.value;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.value;
}

long ExperimentConfig::get_int(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') throw UsageError("config key '" + key + "' needs an integer, got '" + v + "'");
  return x;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw UsageError("config key '" + key + "' needs a number, got '" + v + "'");
  return x;
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("config key '" + key + "' needs true/false, got '" + v + "'");
}

std::vector<std::string> ExperimentConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  if (!has(key)) return out;
  for (const auto& part : split(get(key), ',')) {
    const std::string p(trim(part));
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

std::string ExperimentConfig::path(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("config is missing required key '" + key + "'");
  fs::path p(it->second.value);
  if (p.is_relative()) p = fs::path(it->second.base_dir) / p;
  return p.lexically_normal().string();
}

std::map<std::string, std::string> ExperimentConfig::values() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, e] : values_) out[k] = e.value;
  return out;
}

Mode parse_mode(const std::string& s) {
  if (s == "delex-baseline") return Mode::kDelexBaseline;
  if (s == "delex+selftrain") return Mode::kDelexSelfTrain;
  if (s == "clusters") return Mode::kClusters;
  if (s == "lexicalized") return Mode::kLexicalized;
  if (s == "density") return Mode::kDensity;
  throw UsageError("unknown mode '" + s + "' (expected delex-baseline, delex+selftrain, clusters, lexicalized, density)");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kDelexBaseline: return "delex-baseline";
    case Mode::kDelexSelfTrain: return "delex+selftrain";
    case Mode::kClusters: return "clusters";
    case Mode::kLexicalized: return "lexicalized";
    case Mode::kDensity: return "density";
  }
  return "?";
}

std::string resolve_run_dir(const ExperimentConfig& config, const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  const std::string name = config.get("name", config.get("mode", "run"));
  if (const char* root = std::getenv("XLPARSE_RUN_ROOT"); root && *root) return (fs::path(root) / name).string();
  return (fs::path("runs") / name).string();
}

AlignedCorpus align_treebanks(const Treebank& source, const Treebank& target, int iterations,
                              const std::vector<Links>* links) {
  if (source.sentences.size() != target.sentences.size())
    throw DataError("parallel treebanks differ in length: " + std::to_string(source.sentences.size()) + " vs " +
                    std::to_string(target.sentences.size()));
  ParallelCorpus corpus;
  for (std::size_t k = 0; k < source.sentences.size(); ++k) {
    std::vector<std::string> s, t;
    for (const auto& tok : source.sentences[k].tokens) s.push_back(tok.form);
    for (const auto& tok : target.sentences[k].tokens) t.push_back(tok.form);
    corpus.emplace_back(std::move(s), std::move(t));
  }
  if (!links) return align_corpus(corpus, iterations);
  if (links->size() != corpus.size())
    throw DataError("alignment file has " + std::to_string(links->size()) + " lines for " +
                    std::to_string(corpus.size()) + " sentence pairs");
  AlignedCorpus out;
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    AlignedPair p{corpus[k].first, corpus[k].second, (*links)[k]};
    for (const auto& [i, j] : p.links)
      if (i >= static_cast<int>(p.source.size()) || j >= static_cast<int>(p.target.size()))
        throw DataError("alignment line " + std::to_string(k + 1) + ": link out of bounds");
    out.push_back(std::move(p));
  }
  return out;
}

std::map<std::pair<std::string, std::string>, TranslationLexicon> complete_lexicons(
    const std::vector<std::string>& sources, const std::string& target,
    const std::map<std::string, TranslationLexicon>& to_target,
    const std::map<std::string, TranslationLexicon>& from_target) {
  std::map<std::pair<std::string, std::string>, TranslationLexicon> out;
  for (const auto& s : sources) {
    out[{s, target}] = to_target.at(s);
    out[{target, s}] = from_target.at(s);
  }
  for (const auto& a : sources)
    for (const auto& b : sources) {
      if (a == b) continue;
      TranslationLexicon pivot(a, b);
      const auto& ab = to_target.at(a);
      const auto& tb = from_target.at(b);
      for (const auto& [w, best] : ab.entries())
        if (auto t = tb.lookup(best.first)) pivot.set_best(w, *t, std::min(best.second, tb.best_count(best.first)));
      out[{a, b}] = std::move(pivot);
    }
  return out;
}

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  long ms() const {
    return static_cast<long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count());
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

Treebank concat(const std::vector<Treebank>& parts, const std::string& language) {
  Treebank out;
  out.language = language;
  for (const auto& p : parts) out.sentences.insert(out.sentences.end(), p.sentences.begin(), p.sentences.end());
  return out;
}

class Runner {
 public:
  Runner(const ExperimentConfig& config, std::string run_dir, int threads)
      : cfg_(config), dir_(std::move(run_dir)), threads_(threads) {}

  PipelineResult run() {
    mode_ = parse_mode(cfg_.get("mode"));
    target_ = cfg_.get("target");
    tcfg_.epochs = static_cast<int>(cfg_.get_int("epochs", 3));
    tcfg_.beam_width = static_cast<int>(cfg_.get_int("beam", 8));
    tcfg_.seed = static_cast<std::uint64_t>(cfg_.get_int("seed", 1));
    tcfg_.alpha = cfg_.get_double("alpha", 0.3);
    tcfg_.wals_threshold = static_cast<int>(cfg_.get_int("wals_threshold", 4));
    if (cfg_.has("tiers")) {
      tcfg_.tiers.clear();
      for (const auto& t : cfg_.get_list("tiers")) tcfg_.tiers.push_back(std::stoi(t));
    }
    validate_tiers(tcfg_.tiers);
    if (tcfg_.epochs < 1) throw UsageError("epochs must be >= 1");
    if (tcfg_.beam_width < 1) throw UsageError("beam must be >= 1");
    if (tcfg_.alpha < 0.0 || tcfg_.alpha > 1.0) throw UsageError("alpha must lie in [0, 1]");
    select_languages();
    validate_inputs();

    fs::create_directories(dir_);
    Stopwatch total;
    load_treebanks();
    Model model;
    switch (mode_) {
      case Mode::kDelexBaseline:
        model = train_delex();
        break;
      case Mode::kDelexSelfTrain:
        model = self_train_stage(train_delex());
        break;
      case Mode::kClusters:
        model = train_clusters();
        break;
      case Mode::kLexicalized:
        model = train_lexicalized();
        break;
      case Mode::kDensity:
        model = train_density();
        break;
    }
    if (cfg_.get_bool("selftrain", false) && mode_ != Mode::kDelexSelfTrain && mode_ != Mode::kDensity)
      model = self_train_stage(model);
    model.metadata["mode"] = to_string(mode_);
    model.metadata["target"] = target_;
    model.metadata["sources"] = join(sources_, ",");
    save_model_file(artifact("model.bin"), model);

    Stopwatch t;
    Treebank test = with_own_lexforms(read_conllu_file(cfg_.path("test"), target_));
    Treebank parsed = parse_treebank(model, test, threads_);
    write_conllu_file(artifact("parse.conllu"), parsed);
    PipelineResult res;
    res.report = evaluate(test, parsed, cfg_.get_bool("exclude_punct", false));
    {
      std::ofstream out(artifact("report.txt"));
      write_report_text(out, res.report);
    }
    {
      std::ofstream out(artifact("report.tsv"));
      write_report_tsv(out, res.report);
    }
    timings_["parse+eval"] = t.ms();
    timings_["total"] = total.ms();
    write_manifest();
    res.run_dir = dir_;
    res.sources = sources_;
    return res;
  }

 private:
  std::string artifact(const std::string& name) {
    artifacts_.insert(name);
    return (fs::path(dir_) / name).string();
  }

  void select_languages() {
    sources_ = cfg_.get_list("sources");
    if (cfg_.has("wals")) {
      std::ifstream in(cfg_.path("wals"));
      if (!in) throw DataError("cannot open " + cfg_.path("wals"));
      const auto profiles = read_wals_csv(in);
      auto selected = select_sources(target_, profiles, tcfg_.wals_threshold);
      std::vector<std::string> keep;
      for (const auto& s : selected)
        if (cfg_.has("treebank." + s) && (sources_.empty() || std::count(sources_.begin(), sources_.end(), s)))
          keep.push_back(s);
      sources_ = keep;
      log_info("WALS selection for " + target_ + ": " + join(sources_, ","));
    }
    if (sources_.empty()) throw UsageError("no source languages (set 'sources' or provide a WALS selection)");
    for (const auto& s : sources_)
      if (s == target_) throw UsageError("target language '" + target_ + "' is also listed as a source");
  }

  void require_file(const std::string& key) {
    const std::string p = cfg_.path(key);
    if (!fs::exists(p)) throw DataError("input for '" + key + "' not found: " + p);
    inputs_[key] = p;
  }

  void validate_inputs() {
    require_file("test");
    for (const auto& s : sources_) require_file("treebank." + s);
    const bool needs_dict = mode_ == Mode::kLexicalized || mode_ == Mode::kDensity ||
                            (mode_ == Mode::kClusters && !cfg_.has("clusters.crosslingual"));
    if (mode_ == Mode::kDelexSelfTrain || cfg_.get_bool("selftrain", false)) require_file("raw");
    if (needs_dict || mode_ == Mode::kDensity) {
      for (const auto& s : sources_) {
        require_file("parallel." + s + ".source");
        require_file("parallel." + s + ".target");
        if (cfg_.has("parallel." + s + ".align")) require_file("parallel." + s + ".align");
      }
    }
    if (mode_ == Mode::kClusters || mode_ == Mode::kLexicalized || mode_ == Mode::kDensity) {
      if (cfg_.has("clusters.crosslingual")) {
        require_file("clusters.crosslingual");
      } else {
        for (const auto& s : sources_) require_file("mono." + s);
        require_file("mono." + target_);
      }
    }
    if (mode_ == Mode::kLexicalized || mode_ == Mode::kDensity) {
      if (cfg_.has("clusters.monolingual")) require_file("clusters.monolingual");
      else require_file("mono." + target_);
    }
  }

  void load_treebanks() {
    for (const auto& s : sources_) treebanks_[s] = read_conllu_file(cfg_.path("treebank." + s), s);
    Treebank all = concat(values(treebanks_), "mixed");
    labels_ = collect_labels(all);
  }

  static std::vector<Treebank> values(const std::map<std::string, Treebank>& m) {
    std::vector<Treebank> out;
    for (const auto& [k, v] : m) out.push_back(v);
    return out;
  }

  TrainOptions train_options() const {
    TrainOptions o;
    o.epochs = tcfg_.epochs;
    o.seed = tcfg_.seed;
    o.beam_width = tcfg_.beam_width;
    return o;
  }

  Model train_delex() {
    Stopwatch t;
    Treebank data = concat(values(treebanks_), "mixed");
    for (auto& s : data.sentences)
      for (auto& tok : s.tokens) tok.lexform.reset();
    Model m = train(Model(labels_, TemplateSet::delexicalized(), tcfg_.beam_width), data, train_options());
    timings_["train.delex"] = t.ms();
    return m;
  }

  Model self_train_stage(const Model& base) {
    Stopwatch t;
    Treebank raw = read_conllu_file(cfg_.path("raw"), target_);
    Model proto(base.labels, TemplateSet::full(), tcfg_.beam_width);
    proto.crosslingual = base.crosslingual;
    proto.monolingual = base.monolingual;
    proto.cluster_refs = base.cluster_refs;
    Model m = self_train(base, raw, proto, tcfg_);
    timings_["selftrain"] = t.ms();
    return m;
  }

  void build_dictionaries() {
    if (!to_target_.empty()) return;
    Stopwatch t;
    const int iterations = static_cast<int>(cfg_.get_int("align.iterations", 10));
    const int max_len = static_cast<int>(cfg_.get_int("max_len", 100));
    for (const auto& s : sources_) {
      Treebank src = read_conllu_file(cfg_.path("parallel." + s + ".source"), s);
      Treebank tgt = read_conllu_file(cfg_.path("parallel." + s + ".target"), target_);
      std::vector<Links> ext;
      const bool external = cfg_.has("parallel." + s + ".align");
      if (external) {
        std::ifstream in(cfg_.path("parallel." + s + ".align"));
        ext = read_pharaoh(in);
      }
      AlignedCorpus aligned = align_treebanks(src, tgt, iterations, external ? &ext : nullptr);
      {
        std::ofstream out(artifact("align." + s + "-" + target_ + ".pharaoh"));
        for (const auto& p : aligned) write_pharaoh_line(out, p.links);
      }
      to_target_[s] = extract_lexicon(aligned, s, target_, max_len);
      from_target_[s] = extract_reverse_lexicon(aligned, s, target_, max_len);
      {
        std::ofstream out(artifact("lexicon." + s + "-" + target_ + ".tsv"));
        write_lexicon(out, to_target_[s]);
      }
      {
        std::ofstream out(artifact("lexicon." + target_ + "-" + s + ".tsv"));
        write_lexicon(out, from_target_[s]);
      }
      parallel_[s] = {std::move(src), std::move(tgt)};
      aligned_[s] = std::move(aligned);
    }
    timings_["align"] = t.ms();
  }

  BrownOptions brown_options() const {
    BrownOptions o;
    o.min_count = static_cast<int>(cfg_.get_int("clusters.min_count", 1));
    o.exact = cfg_.get_bool("clusters.exact", false);
    return o;
  }

  std::shared_ptr<const Clustering> crosslingual_clusters() {
    if (crosslingual_) return crosslingual_;
    Stopwatch t;
    if (cfg_.has("clusters.crosslingual")) {
      std::ifstream in(cfg_.path("clusters.crosslingual"));
      crosslingual_ = std::make_shared<Clustering>(read_clusters(in));
      cluster_refs_.push_back("crosslingual=" + cfg_.path("clusters.crosslingual"));
    } else {
      build_dictionaries();
      CodeSwitchSpec spec;
      for (const auto& s : sources_) spec.corpora.push_back({s, read_tokenized_file(cfg_.path("mono." + s))});
      spec.corpora.push_back({target_, read_tokenized_file(cfg_.path("mono." + target_))});
      spec.lexicons = complete_lexicons(sources_, target_, to_target_, from_target_);
      spec.alpha = tcfg_.alpha;
      spec.seed = static_cast<std::uint64_t>(cfg_.get_int("codeswitch.seed", static_cast<long>(tcfg_.seed)));
      CodeSwitchResult mixed = generate_codeswitch(spec);
      {
        std::ofstream out(artifact("codeswitch.txt"));
        write_codeswitch_corpus(out, mixed, spec.seed, spec.alpha);
      }
      auto c = std::make_shared<Clustering>(
          brown_cluster(mixed.corpus, static_cast<int>(cfg_.get_int("clusters.k", 500)), brown_options()));
      {
        std::ofstream out(artifact("clusters.crosslingual.txt"));
        write_clusters(out, *c);
      }
      crosslingual_ = c;
      cluster_refs_.push_back("crosslingual=clusters.crosslingual.txt");
    }
    timings_["clusters.crosslingual"] = t.ms();
    return crosslingual_;
  }

  std::shared_ptr<const Clustering> monolingual_clusters() {
    if (monolingual_) return monolingual_;
    Stopwatch t;
    if (cfg_.has("clusters.monolingual")) {
      std::ifstream in(cfg_.path("clusters.monolingual"));
      monolingual_ = std::make_shared<Clustering>(read_clusters(in));
      cluster_refs_.push_back("monolingual=" + cfg_.path("clusters.monolingual"));
    } else {
      auto c = std::make_shared<Clustering>(brown_cluster(read_tokenized_file(cfg_.path("mono." + target_)),
                                                          static_cast<int>(cfg_.get_int("clusters.k", 500)),
                                                          brown_options()));
      {
        std::ofstream out(artifact("clusters.monolingual.txt"));
        write_clusters(out, *c);
      }
      monolingual_ = c;
      cluster_refs_.push_back("monolingual=clusters.monolingual.txt");
    }
    timings_["clusters.monolingual"] = t.ms();
    return monolingual_;
  }

  Model prototype(TemplateSet templates, bool with_monolingual) {
    Model m(labels_, templates, tcfg_.beam_width);
    m.crosslingual = crosslingual_clusters();
    if (with_monolingual) m.monolingual = monolingual_clusters();
    m.cluster_refs = cluster_refs_;
    return m;
  }

  Model train_clusters() {
    Model proto = prototype(TemplateSet{true, true, false}, false);
    Stopwatch t;
    Treebank data = concat(values(treebanks_), "mixed");
    for (auto& s : data.sentences)
      for (auto& tok : s.tokens) tok.lexform.reset();
    Model m = train(proto, data, train_options());
    timings_["train.clusters"] = t.ms();
    return m;
  }

  Treebank lexicalized_sources() {
    build_dictionaries();
    std::vector<Treebank> parts;
    for (const auto& [s, tb] : treebanks_) {
      Treebank lex = lexicalize(tb, to_target_.at(s));
      write_conllu_file(artifact("lexicalized." + s + ".conllu"), lex);
      parts.push_back(std::move(lex));
    }
    return concat(parts, "mixed");
  }

  Model train_lexicalized() {
    Model proto = prototype(TemplateSet::full(), true);
    Treebank data = lexicalized_sources();
    Stopwatch t;
    Model m = train(proto, data, train_options());
    timings_["train.lexicalized"] = t.ms();
    return m;
  }

  Model train_density() {
    Model proto = prototype(TemplateSet::full(), true);
    Treebank seed = lexicalized_sources();
    Stopwatch t;
    std::vector<PartialTree> projected;
    for (const auto& s : sources_) {
      // Supervised source parser; source tokens are their own lexforms.
      Model sp = train(source_prototype(s), with_own_lexforms(treebanks_.at(s)), train_options());
      const auto& [src, tgt] = parallel_.at(s);
      Treebank parsed = parse_treebank(sp, with_own_lexforms(src), threads_);
      std::vector<PartialTree> trees;
      for (std::size_t k = 0; k < parsed.sentences.size(); ++k)
        trees.push_back(project(parsed.sentences[k], with_own_lexforms(tgt.sentences[k]), aligned_.at(s)[k].links));
      {
        std::ofstream out(artifact("projected." + s + "-" + target_ + ".conllu"));
        write_partial_trees(out, trees);
      }
      projected.insert(projected.end(), trees.begin(), trees.end());
    }
    timings_["project"] = t.ms();
    Stopwatch t2;
    const TieredTrees tiered = bucket_by_tier(projected, tcfg_.tiers);
    std::vector<DensityStage> stages;
    Model m = density_train(proto, seed, tiered, tcfg_, &stages);
    for (const auto& st : stages)
      m.metadata["density.tier" + std::to_string(st.tier)] =
          std::to_string(st.added) + " added, pool " + std::to_string(st.pool_size);
    timings_["train.density"] = t2.ms();
    return m;
  }

  Model source_prototype(const std::string& s) {
    Model m(collect_labels(treebanks_.at(s)), TemplateSet::full(), tcfg_.beam_width);
    m.crosslingual = crosslingual_clusters();
    return m;
  }

  void write_manifest() {
    nlohmann::ordered_json j;
    j["tool"] = "xlparse";
#ifdef XLPARSE_VERSION
    j["version"] = XLPARSE_VERSION;
#endif
    j["mode"] = to_string(mode_);
    j["target"] = target_;
    j["sources"] = sources_;
    j["config"] = cfg_.values();
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [k, p] : inputs_) inputs[k] = {{"path", p}, {"fnv1a64", file_digest(p)}};
    j["inputs"] = inputs;
    j["seeds"] = {{"train", tcfg_.seed},
                  {"codeswitch", cfg_.get_int("codeswitch.seed", static_cast<long>(tcfg_.seed))}};
    nlohmann::ordered_json arts = nlohmann::ordered_json::object();
    for (const auto& a : artifacts_) arts[a] = file_digest((fs::path(dir_) / a).string());
    j["artifacts"] = arts;
    j["timings_ms"] = timings_;
    std::ofstream out((fs::path(dir_) / "manifest.json").string());
    out << j.dump(2) << '\n';
  }

  const ExperimentConfig& cfg_;
  std::string dir_;
  int threads_;
  Mode mode_ = Mode::kDelexBaseline;
  std::string target_;
  TransferConfig tcfg_;
  std::vector<std::string> sources_;
  std::map<std::string, std::string> inputs_;
  std::set<std::string> artifacts_;
  std::map<std::string, long> timings_;
  std::map<std::string, Treebank> treebanks_;
  LabelAlphabet labels_;
  std::map<std::string, TranslationLexicon> to_target_, from_target_;
  std::map<std::string, std::pair<Treebank, Treebank>> parallel_;
  std::map<std::string, AlignedCorpus> aligned_;
  std::shared_ptr<const Clustering> crosslingual_, monolingual_;
  std::vector<std::string> cluster_refs_;
};

}  // namespace

PipelineResult run_pipeline(const ExperimentConfig& config, const std::string& run_dir, int threads) {
  Runner r(config, run_dir, threads);
  return r.run();
}

}  // namespace xlparse
