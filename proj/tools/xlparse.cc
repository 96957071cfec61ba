// Command-line front end. Exit codes: 0 ok, 2 usage, 3 data, 4 internal.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xlparse/alignment.h"
#include "xlparse/clustering.h"
#include "xlparse/common.h"
#include "xlparse/evaluation.h"
#include "xlparse/parser.h"
#include "xlparse/pipeline.h"
#include "xlparse/synthetic.h"
#include "xlparse/transfer.h"

namespace {

using namespace xlparse;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

// Tokenized text, or the FORM column of a CoNLL-U file.
MonolingualCorpus read_text(const std::string& path, bool conllu) {
  if (!conllu) return read_tokenized_file(path);
  MonolingualCorpus out;
  for (const auto& s : read_conllu_file(path, "").sentences) {
    std::vector<std::string> f;
    for (const auto& t : s.tokens) f.push_back(t.form);
    out.push_back(std::move(f));
  }
  return out;
}

std::shared_ptr<const Clustering> load_clusters(const std::string& path) {
  if (path.empty()) return nullptr;
  auto in = open_in(path);
  return std::make_shared<Clustering>(read_clusters(in));
}

TranslationLexicon load_lexicon(const std::string& path) {
  auto in = open_in(path);
  return read_lexicon(in);
}

std::vector<int> parse_tiers(const std::string& s) {
  std::vector<int> tiers;
  for (const auto& p : split(s, ',')) {
    const std::string t(trim(p));
    if (t.empty()) continue;
    try {
      tiers.push_back(std::stoi(t));
    } catch (const std::exception&) {
      throw UsageError("bad tier '" + t + "'");
    }
  }
  validate_tiers(tiers);
  return tiers;
}

struct Cli {
  CLI::App app{"xlparse: cross-lingual dependency parser transfer toolkit"};
  bool quiet = false;

  // align
  std::string al_src, al_tgt, al_out;
  bool al_conllu = false;
  int al_iter = 10;
  // lexicon
  std::string lx_src, lx_tgt, lx_align, lx_src_lang, lx_tgt_lang, lx_out, lx_rev_out;
  bool lx_conllu = false;
  int lx_max_len = 100, lx_iter = 10;
  // codeswitch
  std::vector<std::string> cs_corpora, cs_lexicons;
  double cs_alpha = 0.3;
  std::uint64_t cs_seed = 1;
  std::string cs_out;
  // cluster
  std::string cl_corpus, cl_import, cl_out;
  int cl_k = 500, cl_min = 1;
  bool cl_exact = false, cl_lower = false, cl_digits = false;
  // lexicalize
  std::string lz_tb, lz_lang, lz_lex, lz_out;
  // project
  std::string pj_src, pj_tgt, pj_align, pj_out, pj_tiers = "100,90,80,70", pj_lang = "tgt";
  // select-sources
  std::string ss_wals, ss_target;
  int ss_threshold = 4;
  // train
  std::vector<std::string> tr_tbs;
  std::string tr_templates = "P", tr_xl, tr_mono, tr_model, tr_lang = "src";
  int tr_epochs = 3, tr_beam = 8;
  std::uint64_t tr_seed = 1;
  bool tr_early = false, tr_own = false;
  // parse
  std::string pa_model, pa_in, pa_out;
  int pa_threads = 1, pa_beam = 0;
  bool pa_own = false;
  // eval
  std::string ev_gold, ev_pred, ev_pred_b, ev_tsv;
  bool ev_punct = false, ev_chi2 = false, ev_labeled = false;
  // selftrain
  std::string st_model, st_corpus, st_xl, st_mono, st_out;
  int st_epochs = 3, st_beam = 8;
  std::uint64_t st_seed = 1;
  // pipeline
  std::string pl_config, pl_run_dir;
  std::vector<std::string> pl_set;
  int pl_threads = 1;
  // fixtures
  std::string fx_out;
  std::uint64_t fx_seed = 7;
  int fx_train = 500, fx_parallel = 500, fx_test = 200, fx_raw = 500, fx_mono = 2000;

  Cli() {
    app.require_subcommand(1);
    app.add_flag("-q,--quiet", quiet, "Suppress diagnostics");

    auto* al = app.add_subcommand("align", "IBM Model 1 alignment with intersection, Pharaoh output");
    al->add_option("--source", al_src, "Source text")->required();
    al->add_option("--target", al_tgt, "Target text")->required();
    al->add_flag("--conllu", al_conllu, "Inputs are CoNLL-U (FORM column)");
    al->add_option("--iterations", al_iter, "EM iterations")->capture_default_str();
    al->add_option("--out", al_out, "Pharaoh output")->required();

    auto* lx = app.add_subcommand("lexicon", "Extract t(w,i,j) from intersected alignments");
    lx->add_option("--source", lx_src, "Source text")->required();
    lx->add_option("--target", lx_tgt, "Target text")->required();
    lx->add_flag("--conllu", lx_conllu, "Inputs are CoNLL-U (FORM column)");
    lx->add_option("--align", lx_align, "Pharaoh links (default: run the built-in aligner)");
    lx->add_option("--iterations", lx_iter, "EM iterations for the built-in aligner")->capture_default_str();
    lx->add_option("--src-lang", lx_src_lang, "Source language code")->required();
    lx->add_option("--tgt-lang", lx_tgt_lang, "Target language code")->required();
    lx->add_option("--max-len", lx_max_len, "Skip pairs longer than this on either side")->capture_default_str();
    lx->add_option("--out", lx_out, "Lexicon TSV (source to target)")->required();
    lx->add_option("--reverse-out", lx_rev_out, "Lexicon TSV (target to source)");

    auto* cs = app.add_subcommand("codeswitch", "Build the code-switched multilingual corpus");
    cs->add_option("--corpus", cs_corpora, "lang=path, one per language")->required();
    cs->add_option("--lexicon", cs_lexicons, "Lexicon TSV for an ordered language pair")->required();
    cs->add_option("--alpha", cs_alpha, "Replacement probability")->capture_default_str();
    cs->add_option("--seed", cs_seed, "Random seed")->capture_default_str();
    cs->add_option("--out", cs_out, "Mixed corpus")->required();

    auto* cl = app.add_subcommand("cluster", "Brown clustering, or import an external cluster file");
    cl->add_option("--corpus", cl_corpus, "Tokenized corpus");
    cl->add_option("--import", cl_import, "External bitstring<TAB>word<TAB>count file");
    cl->add_option("--k", cl_k, "Number of clusters")->capture_default_str();
    cl->add_option("--min-count", cl_min, "Minimum word frequency")->capture_default_str();
    cl->add_flag("--exact", cl_exact, "Start from every type as a cluster");
    cl->add_flag("--lowercase", cl_lower, "Lowercase words");
    cl->add_flag("--normalize-digits", cl_digits, "Map digits to 0");
    cl->add_option("--out", cl_out, "Cluster file")->required();

    auto* lz = app.add_subcommand("lexicalize", "Attach target-language translations to a treebank");
    lz->add_option("--treebank", lz_tb, "Source CoNLL-U")->required();
    lz->add_option("--lang", lz_lang, "Treebank language")->required();
    lz->add_option("--lexicon", lz_lex, "Lexicon TSV into the target language")->required();
    lz->add_option("--out", lz_out, "Output CoNLL-U")->required();

    auto* pj = app.add_subcommand("project", "Project parsed source trees through alignments");
    pj->add_option("--source", pj_src, "Parsed source CoNLL-U")->required();
    pj->add_option("--target", pj_tgt, "POS-tagged target CoNLL-U")->required();
    pj->add_option("--align", pj_align, "Intersected Pharaoh links")->required();
    pj->add_option("--lang", pj_lang, "Target language")->capture_default_str();
    pj->add_option("--tiers", pj_tiers, "Density tiers")->capture_default_str();
    pj->add_option("--out", pj_out, "Partial trees (CoNLL-U)")->required();

    auto* ss = app.add_subcommand("select-sources", "WALS-based source selection");
    ss->add_option("--wals", ss_wals, "WALS CSV export")->required();
    ss->add_option("--target", ss_target, "Target language")->required();
    ss->add_option("--threshold", ss_threshold, "Minimum shared properties")->capture_default_str();

    auto* tr = app.add_subcommand("train", "Train a parser");
    tr->add_option("--treebank", tr_tbs, "Training CoNLL-U (repeatable)")->required();
    tr->add_option("--lang", tr_lang, "Language code")->capture_default_str();
    tr->add_option("--templates", tr_templates, "Feature families, e.g. P, P+C, P+C+L")->capture_default_str();
    tr->add_option("--clusters", tr_xl, "Cross-lingual cluster file");
    tr->add_option("--mono-clusters", tr_mono, "Monolingual target cluster file");
    tr->add_flag("--own-lexforms", tr_own, "Use each token's form as its lexical form");
    tr->add_option("--epochs", tr_epochs, "Epochs")->capture_default_str();
    tr->add_option("--beam", tr_beam, "Beam width")->capture_default_str();
    tr->add_option("--seed", tr_seed, "Shuffle seed")->capture_default_str();
    tr->add_flag("--early-update", tr_early, "Early update instead of max-violation");
    tr->add_option("--model", tr_model, "Output model")->required();

    auto* pa = app.add_subcommand("parse", "Parse a CoNLL-U file");
    pa->add_option("--model", pa_model, "Model file")->required();
    pa->add_option("--input", pa_in, "POS-tagged CoNLL-U")->required();
    pa->add_option("--out", pa_out, "Output CoNLL-U")->required();
    pa->add_option("--beam", pa_beam, "Override the model's beam width");
    pa->add_option("--threads", pa_threads, "Decoding threads")->capture_default_str();
    pa->add_flag("--own-lexforms", pa_own, "Use each token's form as its lexical form");

    auto* ev = app.add_subcommand("eval", "Attachment scores and McNemar's test");
    ev->add_option("--gold", ev_gold, "Gold CoNLL-U")->required();
    ev->add_option("--pred", ev_pred, "Predicted CoNLL-U")->required();
    ev->add_option("--pred-b", ev_pred_b, "Second prediction for McNemar's test");
    ev->add_flag("--exclude-punct", ev_punct, "Skip PUNCT tokens");
    ev->add_flag("--chi2", ev_chi2, "Chi-squared McNemar instead of exact");
    ev->add_flag("--labeled", ev_labeled, "McNemar on labeled correctness");
    ev->add_option("--tsv", ev_tsv, "Also write the TSV report here");

    auto* st = app.add_subcommand("selftrain", "Self-train from a delexicalized model");
    st->add_option("--model", st_model, "Delexicalized model")->required();
    st->add_option("--corpus", st_corpus, "POS-tagged target CoNLL-U")->required();
    st->add_option("--clusters", st_xl, "Cross-lingual cluster file");
    st->add_option("--mono-clusters", st_mono, "Monolingual target cluster file");
    st->add_option("--epochs", st_epochs, "Epochs")->capture_default_str();
    st->add_option("--beam", st_beam, "Beam width")->capture_default_str();
    st->add_option("--seed", st_seed, "Shuffle seed")->capture_default_str();
    st->add_option("--out", st_out, "Output model")->required();

    auto* pl = app.add_subcommand("pipeline", "Run a full recipe from a config file");
    pl->add_option("--config", pl_config, "Experiment config")->required();
    pl->add_option("--run-dir", pl_run_dir, "Run directory (default: $XLPARSE_RUN_ROOT/<name>)");
    pl->add_option("--set", pl_set, "key=value override (repeatable)");
    pl->add_option("--threads", pl_threads, "Decoding threads")->capture_default_str();

    auto* fx = app.add_subcommand("fixtures", "Write the synthetic two-language fixtures");
    fx->add_option("--out", fx_out, "Output directory")->required();
    fx->add_option("--seed", fx_seed, "Generator seed")->capture_default_str();
    fx->add_option("--train", fx_train, "Source treebank sentences")->capture_default_str();
    fx->add_option("--parallel", fx_parallel, "Parallel sentence pairs")->capture_default_str();
    fx->add_option("--test", fx_test, "Target test sentences")->capture_default_str();
    fx->add_option("--raw", fx_raw, "Target POS-tagged sentences")->capture_default_str();
    fx->add_option("--mono", fx_mono, "Monolingual sentences per language")->capture_default_str();

    app.add_subcommand("templates", "List the feature templates as TSV");
  }

  int run() {
    set_log_quiet(quiet);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "align") return align();
    if (cmd == "lexicon") return lexicon();
    if (cmd == "codeswitch") return codeswitch();
    if (cmd == "cluster") return cluster();
    if (cmd == "lexicalize") return lexicalize_cmd();
    if (cmd == "project") return project_cmd();
    if (cmd == "select-sources") return select_sources_cmd();
    if (cmd == "train") return train_cmd();
    if (cmd == "parse") return parse_cmd();
    if (cmd == "eval") return eval_cmd();
    if (cmd == "selftrain") return selftrain_cmd();
    if (cmd == "pipeline") return pipeline_cmd();
    if (cmd == "fixtures") return fixtures_cmd();
    if (cmd == "templates") return templates_cmd();
    throw UsageError("unknown subcommand " + cmd);
  }

  static ParallelCorpus pair_up(const MonolingualCorpus& s, const MonolingualCorpus& t) {
    if (s.size() != t.size())
      throw DataError("parallel texts differ in length: " + std::to_string(s.size()) + " vs " +
                      std::to_string(t.size()) + " sentences");
    ParallelCorpus pc;
    for (std::size_t k = 0; k < s.size(); ++k) pc.emplace_back(s[k], t[k]);
    return pc;
  }

  int align() {
    const auto pc = pair_up(read_text(al_src, al_conllu), read_text(al_tgt, al_conllu));
    const auto aligned = align_corpus(pc, al_iter);
    auto out = open_out(al_out);
    for (const auto& p : aligned) write_pharaoh_line(out, p.links);
    return 0;
  }

  int lexicon() {
    const auto src = read_text(lx_src, lx_conllu), tgt = read_text(lx_tgt, lx_conllu);
    AlignedCorpus aligned;
    if (lx_align.empty()) {
      aligned = align_corpus(pair_up(src, tgt), lx_iter);
    } else {
      auto in = open_in(lx_align);
      const auto links = read_pharaoh(in, src, tgt);
      for (std::size_t k = 0; k < links.size(); ++k) aligned.push_back({src[k], tgt[k], links[k]});
    }
    {
      auto out = open_out(lx_out);
      write_lexicon(out, extract_lexicon(aligned, lx_src_lang, lx_tgt_lang, lx_max_len));
    }
    if (!lx_rev_out.empty()) {
      auto out = open_out(lx_rev_out);
      write_lexicon(out, extract_reverse_lexicon(aligned, lx_src_lang, lx_tgt_lang, lx_max_len));
    }
    return 0;
  }

  int codeswitch() {
    CodeSwitchSpec spec;
    spec.alpha = cs_alpha;
    spec.seed = cs_seed;
    for (const auto& c : cs_corpora) {
      const auto eq = c.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--corpus expects lang=path, got '" + c + "'");
      spec.corpora.push_back({c.substr(0, eq), read_tokenized_file(c.substr(eq + 1))});
    }
    for (const auto& path : cs_lexicons) {
      auto lex = load_lexicon(path);
      spec.lexicons[{lex.src_lang(), lex.tgt_lang()}] = std::move(lex);
    }
    const auto res = generate_codeswitch(spec);
    auto out = open_out(cs_out);
    write_codeswitch_corpus(out, res, cs_seed, cs_alpha);
    log_info("codeswitch: " + std::to_string(res.replaced) + " of " + std::to_string(res.tokens) +
             " tokens replaced");
    return 0;
  }

  int cluster() {
    if (cl_corpus.empty() == cl_import.empty()) throw UsageError("cluster needs exactly one of --corpus or --import");
    Clustering c;
    if (!cl_import.empty()) {
      auto in = open_in(cl_import);
      c = read_clusters(in);
    } else {
      BrownOptions o;
      o.min_count = cl_min;
      o.exact = cl_exact;
      o.lowercase = cl_lower;
      o.normalize_digits = cl_digits;
      c = brown_cluster(read_tokenized_file(cl_corpus), cl_k, o);
    }
    auto out = open_out(cl_out);
    write_clusters(out, c);
    return 0;
  }

  int lexicalize_cmd() {
    const Treebank tb = read_conllu_file(lz_tb, lz_lang);
    write_conllu_file(lz_out, lexicalize(tb, load_lexicon(lz_lex)));
    return 0;
  }

  int project_cmd() {
    const auto tiers = parse_tiers(pj_tiers);
    const Treebank src = read_conllu_file(pj_src, "src");
    const Treebank tgt = read_conllu_file(pj_tgt, pj_lang);
    if (src.sentences.size() != tgt.sentences.size()) throw DataError("source and target differ in sentence count");
    auto in = open_in(pj_align);
    const auto links = read_pharaoh(in);
    if (links.size() != src.sentences.size()) throw DataError("alignment file does not match the sentence count");
    std::vector<PartialTree> trees;
    std::map<int, int> counts;
    int none = 0;
    for (std::size_t k = 0; k < src.sentences.size(); ++k) {
      trees.push_back(project(src.sentences[k], tgt.sentences[k], links[k]));
      if (auto t = assign_tier(trees.back(), tiers)) ++counts[*t];
      else ++none;
    }
    auto out = open_out(pj_out);
    write_partial_trees(out, trees);
    for (int t : tiers) std::cout << "tier " << t << '\t' << counts[t] << '\n';
    std::cout << "none\t" << none << '\n';
    return 0;
  }

  int select_sources_cmd() {
    auto in = open_in(ss_wals);
    const auto profiles = read_wals_csv(in);
    std::cout << join(select_sources(ss_target, profiles, ss_threshold), ",") << '\n';
    return 0;
  }

  int train_cmd() {
    Treebank data;
    data.language = tr_lang;
    for (const auto& p : tr_tbs) {
      Treebank tb = read_conllu_file(p, tr_lang);
      data.sentences.insert(data.sentences.end(), tb.sentences.begin(), tb.sentences.end());
    }
    if (tr_own) data = with_own_lexforms(std::move(data));
    const TemplateSet ts = TemplateSet::parse(tr_templates);
    if (!ts.lexical)
      for (auto& s : data.sentences)
        for (auto& t : s.tokens) t.lexform.reset();
    Model m(collect_labels(data), ts, tr_beam);
    m.crosslingual = load_clusters(tr_xl);
    m.monolingual = load_clusters(tr_mono);
    if (!tr_xl.empty()) m.cluster_refs.push_back("crosslingual=" + tr_xl);
    if (!tr_mono.empty()) m.cluster_refs.push_back("monolingual=" + tr_mono);
    TrainOptions o;
    o.epochs = tr_epochs;
    o.seed = tr_seed;
    o.beam_width = tr_beam;
    o.early_update = tr_early;
    TrainStats stats;
    m = train(m, data, o, &stats);
    save_model_file(tr_model, m);
    log_info("train: " + std::to_string(stats.used) + " sentences, " + std::to_string(stats.updates) + " updates");
    return 0;
  }

  int parse_cmd() {
    Model m = load_model_file(pa_model);
    if (pa_beam > 0) m.beam_width = pa_beam;
    Treebank in = read_conllu_file(pa_in, "");
    if (pa_own) in = with_own_lexforms(std::move(in));
    write_conllu_file(pa_out, parse_treebank(m, in, pa_threads));
    return 0;
  }

  int eval_cmd() {
    const Treebank gold = read_conllu_file(ev_gold, "");
    const Treebank pred = read_conllu_file(ev_pred, "");
    const auto report = evaluate(gold, pred, ev_punct);
    write_report_text(std::cout, report);
    if (!ev_tsv.empty()) {
      auto out = open_out(ev_tsv);
      write_report_tsv(out, report);
    }
    if (!ev_pred_b.empty()) {
      const Treebank b = read_conllu_file(ev_pred_b, "");
      const auto r = mcnemar(gold, pred, b, ev_labeled ? McNemarUnit::kLabeled : McNemarUnit::kHead, ev_punct, ev_chi2);
      std::cout << "\nmcnemar b=" << r.b << " c=" << r.c << " p=" << r.p_value << '\n';
    }
    return 0;
  }

  int selftrain_cmd() {
    const Model delex = load_model_file(st_model);
    const Treebank corpus = read_conllu_file(st_corpus, "");
    Model proto(delex.labels, TemplateSet::full(), st_beam);
    proto.crosslingual = load_clusters(st_xl);
    proto.monolingual = load_clusters(st_mono);
    TransferConfig cfg;
    cfg.epochs = st_epochs;
    cfg.beam_width = st_beam;
    cfg.seed = st_seed;
    save_model_file(st_out, self_train(delex, corpus, proto, cfg));
    return 0;
  }

  int pipeline_cmd() {
    ExperimentConfig cfg = ExperimentConfig::load(pl_config);
    for (const auto& kv : pl_set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      cfg.set(std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))),
              std::filesystem::current_path().string());
    }
    const std::string dir = resolve_run_dir(cfg, pl_run_dir);
    const auto res = run_pipeline(cfg, dir, pl_threads);
    std::cout << "run: " << res.run_dir << '\n';
    std::cout << "sources: " << join(res.sources, ",") << '\n';
    write_report_text(std::cout, res.report);
    return 0;
  }

  int fixtures_cmd() {
    WorldOptions o;
    o.seed = fx_seed;
    o.source_train = fx_train;
    o.parallel = fx_parallel;
    o.target_test = fx_test;
    o.target_raw = fx_raw;
    o.monolingual = fx_mono;
    write_world(make_world(o), fx_out);
    return 0;
  }

  int templates_cmd() {
    static const char* families[] = {"P", "C", "L"};
    std::cout << "id\tfamily\ttemplate\n";
    for (const auto& t : feature_templates())
      std::cout << t.id << '\t' << families[static_cast<int>(t.family)] << '\t' << t.name << '\n';
    return 0;
  }
};

void report_error(const char* kind, const std::string& msg) {
  std::string one_line = msg;
  for (auto& ch : one_line)
    if (ch == '\n' || ch == '\r') ch = ' ';
  std::cerr << "xlparse: error[" << kind << "]: " << one_line << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  try {
    cli.app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }
  try {
    return cli.run();
  } catch (const UsageError& e) {
    report_error("usage", e.what());
    return 2;
  } catch (const DataError& e) {
    report_error("data", e.what());
    return 3;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 4;
  }
}
