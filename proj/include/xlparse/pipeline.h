// Experiment configuration and the end-to-end transfer recipes.

#ifndef XLPARSE_PIPELINE_H_
#define XLPARSE_PIPELINE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xlparse/alignment.h"
#include "xlparse/clustering.h"
#include "xlparse/evaluation.h"
#include "xlparse/parser.h"
#include "xlparse/transfer.h"

namespace xlparse {

// Flat "key = value" text with '#' comments and "include = <path>" lines.
// Later assignments override earlier ones. Relative paths resolve against
// the directory of the file that set them.
class ExperimentConfig {
 public:
  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig parse(const std::string& text, const std::string& base_dir);

  void set(const std::string& key, const std::string& value, const std::string& base_dir = ".");
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key) const;  // throws UsageError when missing
  std::string get(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;  // comma-separated
  // Value resolved as a path.
  std::string path(const std::string& key) const;
  std::map<std::string, std::string> values() const;

 private:
  void load_into(const std::string& text, const std::string& base_dir, int depth);
  struct Entry {
    std::string value;
    std::string base_dir;
  };
  std::map<std::string, Entry> values_;
};

enum class Mode { kDelexBaseline, kDelexSelfTrain, kClusters, kLexicalized, kDensity };
Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

struct PipelineResult {
  std::string run_dir;
  EvalReport report;
  std::vector<std::string> sources;
};

// Run directory for a config: --run-dir wins, then $XLPARSE_RUN_ROOT/<name>,
// then runs/<name>.
std::string resolve_run_dir(const ExperimentConfig& config, const std::string& explicit_dir);

// Validates inputs for the mode, then runs it, writing every artifact and
// a manifest.json into run_dir.
PipelineResult run_pipeline(const ExperimentConfig& config, const std::string& run_dir, int threads = 1);

// Dictionaries from POS-tagged parallel treebanks via IBM Model 1 (or
// external Pharaoh links when `links` is non-empty).
AlignedCorpus align_treebanks(const Treebank& source, const Treebank& target, int iterations,
                              const std::vector<Links>* links = nullptr);

// Code-switch lexicons for every ordered pair of languages. Pairs without
// parallel data translate through the target language.
std::map<std::pair<std::string, std::string>, TranslationLexicon> complete_lexicons(
    const std::vector<std::string>& sources, const std::string& target,
    const std::map<std::string, TranslationLexicon>& to_target,
    const std::map<std::string, TranslationLexicon>& from_target);

}  // namespace xlparse

#endif  // XLPARSE_PIPELINE_H_
