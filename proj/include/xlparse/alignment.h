// Word alignment (IBM Model 1 with intersection), Pharaoh I/O, and
// extraction of translation lexicons t(w, i, j).

#ifndef XLPARSE_ALIGNMENT_H_
#define XLPARSE_ALIGNMENT_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xlparse/treebank.h"

namespace xlparse {

// (source index, target index), 0-based.
using Link = std::pair<int, int>;
using Links = std::set<Link>;

struct AlignedPair {
  std::vector<std::string> source;
  std::vector<std::string> target;
  Links links;
};

using ParallelCorpus = std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>;
using AlignedCorpus = std::vector<AlignedPair>;

// p(target word | source word), source vocabulary includes NULL.
class TranslationTable {
 public:
  static constexpr const char* kNull = "<NULL>";

  double prob(const std::string& target, const std::string& source) const;
  void set(const std::string& target, const std::string& source, double p);
  // Sum over target words of p(t | source).
  double total(const std::string& source) const;
  std::vector<std::string> sources() const;

  // Log-likelihood of the training corpus after each EM iteration,
  // measured with the parameters that iteration started from.
  std::vector<double> log_likelihood;

 private:
  std::unordered_map<std::string, std::unordered_map<std::string, double>> table_;  // source -> target -> p
};

// Standard EM for IBM Model 1 with a NULL source token; uniform init.
TranslationTable train_ibm1(const ParallelCorpus& corpus, int iterations);

enum class Direction { kSourceToTarget, kTargetToSource };

// kSourceToTarget: `table` is p(target|source); every target word links
// to its best source word. kTargetToSource: `table` is p(source|target);
// every source word links to its best target word. Links always come back
// in (source, target) orientation. NULL wins only when strictly better
// than every real word; real-word ties go to the position closest to the
// diagonal, then the lower index.
Links viterbi_align(const TranslationTable& table, const std::vector<std::string>& source,
                    const std::vector<std::string>& target, Direction direction);

Links intersect(const Links& forward, const Links& reverse);

// Trains both directions, Viterbi-aligns each pair and intersects.
AlignedCorpus align_corpus(const ParallelCorpus& corpus, int iterations);

// t(w, i, j): the most frequently aligned target word per source word.
class TranslationLexicon {
 public:
  TranslationLexicon() = default;
  TranslationLexicon(std::string src_lang, std::string tgt_lang)
      : src_lang_(std::move(src_lang)), tgt_lang_(std::move(tgt_lang)) {}

  const std::string& src_lang() const { return src_lang_; }
  const std::string& tgt_lang() const { return tgt_lang_; }

  void add_count(const std::string& src, const std::string& tgt, long count = 1);
  // Sets the best entry directly (used when reading a lexicon file).
  void set_best(const std::string& src, const std::string& tgt, long count);

  // Best translation; nullopt is NULL. Ties break to the lexicographically
  // smallest target word.
  std::optional<std::string> lookup(const std::string& word) const;
  long best_count(const std::string& word) const;
  std::size_t size() const { return best_.size(); }
  const std::map<std::string, std::map<std::string, long>>& counts() const { return counts_; }
  const std::map<std::string, std::pair<std::string, long>>& entries() const { return best_; }

 private:
  std::string src_lang_, tgt_lang_;
  std::map<std::string, std::map<std::string, long>> counts_;
  std::map<std::string, std::pair<std::string, long>> best_;
};

// Counts intersected links; pairs with more than max_len tokens on either
// side are skipped entirely.
TranslationLexicon extract_lexicon(const AlignedCorpus& corpus, const std::string& src_lang,
                                   const std::string& tgt_lang, int max_len = 100);
// Same corpus, roles swapped (links transposed).
TranslationLexicon extract_reverse_lexicon(const AlignedCorpus& corpus, const std::string& src_lang,
                                           const std::string& tgt_lang, int max_len = 100);

// Lexicon TSV: "# lexicon src=<a> tgt=<b>" header, then
// "src_word<TAB>tgt_word<TAB>count" lines.
void write_lexicon(std::ostream& out, const TranslationLexicon& lexicon);
TranslationLexicon read_lexicon(std::istream& in);

// Pharaoh: one line per pair, space-separated "i-j" links.
std::vector<Links> read_pharaoh(std::istream& in);
// Also checks line count and link bounds against the paired texts.
std::vector<Links> read_pharaoh(std::istream& in, const MonolingualCorpus& source,
                                const MonolingualCorpus& target);
void write_pharaoh(std::ostream& out, const std::vector<Links>& links);
void write_pharaoh_line(std::ostream& out, const Links& links);

}  // namespace xlparse

#endif  // XLPARSE_ALIGNMENT_H_
