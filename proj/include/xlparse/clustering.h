// Hierarchical word clusterings: Brown clustering, the code-switched
// corpus generator used to make clusterings cross-lingual, and the
// "bitstring<TAB>word<TAB>count" file format.

#ifndef XLPARSE_CLUSTERING_H_
#define XLPARSE_CLUSTERING_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xlparse/alignment.h"
#include "xlparse/treebank.h"

namespace xlparse {

class Clustering {
 public:
  struct Entry {
    std::string bits;
    long count = 0;
    bool operator==(const Entry&) const = default;
  };

  void add(const std::string& word, const std::string& bits, long count);
  // Full bit-string path, or nullptr when the word has no cluster.
  const std::string* lookup(const std::string& word) const;
  // C(w, l): first min(l, len) bits.
  std::optional<std::string> lookup(const std::string& word, int level) const;

  std::size_t num_words() const { return words_.size(); }
  // Number of distinct leaf clusters.
  int num_clusters() const;
  const std::unordered_map<std::string, Entry>& words() const { return words_; }
  // Words sorted by (bits, word).
  std::vector<std::pair<std::string, Entry>> sorted() const;

  bool operator==(const Clustering& o) const { return words_ == o.words_; }

 private:
  std::unordered_map<std::string, Entry> words_;
};

void write_clusters(std::ostream& out, const Clustering& clustering);
Clustering read_clusters(std::istream& in);

struct BrownOptions {
  int min_count = 1;
  // Every type starts as its own cluster (O(V^2) memory); otherwise the
  // active window holds K+1 clusters.
  bool exact = false;
  bool lowercase = false;
  bool normalize_digits = false;
};

// One merge step, recorded when a trace is requested.
struct BrownMerge {
  std::vector<std::vector<std::string>> clusters_before;  // active clusters
  int left = -1, right = -1;  // indices into clusters_before
  double loss = 0.0;          // mutual information lost by the merge
};

Clustering brown_cluster(const MonolingualCorpus& corpus, int num_clusters,
                         const BrownOptions& options = {}, std::vector<BrownMerge>* trace = nullptr);

struct CodeSwitchInput {
  std::string language;
  MonolingualCorpus corpus;
};

struct CodeSwitchSpec {
  std::vector<CodeSwitchInput> corpora;
  // Keyed by (from, to) language codes; needed for every ordered pair.
  std::map<std::pair<std::string, std::string>, TranslationLexicon> lexicons;
  double alpha = 0.3;
  std::uint64_t seed = 1;
};

struct CodeSwitchResult {
  MonolingualCorpus corpus;
  std::size_t tokens = 0;
  std::size_t sampled = 0;   // draws with a < alpha
  std::size_t replaced = 0;  // sampled draws with a non-NULL translation
  std::map<std::string, std::size_t> replaced_into;  // by chosen language
};

// For every token of every corpus: draw a in [0,1); if a < alpha, draw a
// different language j uniformly and replace the token with its
// translation into j unless that is NULL. Corpora are concatenated in
// input order.
CodeSwitchResult generate_codeswitch(const CodeSwitchSpec& spec);

// Tokenized-text output with a "# seed=<s> alpha=<a>" header line.
void write_codeswitch_corpus(std::ostream& out, const CodeSwitchResult& result, std::uint64_t seed,
                             double alpha);

}  // namespace xlparse

#endif  // XLPARSE_CLUSTERING_H_
