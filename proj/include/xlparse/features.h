// Feature templates and extraction for the three feature families:
//   P  unlexicalized POS/structure templates,
//   C  cluster templates (cross-lingual prefixes replacing POS at S0/N0,
//      full cluster strings replacing words at S0/N0),
//   L  lexical templates over Token::lexform.
// The template inventory is frozen; docs/feature_templates.md lists it.

#ifndef XLPARSE_FEATURES_H_
#define XLPARSE_FEATURES_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xlparse/transition.h"
#include "xlparse/treebank.h"

namespace xlparse {

class Clustering;

enum class Family : std::uint8_t { kPos = 0, kCluster = 1, kLexical = 2 };

// Positions relative to a configuration. S = stack, N = buffer; h = head,
// l/r = leftmost/rightmost child, l2/r2 = second leftmost/rightmost.
enum class Slot : std::uint8_t {
  kS0, kS1, kS2, kN0, kN1, kN2, kN3,
  kS0h, kS0h2, kS0l, kS0l2, kS0r, kS0r2, kN0l, kN0l2
};

enum class Attr : std::uint8_t {
  kPos,    // UPOS
  kWord,   // lexform
  kLabel,  // label of the slot's own incoming arc
  kDist,   // N0 - S0, bucketed (slot ignored)
  kValR, kValL,  // number of right/left children
  kSetR, kSetL,  // label set of right/left children
  kX4, kX6, kXF,  // cross-lingual cluster of the surface form
  kCF,            // monolingual target cluster of the lexform
};

struct Atom {
  Slot slot;
  Attr attr;
  bool operator==(const Atom&) const = default;
};

struct FeatureTemplate {
  int id;
  Family family;
  std::vector<Atom> atoms;
  std::string name;
};

const std::vector<FeatureTemplate>& feature_templates();
// Half-open [begin, end) template-id range of a family. Ids are laid out
// P, then L, then C.
std::pair<int, int> family_range(Family f);
Family family_of(int template_id);

struct TemplateSet {
  bool pos = true;
  bool cluster = false;
  bool lexical = false;

  static TemplateSet delexicalized() { return {true, false, false}; }
  static TemplateSet full() { return {true, true, true}; }
  bool enabled(Family f) const;
  bool is_delexicalized() const { return pos && !cluster && !lexical; }
  std::string to_string() const;  // e.g. "P+C+L"
  static TemplateSet parse(const std::string& s);
  bool operator==(const TemplateSet&) const = default;
};

struct FeatureId {
  std::uint32_t template_id = 0;
  std::uint64_t payload = 0;
  bool operator==(const FeatureId&) const = default;
  auto operator<=>(const FeatureId&) const = default;
};

struct FeatureIdHash {
  std::size_t operator()(const FeatureId& f) const {
    return static_cast<std::size_t>(f.payload ^ (static_cast<std::uint64_t>(f.template_id) * 0x9e3779b97f4a7c15ULL));
  }
};

// The clusterings consulted by family C. Either may be null.
struct ClusterSet {
  const Clustering* crosslingual = nullptr;  // keyed on surface form
  const Clustering* monolingual = nullptr;   // keyed on lexform
};

// First min(level, len) bits. Throws on an empty bit-string or level < 1.
std::string cluster_prefix(const std::string& bits, int level);

// Per-sentence precomputed token attributes (index 0 is ROOT).
class FeatureContext {
 public:
  FeatureContext(const Sentence& sentence, const ClusterSet& clusters, const LabelAlphabet& labels);

  struct Value {
    std::uint64_t hash = 0;
    bool present = false;
  };
  struct TokenValues {
    Value pos, word, x4, x6, xf, cf;
  };
  struct TokenStrings {
    std::string pos, word, x4, x6, xf, cf;
  };

  int size() const { return static_cast<int>(values_.size()) - 1; }
  const TokenValues& values(int i) const { return values_[i]; }
  const TokenStrings& strings(int i) const { return strings_[i]; }
  std::uint64_t label_hash(int label) const;
  const std::string& label_name(int label) const;

 private:
  std::vector<TokenValues> values_;
  std::vector<TokenStrings> strings_;
  std::vector<std::uint64_t> label_hashes_;
  std::vector<std::string> label_names_;
};

// Appends the features of the enabled families to `out`. A template fires
// only when every slot it mentions exists and every value is available
// (absent lexforms and uncovered words contribute nothing).
void extract_features(const FeatureContext& ctx, const Configuration& c,
                      const TemplateSet& templates, std::vector<FeatureId>& out);
std::vector<FeatureId> extract_features(const FeatureContext& ctx, const Configuration& c,
                                        const TemplateSet& templates);

// Debug form: each feature paired with its readable instantiation, e.g.
// "S0p.N0p=NOUN|VERB". Same ids as extract_features, same order.
std::vector<std::pair<FeatureId, std::string>> describe_features(const FeatureContext& ctx,
                                                                 const Configuration& c,
                                                                 const TemplateSet& templates);

}  // namespace xlparse

#endif  // XLPARSE_FEATURES_H_
