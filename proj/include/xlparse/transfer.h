// Cross-lingual transfer: WALS-based source selection, treebank
// lexicalization, annotation projection with density tiers, the
// density-driven iterative trainer and self-training.

#ifndef XLPARSE_TRANSFER_H_
#define XLPARSE_TRANSFER_H_

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xlparse/alignment.h"
#include "xlparse/parser.h"
#include "xlparse/treebank.h"

namespace xlparse {

inline const std::array<std::string, 6> kWalsFeatures = {"82A", "83A", "85A", "86A", "87A", "88A"};

struct WalsProfile {
  std::string language;
  std::map<std::string, std::string> values;  // feature id -> value; absent = unknown
};

// CSV with a header naming "lang" (or "language") and the six feature
// columns, in any order. Empty, "_" and "NA" cells are absent values.
std::map<std::string, WalsProfile> read_wals_csv(std::istream& in);

// Features present on both sides with equal values.
int wals_matches(const WalsProfile& a, const WalsProfile& b);

// Candidates sharing at least `threshold` features with the target,
// sorted by code. Throws DataError when the target has no profile.
std::vector<std::string> select_sources(const std::string& target,
                                        const std::map<std::string, WalsProfile>& profiles, int threshold);

// Sets every token's lexform to t(form) (absent for NULL). Throws when the
// lexicon's source language differs from the treebank's.
Treebank lexicalize(const Treebank& treebank, const TranslationLexicon& lexicon_to_target);

// Transfers source arcs through intersected links ((source, target),
// 0-based). Labels travel with arcs. Only one projected root is kept.
// Throws DataError("alignments not intersected") for non-injective links.
PartialTree project(const Sentence& source, const Sentence& target, const Links& links);

using TierSchedule = std::vector<int>;
inline TierSchedule default_tiers() { return {100, 90, 80, 70}; }
// Throws UsageError unless tiers are strictly decreasing within (0, 100].
void validate_tiers(const TierSchedule& tiers);
// Highest tier met; tier 100 requires a full projective tree.
std::optional<int> assign_tier(const PartialTree& tree, const TierSchedule& tiers);

using TieredTrees = std::map<int, std::vector<PartialTree>, std::greater<int>>;
TieredTrees bucket_by_tier(const std::vector<PartialTree>& trees, const TierSchedule& tiers);

struct TransferConfig {
  int wals_threshold = 4;
  TierSchedule tiers = default_tiers();
  int epochs = 3;
  int beam_width = 8;
  double alpha = 0.3;
  std::uint64_t seed = 1;
};

struct DensityStage {
  int tier = 100;
  std::size_t added = 0;      // trees added to the pool at this stage
  std::size_t pool_size = 0;  // training pool after the stage
};

// Stage 0 trains on seed_trees plus tier-100 trees; every later tier is
// completed by constrained beam decoding with the current model, added to
// the pool, and a fresh model is trained on the whole pool. `prototype`
// supplies templates, clusterings and beam width; labels are collected
// from all inputs.
Model density_train(const Model& prototype, const Treebank& seed_trees, const TieredTrees& tiered,
                    const TransferConfig& config, std::vector<DensityStage>* trace = nullptr);

// Parses the POS-tagged target corpus with delex_model and trains a fresh
// model (prototype's templates and clusterings) on the output. Target
// tokens serve as their own lexforms.
Model self_train(const Model& delex_model, const Treebank& target_corpus, const Model& prototype,
                 const TransferConfig& config);

// CoNLL-U with "_" heads for unattached tokens and a
// "# density=<a>/<n>" comment per sentence.
void write_partial_trees(std::ostream& out, const std::vector<PartialTree>& trees);
std::vector<PartialTree> read_partial_trees(std::istream& in, const std::string& language);

}  // namespace xlparse

#endif  // XLPARSE_TRANSFER_H_
