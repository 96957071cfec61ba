// Beam-search arc-eager parser: the model, k-beam and greedy decoding,
// averaged structured-perceptron training with max-violation updates, and
// the binary model format.

#ifndef XLPARSE_PARSER_H_
#define XLPARSE_PARSER_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "xlparse/clustering.h"
#include "xlparse/features.h"
#include "xlparse/transition.h"
#include "xlparse/treebank.h"
#include "xlparse/weights.h"

namespace xlparse {

struct Model {
  WeightVector weights;
  TemplateSet templates;
  LabelAlphabet labels;
  // Clusterings consulted by family C; stored inside the model file.
  std::shared_ptr<const Clustering> crosslingual;
  std::shared_ptr<const Clustering> monolingual;
  std::vector<std::string> cluster_refs;  // where the clusterings came from
  int beam_width = 8;
  std::string fallback_label = "dep";
  std::map<std::string, std::string> metadata;

  Model() = default;
  Model(LabelAlphabet labels, TemplateSet templates, int beam_width = 8);

  ClusterSet clusters() const { return {crosslingual.get(), monolingual.get()}; }
  int num_actions() const { return xlparse::num_actions(labels.size()); }
};

struct DecodeResult {
  Sentence tree;
  double score = 0.0;
  std::vector<Action> actions;
};

// Beam search; beam_width <= 0 uses model.beam_width. Candidates are
// ranked by score, then action ordinal, then parent position in the beam.
// Returns the best final item over the searches at widths 1..beam_width
// (the narrowest on ties), so the score never drops as the beam widens.
DecodeResult beam_decode(const Model& model, const Sentence& sentence,
                         const ArcConstraints* constraints = nullptr, int beam_width = 0);
// Highest-scoring allowed action at every step, lowest ordinal on ties.
DecodeResult greedy_decode(const Model& model, const Sentence& sentence,
                           const ArcConstraints* constraints = nullptr);

// Decodes every sentence; threads > 1 splits sentences across workers
// sharing the read-only model. Output order matches input order.
Treebank parse_treebank(const Model& model, const Treebank& treebank, int threads = 1);

// Sum of per-step action scores for an action sequence from the initial
// configuration.
double score_sequence(const Model& model, const Sentence& sentence, std::span<const Action> actions);

// (feature, action index) occurrence counts along an action sequence.
using FeatureCounts = std::map<std::pair<FeatureId, int>, double>;
FeatureCounts sequence_features(const Model& model, const FeatureContext& ctx, int num_tokens,
                                std::span<const Action> actions);
// weights += gold - violator, at the current averaging time. Returns the
// squared norm of the difference.
double perceptron_update(WeightVector& weights, const FeatureCounts& gold, const FeatureCounts& violator);

struct TrainOptions {
  int epochs = 3;
  std::uint64_t seed = 1;
  int beam_width = 0;  // <= 0: model's beam width
  bool early_update = false;
};

struct TrainStats {
  std::size_t used = 0;
  std::size_t skipped_nonprojective = 0;
  std::size_t updates = 0;
};

// Averaged perceptron with max-violation (or early) updates. Sentences
// without a valid projective tree are skipped and counted. The returned
// model carries the averaged weights as its raw weights. epochs == 0
// returns model_init unchanged.
Model train(const Model& model_init, const Treebank& treebank, const TrainOptions& options = {},
            TrainStats* stats = nullptr);

// Versioned little-endian binary format.
void save_model(std::ostream& out, const Model& model);
Model load_model(std::istream& in);
void save_model_file(const std::string& path, const Model& model);
Model load_model_file(const std::string& path);

}  // namespace xlparse

#endif  // XLPARSE_PARSER_H_
