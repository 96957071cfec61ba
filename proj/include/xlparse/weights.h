// Sparse weight vector with lazy (timestamped) averaging.
//
// Every feature owns a row of `num_outputs` entries, one per parser
// action; a single-output vector behaves like a plain feature→weight map.

#ifndef XLPARSE_WEIGHTS_H_
#define XLPARSE_WEIGHTS_H_

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "xlparse/features.h"

namespace xlparse {

class WeightVector {
 public:
  explicit WeightVector(int num_outputs = 1);

  int num_outputs() const { return num_outputs_; }
  std::size_t num_features() const { return keys_.size(); }

  // Averaging clock: the number of completed training instances.
  std::int64_t time() const { return time_; }
  void tick() { ++time_; }

  double weight(const FeatureId& f, int output, bool averaged = false) const;
  // Sets the raw weight, discarding averaging history for that entry.
  void set(const FeatureId& f, int output, double raw);
  // raw += delta at the current time.
  void update(const FeatureId& f, int output, double delta);

  double score(std::span<const FeatureId> features, int output, bool averaged = false) const;
  // out[a] = score for output a, for all outputs.
  void scores(std::span<const FeatureId> features, bool averaged, std::vector<double>& out) const;

  // Copy whose raw weights are the averages; clock and history reset.
  WeightVector averaged() const;

  // Rows in canonical (sorted FeatureId) order.
  void for_each_row(const std::function<void(const FeatureId&, std::span<const double>)>& fn,
                    bool averaged = false) const;

  bool operator==(const WeightVector& o) const;

 private:
  struct Entry {
    double raw = 0.0;
    double acc = 0.0;  // sum of raw values over completed instances up to ts
    std::int64_t ts = 0;
  };
  double averaged_value(const Entry& e) const;
  Entry* entry(const FeatureId& f, int output, bool create);
  const Entry* entry(const FeatureId& f, int output) const;

  int num_outputs_;
  std::int64_t time_ = 0;
  std::unordered_map<FeatureId, std::uint32_t, FeatureIdHash> index_;
  std::vector<FeatureId> keys_;
  std::vector<Entry> entries_;  // row-major, num_outputs_ per feature
};

// Sum of raw or averaged weights; unseen features contribute 0.
double score(const WeightVector& weights, std::span<const FeatureId> features, bool averaged = false);

}  // namespace xlparse

#endif  // XLPARSE_WEIGHTS_H_
