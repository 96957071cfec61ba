#include "xlparse/weights.h"

#include <algorithm>
#include <numeric>

#include "xlparse/common.h"

namespace xlparse {

WeightVector::WeightVector(int num_outputs) : num_outputs_(num_outputs) {
  if (num_outputs < 1) throw Error("weight vector needs at least one output");
}

double WeightVector::averaged_value(const Entry& e) const {
  if (time_ == 0) return e.raw;
  const double total = e.acc + e.raw * static_cast<double>(time_ - e.ts);
  return total / static_cast<double>(time_);
}

WeightVector::Entry* WeightVector::entry(const FeatureId& f, int output, bool create) {
  auto it = index_.find(f);
  if (it == index_.end()) {
    if (!create) return nullptr;
    const auto row = static_cast<std::uint32_t>(keys_.size());
    it = index_.emplace(f, row).first;
    keys_.push_back(f);
    entries_.resize(entries_.size() + num_outputs_);
  }
  return &entries_[static_cast<std::size_t>(it->second) * num_outputs_ + output];
}

const WeightVector::Entry* WeightVector::entry(const FeatureId& f, int output) const {
  auto it = index_.find(f);
  if (it == index_.end()) return nullptr;
  return &entries_[static_cast<std::size_t>(it->second) * num_outputs_ + output];
}

double WeightVector::weight(const FeatureId& f, int output, bool averaged) const {
  const Entry* e = entry(f, output);
  if (!e) return 0.0;
  return averaged ? averaged_value(*e) : e->raw;
}

void WeightVector::set(const FeatureId& f, int output, double raw) {
  Entry* e = entry(f, output, true);
  e->raw = raw;
  e->acc = raw * static_cast<double>(time_);
  e->ts = time_;
}

void WeightVector::update(const FeatureId& f, int output, double delta) {
  Entry* e = entry(f, output, true);
  e->acc += e->raw * static_cast<double>(time_ - e->ts);
  e->ts = time_;
  e->raw += delta;
}

double WeightVector::score(std::span<const FeatureId> features, int output, bool averaged) const {
  double s = 0.0;
  for (const auto& f : features) s += weight(f, output, averaged);
  return s;
}

void WeightVector::scores(std::span<const FeatureId> features, bool averaged,
                          std::vector<double>& out) const {
  out.assign(num_outputs_, 0.0);
  for (const auto& f : features) {
    auto it = index_.find(f);
    if (it == index_.end()) continue;
    const Entry* row = &entries_[static_cast<std::size_t>(it->second) * num_outputs_];
    if (averaged) {
      for (int a = 0; a < num_outputs_; ++a) out[a] += averaged_value(row[a]);
    } else {
      for (int a = 0; a < num_outputs_; ++a) out[a] += row[a].raw;
    }
  }
}

WeightVector WeightVector::averaged() const {
  WeightVector out(num_outputs_);
  for_each_row(
      [&](const FeatureId& f, std::span<const double> row) {
        for (int a = 0; a < num_outputs_; ++a)
          if (row[a] != 0.0) out.set(f, a, row[a]);
      },
      true);
  return out;
}

void WeightVector::for_each_row(
    const std::function<void(const FeatureId&, std::span<const double>)>& fn, bool averaged) const {
  std::vector<std::uint32_t> order(keys_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return keys_[a] < keys_[b]; });
  std::vector<double> row(num_outputs_);
  for (auto r : order) {
    const Entry* e = &entries_[static_cast<std::size_t>(r) * num_outputs_];
    for (int a = 0; a < num_outputs_; ++a) row[a] = averaged ? averaged_value(e[a]) : e[a].raw;
    fn(keys_[r], row);
  }
}

bool WeightVector::operator==(const WeightVector& o) const {
  if (num_outputs_ != o.num_outputs_) return false;
  // Compare non-zero raw weights, ignoring row allocation order.
  auto collect = [](const WeightVector& w) {
    std::vector<std::pair<FeatureId, std::vector<double>>> rows;
    w.for_each_row([&](const FeatureId& f, std::span<const double> r) {
      if (std::any_of(r.begin(), r.end(), [](double x) { return x != 0.0; }))
        rows.emplace_back(f, std::vector<double>(r.begin(), r.end()));
    });
    return rows;
  };
  return collect(*this) == collect(o);
}

double score(const WeightVector& weights, std::span<const FeatureId> features, bool averaged) {
  return weights.score(features, 0, averaged);
}

}  // namespace xlparse
