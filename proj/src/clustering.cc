#include "xlparse/clustering.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "xlparse/common.h"
#include "xlparse/rng.h"

namespace xlparse {

void Clustering::add(const std::string& word, const std::string& bits, long count) {
  words_[word] = Entry{bits, count};
}

const std::string* Clustering::lookup(const std::string& word) const {
  auto it = words_.find(word);
  return it == words_.end() ? nullptr : &it->second.bits;
}

std::optional<std::string> Clustering::lookup(const std::string& word, int level) const {
  const std::string* bits = lookup(word);
  if (!bits || bits->empty()) return std::nullopt;
  return bits->substr(0, std::min<std::size_t>(static_cast<std::size_t>(std::max(level, 1)), bits->size()));
}

int Clustering::num_clusters() const {
  std::set<std::string> leaves;
  for (const auto& [w, e] : words_) leaves.insert(e.bits);
  return static_cast<int>(leaves.size());
}

std::vector<std::pair<std::string, Clustering::Entry>> Clustering::sorted() const {
  std::vector<std::pair<std::string, Entry>> out(words_.begin(), words_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second.bits, a.first) < std::tie(b.second.bits, b.first);
  });
  return out;
}

void write_clusters(std::ostream& out, const Clustering& c) {
  for (const auto& [word, e] : c.sorted()) out << e.bits << '\t' << word << '\t' << e.count << '\n';
}

Clustering read_clusters(std::istream& in) {
  Clustering c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw ParseError(lineno, "expected bitstring<TAB>word<TAB>count");
    const auto& bits = cols[0];
    if (bits.empty() || bits.find_first_not_of("01") != std::string::npos)
      throw ParseError(lineno, "malformed bit-string '" + bits + "'");
    long count = 0;
    auto res = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), count);
    if (res.ec != std::errc() || res.ptr != cols[2].data() + cols[2].size() || count < 0)
      throw ParseError(lineno, "malformed count '" + cols[2] + "'");
    if (c.lookup(cols[1])) throw ParseError(lineno, "duplicate word '" + cols[1] + "'");
    c.add(cols[1], bits, count);
  }
  return c;
}

namespace {

std::string normalize_word(std::string w, const BrownOptions& o) {
  if (o.lowercase)
    for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (o.normalize_digits)
    for (auto& ch : w)
      if (std::isdigit(static_cast<unsigned char>(ch))) ch = '0';
  return w;
}

// Greedy agglomerative clustering over a fixed set of slots, maintaining
// the merge-loss table incrementally.
class BrownState {
 public:
  BrownState(int slots, double total, const std::vector<std::vector<std::pair<int, double>>>& next,
             const std::vector<std::vector<std::pair<int, double>>>& prev,
             const std::vector<double>& left_count, const std::vector<double>& right_count)
      : cap_(slots),
        total_(total),
        next_(next),
        prev_(prev),
        left_count_(left_count),
        right_count_(right_count),
        n_(slots, std::vector<double>(slots, 0.0)),
        loss_(slots, std::vector<double>(slots, 0.0)),
        nl_(slots, 0.0),
        nr_(slots, 0.0),
        active_(slots, false),
        members_(slots) {}

  // Adds a word as a new singleton cluster in the lowest free slot.
  int add_word(int word, std::vector<int>& slot_of_word) {
    int s = 0;
    while (active_[s]) ++s;
    members_[s] = {word};
    slot_of_word[word] = s;
    for (int d = 0; d < cap_; ++d) n_[s][d] = n_[d][s] = 0.0;
    for (auto [w2, c] : next_[word]) {
      const int d = slot_of_word[w2];
      if (d >= 0 && (active_[d] || d == s)) n_[s][d] += c;
    }
    for (auto [w1, c] : prev_[word]) {
      const int d = slot_of_word[w1];
      if (d >= 0 && active_[d] && d != s) n_[d][s] += c;
    }
    nl_[s] = left_count_[word];
    nr_[s] = right_count_[word];
    // Existing pairs gain the terms that involve the new cluster.
    for (int a = 0; a < cap_; ++a) {
      if (!active_[a]) continue;
      for (int b = a + 1; b < cap_; ++b) {
        if (!active_[b]) continue;
        loss_[a][b] += q(a, s) + q(s, a) + q(b, s) + q(s, b) - qm_row(a, b, s) - qm_col(a, b, s);
      }
    }
    active_[s] = true;
    for (int x = 0; x < cap_; ++x)
      if (active_[x] && x != s) set_loss(x, s, full_loss(std::min(x, s), std::max(x, s)));
    return s;
  }

  void init_losses() {
    for (int a = 0; a < cap_; ++a)
      for (int b = a + 1; b < cap_; ++b)
        if (active_[a] && active_[b]) loss_[a][b] = full_loss(a, b);
  }

  // Lowest-loss active pair (ties: lowest slots).
  std::pair<int, int> best_pair(double* loss) const {
    std::pair<int, int> best{-1, -1};
    double best_loss = std::numeric_limits<double>::infinity();
    for (int a = 0; a < cap_; ++a) {
      if (!active_[a]) continue;
      for (int b = a + 1; b < cap_; ++b) {
        if (!active_[b]) continue;
        if (loss_[a][b] < best_loss) {
          best_loss = loss_[a][b];
          best = {a, b};
        }
      }
    }
    *loss = best_loss;
    return best;
  }

  // Merges j into i (i < j).
  void merge(int i, int j, std::vector<int>& slot_of_word) {
    for (int a = 0; a < cap_; ++a) {
      if (!active_[a] || a == i || a == j) continue;
      for (int b = a + 1; b < cap_; ++b) {
        if (!active_[b] || b == i || b == j) continue;
        loss_[a][b] += -(q(a, i) + q(i, a) + q(a, j) + q(j, a) + q(b, i) + q(i, b) + q(b, j) + q(j, b)) +
                       (qm_row(a, b, i) + qm_col(a, b, i) + qm_row(a, b, j) + qm_col(a, b, j));
      }
    }
    const double self = n_[i][i] + n_[i][j] + n_[j][i] + n_[j][j];
    for (int d = 0; d < cap_; ++d) {
      n_[i][d] += n_[j][d];
      n_[d][i] += n_[d][j];
    }
    n_[i][i] = self;
    for (int d = 0; d < cap_; ++d) n_[j][d] = n_[d][j] = 0.0;
    nl_[i] += nl_[j];
    nr_[i] += nr_[j];
    nl_[j] = nr_[j] = 0.0;
    active_[j] = false;
    for (int w : members_[j]) slot_of_word[w] = i;
    members_[i].insert(members_[i].end(), members_[j].begin(), members_[j].end());
    members_[j].clear();
    for (int a = 0; a < cap_; ++a) {
      if (!active_[a] || a == i) continue;
      for (int b = a + 1; b < cap_; ++b) {
        if (!active_[b] || b == i) continue;
        loss_[a][b] += (q(a, i) + q(i, a) + q(b, i) + q(i, b)) - (qm_row(a, b, i) + qm_col(a, b, i));
      }
    }
    for (int x = 0; x < cap_; ++x)
      if (active_[x] && x != i) set_loss(x, i, full_loss(std::min(x, i), std::max(x, i)));
  }

  int num_active() const { return static_cast<int>(std::count(active_.begin(), active_.end(), true)); }
  bool active(int s) const { return active_[s]; }
  const std::vector<int>& members(int s) const { return members_[s]; }
  int capacity() const { return cap_; }

 private:
  double term(double c, double l, double r) const {
    if (c <= 0.0) return 0.0;
    return (c / total_) * std::log(c * total_ / (l * r));
  }
  double q(int a, int b) const { return term(n_[a][b], nl_[a], nr_[b]); }
  // Terms of the cluster that merging a and b would create, against d.
  double qm_row(int a, int b, int d) const { return term(n_[a][d] + n_[b][d], nl_[a] + nl_[b], nr_[d]); }
  double qm_col(int a, int b, int d) const { return term(n_[d][a] + n_[d][b], nl_[d], nr_[a] + nr_[b]); }

  double weight_of(int a) const {
    double w = -q(a, a);
    for (int d = 0; d < cap_; ++d)
      if (active_[d]) w += q(a, d) + q(d, a);
    return w;
  }

  double full_loss(int a, int b) const {
    double removed = weight_of(a) + weight_of(b) - q(a, b) - q(b, a);
    double added = term(n_[a][a] + n_[a][b] + n_[b][a] + n_[b][b], nl_[a] + nl_[b], nr_[a] + nr_[b]);
    for (int d = 0; d < cap_; ++d)
      if (active_[d] && d != a && d != b) added += qm_row(a, b, d) + qm_col(a, b, d);
    return removed - added;
  }

  void set_loss(int a, int b, double v) {
    if (a > b) std::swap(a, b);
    loss_[a][b] = v;
  }

  int cap_;
  double total_;
  const std::vector<std::vector<std::pair<int, double>>>& next_;
  const std::vector<std::vector<std::pair<int, double>>>& prev_;
  const std::vector<double>& left_count_;
  const std::vector<double>& right_count_;
  std::vector<std::vector<double>> n_;
  std::vector<std::vector<double>> loss_;
  std::vector<double> nl_, nr_;
  std::vector<bool> active_;
  std::vector<std::vector<int>> members_;
};

}  // namespace

Clustering brown_cluster(const MonolingualCorpus& corpus, int num_clusters, const BrownOptions& options,
                         std::vector<BrownMerge>* trace) {
  if (num_clusters < 1) throw DataError("brown_cluster: number of clusters must be >= 1");
  std::unordered_map<std::string, long> freq;
  for (const auto& s : corpus)
    for (const auto& w : s) ++freq[normalize_word(w, options)];
  std::vector<std::pair<std::string, long>> types;
  for (const auto& [w, c] : freq)
    if (c >= options.min_count) types.emplace_back(w, c);
  if (types.empty()) throw DataError("brown_cluster: no word types reach the minimum count");
  std::sort(types.begin(), types.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  const int V = static_cast<int>(types.size());
  int K = num_clusters;
  if (K > V) {
    log_warning("brown_cluster: " + std::to_string(K) + " clusters requested but only " +
                std::to_string(V) + " types; using " + std::to_string(V));
    K = V;
  }
  std::unordered_map<std::string, int> id;
  for (int i = 0; i < V; ++i) id.emplace(types[i].first, i);

  // Bigram statistics; marginals count bigrams with any partner.
  std::vector<std::map<int, double>> next_map(V), prev_map(V);
  std::vector<double> left_count(V, 0.0), right_count(V, 0.0);
  double total = 0.0;
  for (const auto& s : corpus) {
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      total += 1.0;
      auto a = id.find(normalize_word(s[k], options));
      auto b = id.find(normalize_word(s[k + 1], options));
      if (a != id.end()) left_count[a->second] += 1.0;
      if (b != id.end()) right_count[b->second] += 1.0;
      if (a != id.end() && b != id.end()) {
        next_map[a->second][b->second] += 1.0;
        prev_map[b->second][a->second] += 1.0;
      }
    }
  }
  std::vector<std::vector<std::pair<int, double>>> next(V), prev(V);
  for (int i = 0; i < V; ++i) {
    next[i].assign(next_map[i].begin(), next_map[i].end());
    prev[i].assign(prev_map[i].begin(), prev_map[i].end());
  }

  const int window = options.exact ? V : K;
  const int slots = std::min(V, window + 1);
  BrownState st(std::max(slots, 1), std::max(total, 1.0), next, prev, left_count, right_count);
  std::vector<int> slot_of_word(V, -1);

  auto do_merge = [&](std::vector<std::pair<int, int>>* hierarchy) {
    double loss = 0.0;
    auto [a, b] = st.best_pair(&loss);
    if (trace) {
      BrownMerge m;
      std::vector<int> slot_index(st.capacity(), -1);
      for (int s = 0; s < st.capacity(); ++s) {
        if (!st.active(s)) continue;
        slot_index[s] = static_cast<int>(m.clusters_before.size());
        std::vector<std::string> words;
        for (int w : st.members(s)) words.push_back(types[w].first);
        std::sort(words.begin(), words.end());
        m.clusters_before.push_back(std::move(words));
      }
      m.left = slot_index[a];
      m.right = slot_index[b];
      m.loss = loss;
      trace->push_back(std::move(m));
    }
    if (hierarchy) hierarchy->emplace_back(a, b);
    st.merge(a, b, slot_of_word);
  };

  const int initial = std::min(V, window);
  for (int w = 0; w < initial; ++w) st.add_word(w, slot_of_word);
  for (int w = initial; w < V; ++w) {
    st.add_word(w, slot_of_word);
    do_merge(nullptr);
  }
  while (st.num_active() > K) do_merge(nullptr);

  std::vector<std::string> bits(st.capacity());
  std::vector<int> leaves;
  for (int s = 0; s < st.capacity(); ++s)
    if (st.active(s)) leaves.push_back(s);
  std::vector<std::pair<int, int>> hierarchy;
  std::vector<std::vector<int>> leaf_members;
  for (int s : leaves) leaf_members.push_back(st.members(s));
  while (st.num_active() > 1) do_merge(&hierarchy);
  for (auto it = hierarchy.rbegin(); it != hierarchy.rend(); ++it) {
    bits[it->second] = bits[it->first] + "1";
    bits[it->first] += "0";
  }
  Clustering out;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const std::string path = bits[leaves[k]].empty() ? "0" : bits[leaves[k]];
    for (int w : leaf_members[k]) out.add(types[w].first, path, types[w].second);
  }
  return out;
}

CodeSwitchResult generate_codeswitch(const CodeSwitchSpec& spec) {
  const std::size_t langs = spec.corpora.size();
  if (langs < 2) throw DataError("code-switching needs at least two languages");
  if (spec.alpha < 0.0 || spec.alpha > 1.0) throw DataError("alpha must lie in [0, 1]");
  std::vector<std::vector<const TranslationLexicon*>> lex(langs, std::vector<const TranslationLexicon*>(langs));
  for (std::size_t i = 0; i < langs; ++i)
    for (std::size_t j = 0; j < langs; ++j) {
      if (i == j) continue;
      auto it = spec.lexicons.find({spec.corpora[i].language, spec.corpora[j].language});
      if (it == spec.lexicons.end())
        throw DataError("missing lexicon for pair " + spec.corpora[i].language + "->" +
                        spec.corpora[j].language);
      lex[i][j] = &it->second;
    }
  Rng rng(spec.seed);
  CodeSwitchResult res;
  for (std::size_t i = 0; i < langs; ++i) {
    for (auto sentence : spec.corpora[i].corpus) {
      for (auto& word : sentence) {
        ++res.tokens;
        const double a = uniform_unit(rng);
        if (a >= spec.alpha) continue;
        ++res.sampled;
        std::size_t j = uniform_below(rng, langs - 1);
        if (j >= i) ++j;
        if (auto t = lex[i][j]->lookup(word)) {
          word = *t;
          ++res.replaced;
          ++res.replaced_into[spec.corpora[j].language];
        }
      }
      res.corpus.push_back(std::move(sentence));
    }
  }
  return res;
}

void write_codeswitch_corpus(std::ostream& out, const CodeSwitchResult& result, std::uint64_t seed,
                             double alpha) {
  out << "# seed=" << seed << " alpha=" << alpha << '\n';
  write_tokenized_corpus(out, result.corpus);
}

}  // namespace xlparse
