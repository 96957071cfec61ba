#include "xlparse/alignment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "xlparse/common.h"

namespace xlparse {

double TranslationTable::prob(const std::string& target, const std::string& source) const {
  auto s = table_.find(source);
  if (s == table_.end()) return 0.0;
  auto t = s->second.find(target);
  return t == s->second.end() ? 0.0 : t->second;
}

void TranslationTable::set(const std::string& target, const std::string& source, double p) {
  table_[source][target] = p;
}

double TranslationTable::total(const std::string& source) const {
  auto s = table_.find(source);
  if (s == table_.end()) return 0.0;
  double sum = 0.0;
  for (const auto& [t, p] : s->second) sum += p;
  return sum;
}

std::vector<std::string> TranslationTable::sources() const {
  std::vector<std::string> out;
  for (const auto& [s, row] : table_) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

TranslationTable train_ibm1(const ParallelCorpus& corpus, int iterations) {
  if (iterations < 1) throw DataError("train_ibm1: iterations must be >= 1");
  if (corpus.empty()) throw DataError("train_ibm1: empty parallel corpus");

  // Integer ids keep the E-step cheap; id 0 is NULL.
  std::unordered_map<std::string, int> src_id{{TranslationTable::kNull, 0}}, tgt_id;
  std::vector<std::string> src_words{TranslationTable::kNull}, tgt_words;
  std::vector<std::vector<int>> src_ids(corpus.size()), tgt_ids(corpus.size());
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    src_ids[k].push_back(0);
    for (const auto& w : corpus[k].first) {
      auto [it, fresh] = src_id.emplace(w, static_cast<int>(src_words.size()));
      if (fresh) src_words.push_back(w);
      src_ids[k].push_back(it->second);
    }
    for (const auto& w : corpus[k].second) {
      auto [it, fresh] = tgt_id.emplace(w, static_cast<int>(tgt_words.size()));
      if (fresh) tgt_words.push_back(w);
      tgt_ids[k].push_back(it->second);
    }
  }
  if (tgt_words.empty()) throw DataError("train_ibm1: parallel corpus has no target tokens");

  // Parameters live on co-occurring (source, target) pairs only.
  std::vector<std::unordered_map<int, double>> t(src_words.size());
  const double uniform = 1.0 / static_cast<double>(tgt_words.size());
  for (std::size_t k = 0; k < corpus.size(); ++k)
    for (int s : src_ids[k])
      for (int w : tgt_ids[k]) t[s][w] = uniform;

  TranslationTable table;
  std::vector<std::unordered_map<int, double>> counts(src_words.size());
  std::vector<double> totals(src_words.size());
  for (int iter = 0; iter < iterations; ++iter) {
    for (auto& row : counts)
      for (auto& [w, c] : row) c = 0.0;
    std::fill(totals.begin(), totals.end(), 0.0);
    double ll = 0.0;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
      const auto& ss = src_ids[k];
      const double norm = 1.0 / static_cast<double>(ss.size());
      for (int w : tgt_ids[k]) {
        double z = 0.0;
        for (int s : ss) z += t[s][w];
        ll += std::log(z * norm);
        for (int s : ss) {
          const double post = t[s][w] / z;
          counts[s][w] += post;
          totals[s] += post;
        }
      }
    }
    table.log_likelihood.push_back(ll);
    for (std::size_t s = 0; s < t.size(); ++s)
      for (auto& [w, p] : t[s]) p = totals[s] > 0.0 ? counts[s][w] / totals[s] : 0.0;
  }
  for (std::size_t s = 0; s < t.size(); ++s)
    for (const auto& [w, p] : t[s]) table.set(tgt_words[w], src_words[s], p);
  return table;
}

namespace {

// Links each word of `to` to its best word of `from` under p(to | from).
// Returned pairs are (index in from, index in to).
std::vector<std::pair<int, int>> best_links(const TranslationTable& table, const std::vector<std::string>& from,
                                            const std::vector<std::string>& to) {
  std::vector<std::pair<int, int>> out;
  const long lf = static_cast<long>(from.size()), lt = static_cast<long>(to.size());
  for (long j = 0; j < lt; ++j) {
    int best = -1;
    double best_p = -1.0;
    long best_dist = 0;
    for (long i = 0; i < lf; ++i) {
      const double p = table.prob(to[j], from[i]);
      const long dist = std::labs((2 * i + 1) * lt - (2 * j + 1) * lf);
      if (p > best_p || (p == best_p && dist < best_dist)) {
        best = static_cast<int>(i);
        best_p = p;
        best_dist = dist;
      }
    }
    const double null_p = table.prob(to[j], TranslationTable::kNull);
    if (best < 0 || null_p > best_p || best_p <= 0.0) continue;
    out.emplace_back(best, static_cast<int>(j));
  }
  return out;
}

}  // namespace

Links viterbi_align(const TranslationTable& table, const std::vector<std::string>& source,
                    const std::vector<std::string>& target, Direction direction) {
  Links links;
  if (direction == Direction::kSourceToTarget) {
    for (auto [i, j] : best_links(table, source, target)) links.emplace(i, j);
  } else {
    for (auto [j, i] : best_links(table, target, source)) links.emplace(i, j);
  }
  return links;
}

Links intersect(const Links& forward, const Links& reverse) {
  Links out;
  std::set_intersection(forward.begin(), forward.end(), reverse.begin(), reverse.end(),
                        std::inserter(out, out.end()));
  return out;
}

AlignedCorpus align_corpus(const ParallelCorpus& corpus, int iterations) {
  ParallelCorpus swapped;
  swapped.reserve(corpus.size());
  for (const auto& [s, t] : corpus) swapped.emplace_back(t, s);
  const TranslationTable fwd = train_ibm1(corpus, iterations);
  const TranslationTable rev = train_ibm1(swapped, iterations);
  AlignedCorpus out;
  out.reserve(corpus.size());
  for (const auto& [s, t] : corpus) {
    AlignedPair p{s, t, {}};
    p.links = intersect(viterbi_align(fwd, s, t, Direction::kSourceToTarget),
                        viterbi_align(rev, s, t, Direction::kTargetToSource));
    out.push_back(std::move(p));
  }
  return out;
}

void TranslationLexicon::add_count(const std::string& src, const std::string& tgt, long count) {
  long& c = counts_[src][tgt];
  c += count;
  auto it = best_.find(src);
  if (it == best_.end()) {
    best_.emplace(src, std::make_pair(tgt, c));
  } else if (c > it->second.second || (c == it->second.second && tgt < it->second.first)) {
    it->second = {tgt, c};
  } else if (tgt == it->second.first) {
    it->second.second = c;
  }
}

void TranslationLexicon::set_best(const std::string& src, const std::string& tgt, long count) {
  counts_[src][tgt] = count;
  best_[src] = {tgt, count};
}

std::optional<std::string> TranslationLexicon::lookup(const std::string& word) const {
  auto it = best_.find(word);
  if (it == best_.end()) return std::nullopt;
  return it->second.first;
}

long TranslationLexicon::best_count(const std::string& word) const {
  auto it = best_.find(word);
  return it == best_.end() ? 0 : it->second.second;
}

namespace {

bool too_long(const AlignedPair& p, int max_len) {
  return static_cast<int>(p.source.size()) > max_len || static_cast<int>(p.target.size()) > max_len;
}

void check_link(const AlignedPair& p, const Link& l) {
  if (l.first < 0 || l.second < 0 || l.first >= static_cast<int>(p.source.size()) ||
      l.second >= static_cast<int>(p.target.size()))
    throw DataError("alignment link " + std::to_string(l.first) + "-" + std::to_string(l.second) +
                    " out of bounds");
}

}  // namespace

TranslationLexicon extract_lexicon(const AlignedCorpus& corpus, const std::string& src_lang,
                                   const std::string& tgt_lang, int max_len) {
  TranslationLexicon lex(src_lang, tgt_lang);
  for (const auto& p : corpus) {
    if (too_long(p, max_len)) continue;
    for (const auto& l : p.links) {
      check_link(p, l);
      lex.add_count(p.source[l.first], p.target[l.second]);
    }
  }
  return lex;
}

TranslationLexicon extract_reverse_lexicon(const AlignedCorpus& corpus, const std::string& src_lang,
                                           const std::string& tgt_lang, int max_len) {
  TranslationLexicon lex(tgt_lang, src_lang);
  for (const auto& p : corpus) {
    if (too_long(p, max_len)) continue;
    for (const auto& l : p.links) {
      check_link(p, l);
      lex.add_count(p.target[l.second], p.source[l.first]);
    }
  }
  return lex;
}

void write_lexicon(std::ostream& out, const TranslationLexicon& lexicon) {
  out << "# lexicon src=" << lexicon.src_lang() << " tgt=" << lexicon.tgt_lang() << '\n';
  for (const auto& [src, best] : lexicon.entries())
    out << src << '\t' << best.first << '\t' << best.second << '\n';
}

TranslationLexicon read_lexicon(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::string src_lang, tgt_lang;
  bool header = false;
  std::vector<std::tuple<std::string, std::string, long, std::size_t>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line.rfind("#", 0) == 0) {
      auto fields = split_whitespace(line.substr(1));
      if (!fields.empty() && fields[0] == "lexicon") {
        for (std::size_t k = 1; k < fields.size(); ++k) {
          if (fields[k].rfind("src=", 0) == 0) src_lang = fields[k].substr(4);
          else if (fields[k].rfind("tgt=", 0) == 0) tgt_lang = fields[k].substr(4);
        }
        header = true;
      }
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty())
      throw ParseError(lineno, "expected src<TAB>tgt<TAB>count");
    long count = 0;
    auto res = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), count);
    if (res.ec != std::errc() || res.ptr != cols[2].data() + cols[2].size() || count < 0)
      throw ParseError(lineno, "malformed count '" + cols[2] + "'");
    rows.emplace_back(cols[0], cols[1], count, lineno);
  }
  if (!header) throw ParseError(1, "missing '# lexicon src=<a> tgt=<b>' header");
  TranslationLexicon lex(src_lang, tgt_lang);
  for (const auto& [s, t, c, ln] : rows) {
    if (lex.lookup(s)) throw ParseError(ln, "duplicate source word '" + s + "'");
    lex.set_best(s, t, c);
  }
  return lex;
}

namespace {

Links parse_pharaoh_line(const std::string& line, std::size_t lineno) {
  Links links;
  for (const auto& item : split_whitespace(line)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw ParseError(lineno, "malformed link '" + item + "'");
    int a = 0, b = 0;
    const char* s = item.data();
    auto r1 = std::from_chars(s, s + dash, a);
    auto r2 = std::from_chars(s + dash + 1, s + item.size(), b);
    if (dash == 0 || r1.ec != std::errc() || r1.ptr != s + dash || r2.ec != std::errc() ||
        r2.ptr != s + item.size() || a < 0 || b < 0)
      throw ParseError(lineno, "malformed link '" + item + "'");
    links.emplace(a, b);
  }
  return links;
}

}  // namespace

std::vector<Links> read_pharaoh(std::istream& in) {
  std::vector<Links> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(parse_pharaoh_line(line, lineno));
  }
  return out;
}

std::vector<Links> read_pharaoh(std::istream& in, const MonolingualCorpus& source,
                                const MonolingualCorpus& target) {
  if (source.size() != target.size())
    throw DataError("parallel texts differ in length: " + std::to_string(source.size()) + " vs " +
                    std::to_string(target.size()) + " sentences");
  auto out = read_pharaoh(in);
  if (out.size() != source.size())
    throw DataError("alignment file has " + std::to_string(out.size()) + " lines but the texts have " +
                    std::to_string(source.size()) + " sentences");
  for (std::size_t k = 0; k < out.size(); ++k)
    for (const auto& [i, j] : out[k])
      if (i >= static_cast<int>(source[k].size()) || j >= static_cast<int>(target[k].size()))
        throw ParseError(k + 1, "link " + std::to_string(i) + "-" + std::to_string(j) + " out of bounds");
  return out;
}

void write_pharaoh_line(std::ostream& out, const Links& links) {
  bool first = true;
  for (const auto& [i, j] : links) {
    if (!first) out << ' ';
    out << i << '-' << j;
    first = false;
  }
  out << '\n';
}

void write_pharaoh(std::ostream& out, const std::vector<Links>& links) {
  for (const auto& l : links) write_pharaoh_line(out, l);
}

}  // namespace xlparse
