#include "xlparse/evaluation.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "xlparse/common.h"

namespace xlparse {

namespace {

double pct(long num, long den) { return den > 0 ? 100.0 * static_cast<double>(num) / static_cast<double>(den) : 0.0; }

bool is_punct(const Token& t) { return t.upos == "PUNCT" || t.upos == "."; }

void check_aligned(const Treebank& gold, const Treebank& pred) {
  if (gold.sentences.size() != pred.sentences.size())
    throw DataError("gold has " + std::to_string(gold.sentences.size()) + " sentences but prediction has " +
                    std::to_string(pred.sentences.size()));
  for (std::size_t k = 0; k < gold.sentences.size(); ++k)
    if (gold.sentences[k].size() != pred.sentences[k].size())
      throw DataError("sentence " + std::to_string(k + 1) + ": gold has " +
                      std::to_string(gold.sentences[k].size()) + " tokens but prediction has " +
                      std::to_string(pred.sentences[k].size()));
}

const std::string& head_pos(const Sentence& s, int head) {
  static const std::string root = "ROOT";
  return head == 0 ? root : s.at(head).upos;
}

}  // namespace

double Prf::precision() const { return pct(correct, predicted); }
double Prf::recall() const { return pct(correct, gold); }
double Prf::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double EvalReport::uas() const { return pct(head_correct, tokens); }
double EvalReport::las() const { return pct(labeled_correct, tokens); }

EvalReport evaluate(const Treebank& gold, const Treebank& pred, bool exclude_punct) {
  check_aligned(gold, pred);
  EvalReport r;
  r.exclude_punct = exclude_punct;
  for (std::size_t k = 0; k < gold.sentences.size(); ++k) {
    const auto& gs = gold.sentences[k];
    const auto& ps = pred.sentences[k];
    for (int i = 1; i <= gs.size(); ++i) {
      const Token& g = gs.at(i);
      const Token& p = ps.at(i);
      if (!g.head)
        throw DataError("sentence " + std::to_string(k + 1) + ": gold token " + std::to_string(i) + " has no head");
      if (exclude_punct && is_punct(g)) continue;
      ++r.tokens;
      const bool head_ok = p.head && *p.head == *g.head;
      const bool label_ok = head_ok && p.deprel == g.deprel;
      r.head_correct += head_ok;
      r.labeled_correct += label_ok;

      const std::string glabel = g.deprel.value_or("_");
      ++r.per_label[glabel].gold;
      if (p.head) {
        auto& pl = r.per_label[p.deprel.value_or("_")];
        ++pl.predicted;
        pl.correct += label_ok;
      }

      auto& mp = r.per_modifier_pos[g.upos];
      ++mp.gold;
      ++mp.predicted;
      mp.correct += head_ok;

      ++r.per_head_pos[head_pos(gs, *g.head)].gold;
      if (p.head) {
        auto& hp = r.per_head_pos[head_pos(gs, *p.head)];
        ++hp.predicted;
        hp.correct += head_ok;
      }
    }
  }
  return r;
}

double mcnemar_exact(long b, long c) {
  if (b < 0 || c < 0) throw DataError("mcnemar: negative counts");
  const long n = b + c;
  if (n == 0 || b == c) return 1.0;
  const long m = std::min(b, c);
  double tail = 0.0;
  if (n <= 60) {
    double coef = 1.0;  // C(n, k), exact in double for n <= 60 at these k
    for (long k = 0; k <= m; ++k) {
      tail += coef;
      coef = coef * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    tail = std::ldexp(tail, static_cast<int>(-n));
  } else {
    const double ln2n = static_cast<double>(n) * std::log(2.0);
    for (long k = 0; k <= m; ++k)
      tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - ln2n);
  }
  return std::min(1.0, 2.0 * tail);
}

double mcnemar_chi2(long b, long c) {
  if (b < 0 || c < 0) throw DataError("mcnemar: negative counts");
  if (b + c == 0) return 1.0;
  const double d = std::max(0.0, std::fabs(static_cast<double>(b - c)) - 1.0);
  const double x = d * d / static_cast<double>(b + c);
  return std::erfc(std::sqrt(x / 2.0));
}

McNemarResult mcnemar(const Treebank& gold, const Treebank& pred_a, const Treebank& pred_b, McNemarUnit unit,
                      bool exclude_punct, bool chi2) {
  check_aligned(gold, pred_a);
  check_aligned(gold, pred_b);
  McNemarResult res;
  auto right = [&](const Token& g, const Token& p) {
    if (!p.head || *p.head != *g.head) return false;
    return unit == McNemarUnit::kHead || p.deprel == g.deprel;
  };
  for (std::size_t k = 0; k < gold.sentences.size(); ++k) {
    const auto& gs = gold.sentences[k];
    for (int i = 1; i <= gs.size(); ++i) {
      const Token& g = gs.at(i);
      if (!g.head)
        throw DataError("sentence " + std::to_string(k + 1) + ": gold token " + std::to_string(i) + " has no head");
      if (exclude_punct && is_punct(g)) continue;
      const bool a = right(g, pred_a.sentences[k].at(i));
      const bool b = right(g, pred_b.sentences[k].at(i));
      if (a && !b) ++res.b;
      if (!a && b) ++res.c;
    }
  }
  res.p_value = chi2 ? mcnemar_chi2(res.b, res.c) : mcnemar_exact(res.b, res.c);
  return res;
}

namespace {

void write_table_text(std::ostream& out, const std::string& title, const std::map<std::string, Prf>& table) {
  out << '\n' << title << '\n';
  out << std::left << std::setw(12) << "key" << std::right << std::setw(8) << "freq" << std::setw(10) << "prec"
      << std::setw(10) << "rec" << std::setw(10) << "f1" << '\n';
  for (const auto& [key, prf] : table) {
    out << std::left << std::setw(12) << key << std::right << std::setw(8) << prf.gold << std::setw(10)
        << prf.precision() << std::setw(10) << prf.recall() << std::setw(10) << prf.f1() << '\n';
  }
}

void write_table_tsv(std::ostream& out, const std::string& section, const std::map<std::string, Prf>& table) {
  for (const auto& [key, prf] : table)
    out << section << '\t' << key << '\t' << prf.gold << '\t' << prf.precision() << '\t' << prf.recall() << '\t'
        << prf.f1() << '\n';
}

}  // namespace

void write_report_text(std::ostream& out, const EvalReport& r) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::fixed << std::setprecision(2);
  out << "punctuation: " << (r.exclude_punct ? "excluded" : "included") << '\n';
  out << "tokens: " << r.tokens << '\n';
  out << "UAS " << r.uas() << '\n';
  out << "LAS " << r.las() << '\n';
  write_table_text(out, "per label", r.per_label);
  write_table_text(out, "per modifier POS (accuracy = recall)", r.per_modifier_pos);
  write_table_text(out, "per head POS", r.per_head_pos);
  out.flags(flags);
  out.precision(prec);
}

void write_report_tsv(std::ostream& out, const EvalReport& r) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::fixed << std::setprecision(2);
  out << "# punct=" << (r.exclude_punct ? "excluded" : "included") << '\n';
  out << "section\tkey\tfrequency\tprecision\trecall\tf1\n";
  out << "total\ttokens\t" << r.tokens << "\t\t\t\n";
  out << "total\tUAS\t" << r.tokens << '\t' << r.uas() << "\t\t\n";
  out << "total\tLAS\t" << r.tokens << '\t' << r.las() << "\t\t\n";
  write_table_tsv(out, "label", r.per_label);
  write_table_tsv(out, "modifier_pos", r.per_modifier_pos);
  write_table_tsv(out, "head_pos", r.per_head_pos);
  out.flags(flags);
  out.precision(prec);
}

}  // namespace xlparse
