// Attachment scores with per-label and per-POS breakdowns, and McNemar's
// test on token-level correctness.

#ifndef XLPARSE_EVALUATION_H_
#define XLPARSE_EVALUATION_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "xlparse/treebank.h"

namespace xlparse {

struct Prf {
  long gold = 0;       // gold items with this key (frequency)
  long predicted = 0;  // predicted items with this key
  long correct = 0;    // predicted items with this key that are right
  double precision() const;
  double recall() const;
  double f1() const;
};

struct EvalReport {
  bool exclude_punct = false;
  long tokens = 0;  // scored tokens
  long head_correct = 0;
  long labeled_correct = 0;
  double uas() const;
  double las() const;

  // Keyed by deprel; correct = head and label right.
  std::map<std::string, Prf> per_label;
  // Keyed by the modifier's UPOS; correct = head right. Only gold and
  // correct are used (accuracy = recall).
  std::map<std::string, Prf> per_modifier_pos;
  // Keyed by the UPOS of the head token (ROOT for attachments to 0);
  // predicted counts come from the predicted head.
  std::map<std::string, Prf> per_head_pos;
};

// Tokens with UPOS "PUNCT" (or legacy ".") are skipped when exclude_punct.
// Throws DataError naming the sentence on any length mismatch.
EvalReport evaluate(const Treebank& gold, const Treebank& pred, bool exclude_punct = false);

enum class McNemarUnit { kHead, kLabeled };

struct McNemarResult {
  long b = 0;  // A right, B wrong
  long c = 0;  // A wrong, B right
  double p_value = 1.0;
};

// Exact two-sided binomial p-value for discordant counts (b, c).
double mcnemar_exact(long b, long c);
// Chi-squared approximation with continuity correction.
double mcnemar_chi2(long b, long c);

McNemarResult mcnemar(const Treebank& gold, const Treebank& pred_a, const Treebank& pred_b,
                      McNemarUnit unit = McNemarUnit::kHead, bool exclude_punct = false,
                      bool chi2 = false);

// Header, totals, then label / modifier-POS / head-POS tables with columns
// key, frequency, precision, recall, f1.
void write_report_text(std::ostream& out, const EvalReport& report);
void write_report_tsv(std::ostream& out, const EvalReport& report);

}  // namespace xlparse

#endif  // XLPARSE_EVALUATION_H_
