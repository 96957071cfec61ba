// Core sentence/tree types plus CoNLL-U and tokenized-text I/O.

#ifndef XLPARSE_TREEBANK_H_
#define XLPARSE_TREEBANK_H_

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace xlparse {

inline constexpr int kRoot = 0;

struct Token {
  int index = 0;  // 1-based
  std::string form;
  std::string upos;
  std::optional<int> head;  // 0 = ROOT
  std::optional<std::string> deprel;
  // Lexical-feature form: the target-language translation for source
  // tokens, the form itself for target-language tokens, absent for NULL.
  std::optional<std::string> lexform;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::string language;
  std::vector<std::string> comments;  // without the leading "# "

  int size() const { return static_cast<int>(tokens.size()); }
  // 1-based access.
  const Token& at(int index) const { return tokens.at(index - 1); }
  Token& at(int index) { return tokens.at(index - 1); }
  bool has_all_heads() const;
  // heads[i] for i in 1..n; heads[0] = -1. Missing heads are -1.
  std::vector<int> heads() const;
  bool operator==(const Sentence&) const = default;
};

struct Treebank {
  std::vector<Sentence> sentences;
  std::string language;

  std::size_t size() const { return sentences.size(); }
  std::size_t token_count() const;
  bool operator==(const Treebank&) const = default;
};

using MonolingualCorpus = std::vector<std::vector<std::string>>;

// Universal Dependencies v1 tagset (17 tags).
const std::set<std::string>& ud_v1_tagset();

struct ConlluOptions {
  // Unknown UPOS tags raise a ParseError instead of a warning.
  bool strict_upos = false;
  const std::set<std::string>* tagset = nullptr;  // default: UD v1
};

// Reads 10-column CoNLL-U / CoNLL-X. Multiword-token ranges ("3-4") and
// empty nodes ("5.1") are skipped. "_" in HEAD/DEPREL gives absent values.
// A "Lex=" attribute in MISC is read back into Token::lexform.
Treebank read_conllu(std::istream& in, const std::string& language,
                     const ConlluOptions& options = {});
Treebank read_conllu_file(const std::string& path, const std::string& language,
                          const ConlluOptions& options = {});

void write_conllu(std::ostream& out, const Treebank& treebank);
void write_conllu_sentence(std::ostream& out, const Sentence& sentence);
void write_conllu_file(const std::string& path, const Treebank& treebank);

// True iff no two arcs cross when drawn above the sentence, ROOT at 0.
// Throws DataError when a head is missing.
bool is_projective(const Sentence& sentence);

// Checks the head function is a tree rooted at 0: heads in range, no
// self-loops, no cycles, and (when single_root) exactly one root child.
// Throws DataError describing the first violation.
void validate_tree(const Sentence& sentence, bool single_root = true);
bool is_valid_tree(const Sentence& sentence, bool single_root = true);

// A projected target tree where some tokens may lack a head.
struct PartialTree {
  Sentence sentence;
  int attached = 0;  // tokens with a head
  bool full_projective = false;

  // Recomputes attached/full_projective from the sentence's heads.
  static PartialTree from_sentence(Sentence sentence);

  double density() const;
  // Exact rational test: attached / n >= percent / 100.
  bool density_at_least(int percent) const;
};

MonolingualCorpus read_tokenized_corpus(std::istream& in);
MonolingualCorpus read_tokenized_file(const std::string& path);
void write_tokenized_corpus(std::ostream& out, const MonolingualCorpus& corpus);

// Marks a sentence as target-language text: lexform := form.
Sentence with_own_lexforms(Sentence sentence);
Treebank with_own_lexforms(Treebank treebank);
// Drops heads and labels (and keeps everything else).
Sentence strip_tree(Sentence sentence);

}  // namespace xlparse

#endif  // XLPARSE_TREEBANK_H_
