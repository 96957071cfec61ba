#include "xlparse/treebank.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "xlparse/common.h"

namespace xlparse {

bool Sentence::has_all_heads() const {
  for (const auto& t : tokens)
    if (!t.head) return false;
  return true;
}

std::vector<int> Sentence::heads() const {
  std::vector<int> h(tokens.size() + 1, -1);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i].head) h[i + 1] = *tokens[i].head;
  return h;
}

std::size_t Treebank::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

const std::set<std::string>& ud_v1_tagset() {
  static const std::set<std::string> tags = {
      "ADJ", "ADP",  "ADV",   "AUX",   "CONJ", "DET", "INTJ", "NOUN", "NUM",
      "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};
  return tags;
}

namespace {

bool parse_int(std::string_view s, int* out) {
  if (s.empty()) return false;
  auto res = std::from_chars(s.data(), s.data() + s.size(), *out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

struct PendingToken {
  Token token;
  std::size_t line;
};

void finish_block(std::vector<PendingToken>& block, std::vector<std::string>& comments,
                  const std::string& language, Treebank& out) {
  if (block.empty()) {
    comments.clear();
    return;
  }
  Sentence s;
  s.language = language;
  s.comments = std::move(comments);
  comments.clear();
  const int n = static_cast<int>(block.size());
  for (int i = 0; i < n; ++i) {
    auto& p = block[i];
    if (p.token.index != i + 1)
      throw ParseError(p.line, "token ID " + std::to_string(p.token.index) +
                                   " out of sequence (expected " + std::to_string(i + 1) + ")");
    if (p.token.head && (*p.token.head < 0 || *p.token.head > n))
      throw ParseError(p.line, "head out of range");
    if (p.token.head && *p.token.head == p.token.index)
      throw ParseError(p.line, "token is its own head");
    s.tokens.push_back(std::move(p.token));
  }
  block.clear();
  out.sentences.push_back(std::move(s));
}

}  // namespace

Treebank read_conllu(std::istream& in, const std::string& language,
                     const ConlluOptions& options) {
  const auto& tagset = options.tagset ? *options.tagset : ud_v1_tagset();
  Treebank tb;
  tb.language = language;
  std::vector<PendingToken> block;
  std::vector<std::string> comments;
  std::set<std::string> warned_tags;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      finish_block(block, comments, language, tb);
      continue;
    }
    if (line[0] == '#') {
      std::string_view c(line);
      c.remove_prefix(1);
      comments.emplace_back(trim(c));
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 10)
      throw ParseError(lineno, "expected 10 tab-separated columns, found " +
                                   std::to_string(cols.size()));
    if (cols[0].find('-') != std::string::npos || cols[0].find('.') != std::string::npos)
      continue;
    Token t;
    if (!parse_int(cols[0], &t.index) || t.index < 1)
      throw ParseError(lineno, "invalid token ID '" + cols[0] + "'");
    t.form = cols[1];
    t.upos = cols[3];
    if (!tagset.count(t.upos)) {
      if (options.strict_upos) throw ParseError(lineno, "unknown UPOS tag '" + t.upos + "'");
      if (warned_tags.insert(t.upos).second)
        log_warning("line " + std::to_string(lineno) + ": UPOS tag '" + t.upos +
                    "' is not in the configured tagset");
    }
    if (cols[6] != "_") {
      int h;
      if (!parse_int(cols[6], &h)) throw ParseError(lineno, "non-integer HEAD '" + cols[6] + "'");
      if (h < 0) throw ParseError(lineno, "head out of range");
      t.head = h;
    }
    if (cols[7] != "_") t.deprel = cols[7];
    if (cols[9] != "_") {
      for (const auto& attr : split(cols[9], '|')) {
        if (attr.rfind("Lex=", 0) == 0) t.lexform = attr.substr(4);
      }
    }
    block.push_back({std::move(t), lineno});
  }
  finish_block(block, comments, language, tb);
  return tb;
}

Treebank read_conllu_file(const std::string& path, const std::string& language,
                          const ConlluOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_conllu(in, language, options);
}

void write_conllu_sentence(std::ostream& out, const Sentence& s) {
  for (const auto& c : s.comments) out << "# " << c << '\n';
  for (const auto& t : s.tokens) {
    out << t.index << '\t' << t.form << "\t_\t" << t.upos << "\t_\t_\t";
    if (t.head)
      out << *t.head;
    else
      out << '_';
    out << '\t' << (t.deprel ? *t.deprel : std::string("_")) << "\t_\t";
    if (t.lexform)
      out << "Lex=" << *t.lexform;
    else
      out << '_';
    out << '\n';
  }
  out << '\n';
}

void write_conllu(std::ostream& out, const Treebank& tb) {
  for (const auto& s : tb.sentences) write_conllu_sentence(out, s);
}

void write_conllu_file(const std::string& path, const Treebank& tb) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_conllu(out, tb);
}

namespace {

// Follows head pointers; true if `anc` dominates `node` (or equals it).
bool dominates(const std::vector<int>& heads, int anc, int node) {
  int steps = 0;
  const int limit = static_cast<int>(heads.size());
  while (node != anc) {
    if (node == kRoot || ++steps > limit) return false;
    node = heads[node];
  }
  return true;
}

}  // namespace

bool is_projective(const Sentence& s) {
  if (!s.has_all_heads()) throw DataError("is_projective: sentence has a missing head");
  const auto heads = s.heads();
  const int n = s.size();
  // An arc is projective iff its head dominates every word strictly
  // between its endpoints.
  for (int m = 1; m <= n; ++m) {
    const int h = heads[m];
    const int lo = std::min(h, m), hi = std::max(h, m);
    for (int k = lo + 1; k < hi; ++k)
      if (!dominates(heads, h, k)) return false;
  }
  return true;
}

void validate_tree(const Sentence& s, bool single_root) {
  const int n = s.size();
  int roots = 0;
  for (const auto& t : s.tokens) {
    if (!t.head) throw DataError("token " + std::to_string(t.index) + " has no head");
    if (*t.head < 0 || *t.head > n)
      throw DataError("token " + std::to_string(t.index) + ": head out of range");
    if (*t.head == t.index) throw DataError("token " + std::to_string(t.index) + " is its own head");
    if (*t.head == kRoot) ++roots;
  }
  if (roots == 0) throw DataError("no token is attached to ROOT");
  if (single_root && roots != 1)
    throw DataError(std::to_string(roots) + " tokens attached to ROOT (single-root mode)");
  // Every token must reach ROOT within n steps.
  const auto heads = s.heads();
  for (int m = 1; m <= n; ++m) {
    int node = m;
    for (int steps = 0; node != kRoot; ++steps) {
      if (steps > n) throw DataError("cycle through token " + std::to_string(m));
      node = heads[node];
    }
  }
}

bool is_valid_tree(const Sentence& s, bool single_root) {
  try {
    validate_tree(s, single_root);
    return true;
  } catch (const DataError&) {
    return false;
  }
}

PartialTree PartialTree::from_sentence(Sentence sentence) {
  PartialTree pt;
  for (const auto& t : sentence.tokens)
    if (t.head) ++pt.attached;
  pt.sentence = std::move(sentence);
  pt.full_projective = pt.sentence.size() > 0 && pt.attached == pt.sentence.size() &&
                       is_valid_tree(pt.sentence, true) && is_projective(pt.sentence);
  return pt;
}

double PartialTree::density() const {
  if (sentence.tokens.empty()) return 0.0;
  return static_cast<double>(attached) / static_cast<double>(sentence.size());
}

bool PartialTree::density_at_least(int percent) const {
  return static_cast<long long>(attached) * 100 >=
         static_cast<long long>(percent) * sentence.size();
}

MonolingualCorpus read_tokenized_corpus(std::istream& in) {
  MonolingualCorpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#' && line.rfind("# ", 0) == 0) continue;
    auto toks = split_whitespace(line);
    if (!toks.empty()) corpus.push_back(std::move(toks));
  }
  return corpus;
}

MonolingualCorpus read_tokenized_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_tokenized_corpus(in);
}

void write_tokenized_corpus(std::ostream& out, const MonolingualCorpus& corpus) {
  for (const auto& s : corpus) out << join(s, " ") << '\n';
}

Sentence with_own_lexforms(Sentence s) {
  for (auto& t : s.tokens) t.lexform = t.form;
  return s;
}

Treebank with_own_lexforms(Treebank tb) {
  for (auto& s : tb.sentences) s = with_own_lexforms(std::move(s));
  return tb;
}

Sentence strip_tree(Sentence s) {
  for (auto& t : s.tokens) {
    t.head.reset();
    t.deprel.reset();
  }
  return s;
}

}  // namespace xlparse
