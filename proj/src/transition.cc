#include "xlparse/transition.h"

#include <algorithm>
#include <set>

#include "xlparse/common.h"

namespace xlparse {

LabelAlphabet::LabelAlphabet(const std::vector<std::string>& labels) {
  for (const auto& l : labels) add(l);
}

int LabelAlphabet::add(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  const int id = size();
  labels_.push_back(label);
  index_.emplace(label, id);
  return id;
}

int LabelAlphabet::id(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw DataError("unknown dependency label '" + label + "'");
  return it->second;
}

std::optional<int> LabelAlphabet::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelAlphabet collect_labels(const Treebank& tb) {
  std::set<std::string> labels;
  for (const auto& s : tb.sentences)
    for (const auto& t : s.tokens)
      if (t.deprel) labels.insert(*t.deprel);
  return LabelAlphabet(std::vector<std::string>(labels.begin(), labels.end()));
}

void add_labels(LabelAlphabet& alphabet, const Treebank& tb) {
  for (const auto& l : collect_labels(tb).labels()) alphabet.add(l);
}

int action_index(const Action& a, int num_labels) {
  switch (a.kind) {
    case ActionKind::kShift: return 0;
    case ActionKind::kReduce: return 1;
    case ActionKind::kLeftArc: return 2 + a.label;
    case ActionKind::kRightArc: return 2 + num_labels + a.label;
  }
  return -1;
}

Action action_from_index(int index, int num_labels) {
  if (index == 0) return Action::shift();
  if (index == 1) return Action::reduce();
  if (index < 2 + num_labels) return Action::left(index - 2);
  return Action::right(index - 2 - num_labels);
}

std::string to_string(const Action& a, const LabelAlphabet& labels) {
  switch (a.kind) {
    case ActionKind::kShift: return "SHIFT";
    case ActionKind::kReduce: return "REDUCE";
    case ActionKind::kLeftArc: return "LEFT_ARC(" + labels.name(a.label) + ")";
    case ActionKind::kRightArc: return "RIGHT_ARC(" + labels.name(a.label) + ")";
  }
  return "?";
}

std::vector<int> Configuration::buffer() const {
  std::vector<int> b;
  for (int i = next; i <= n; ++i) b.push_back(i);
  return b;
}

ArcConstraints ArcConstraints::from_sentence(const Sentence& s, const LabelAlphabet& labels) {
  ArcConstraints c;
  c.required.resize(s.tokens.size() + 1);
  for (const auto& t : s.tokens) {
    if (!t.head) continue;
    ArcConstraint ac;
    ac.head = *t.head;
    if (t.deprel) {
      if (auto id = labels.find(*t.deprel)) ac.label = *id;
    }
    c.required[t.index] = ac;
  }
  return c;
}

bool ArcConstraints::empty() const {
  return std::none_of(required.begin(), required.end(), [](const auto& r) { return r.has_value(); });
}

Configuration initial_config(int n) {
  if (n <= 0) throw DataError("cannot parse an empty sentence");
  Configuration c;
  c.stack = {kRoot};
  c.next = 1;
  c.n = n;
  c.head.assign(n + 1, -1);
  c.label.assign(n + 1, -1);
  return c;
}

Configuration initial_config(const Sentence& s) { return initial_config(s.size()); }

namespace {

KindSet base_legal(const Configuration& c) {
  KindSet k;
  const int s = c.stack_top();
  k.insert(ActionKind::kShift);
  k.insert(ActionKind::kRightArc);
  if (s != kRoot && !c.has_head(s)) k.insert(ActionKind::kLeftArc);
  if (c.has_head(s)) k.insert(ActionKind::kReduce);
  return k;
}

// (head, modifier) the kind would create, or nullopt.
std::optional<std::pair<int, int>> arc_of(const Configuration& c, ActionKind k) {
  if (k == ActionKind::kLeftArc) return std::make_pair(c.next, c.stack_top());
  if (k == ActionKind::kRightArc) return std::make_pair(c.stack_top(), c.next);
  return std::nullopt;
}

bool in_stack(const Configuration& c, int i) {
  return std::find(c.stack.begin(), c.stack.end(), i) != c.stack.end();
}

// An unattached arc (h, m) can still be built iff m is in the buffer and
// h is in the stack or buffer, or m is in the stack and h in the buffer.
bool reachable(const Configuration& c, int h, int m) {
  if (c.has_head(m)) return false;
  if (c.in_buffer(m)) return c.in_buffer(h) || in_stack(c, h);
  if (in_stack(c, m)) return c.in_buffer(h);
  return false;
}

int constraint_cost(const Configuration& c, ActionKind k, const ArcConstraints& cons) {
  Configuration after = c;
  apply_in_place(after, Action{k, k == ActionKind::kLeftArc || k == ActionKind::kRightArc ? 0 : -1});
  int lost = 0;
  for (int m = 1; m <= c.n; ++m) {
    const auto& r = cons.required[m];
    if (!r) continue;
    if (!reachable(c, r->head, m)) continue;
    if (after.head[m] == r->head) continue;
    if (!reachable(after, r->head, m)) ++lost;
  }
  return lost;
}

bool contradicts(const Configuration& c, ActionKind k, const ArcConstraints& cons) {
  auto arc = arc_of(c, k);
  if (!arc) return false;
  const auto& r = cons.required[arc->second];
  return r && r->head != arc->first;
}

}  // namespace

KindSet legal_kinds(const Configuration& c, const ArcConstraints* cons) {
  if (c.terminal()) throw DataError("no legal actions in a terminal configuration");
  KindSet k = base_legal(c);
  if (!cons || cons->required.empty()) return k;
  if (static_cast<int>(cons->required.size()) != c.n + 1)
    throw DataError("arc constraints do not match the sentence length");
  const ActionKind kinds[] = {ActionKind::kShift, ActionKind::kReduce, ActionKind::kLeftArc,
                              ActionKind::kRightArc};
  for (auto kind : kinds)
    if (k.contains(kind) && contradicts(c, kind, *cons)) k.erase(kind);
  int best = -1;
  int costs[4] = {0, 0, 0, 0};
  for (auto kind : kinds) {
    if (!k.contains(kind)) continue;
    costs[static_cast<int>(kind)] = constraint_cost(c, kind, *cons);
    if (best < 0 || costs[static_cast<int>(kind)] < best) best = costs[static_cast<int>(kind)];
  }
  for (auto kind : kinds)
    if (k.contains(kind) && costs[static_cast<int>(kind)] > best) k.erase(kind);
  return k;
}

bool is_allowed(const Configuration& c, const Action& a, const ArcConstraints* cons) {
  if (c.terminal()) return false;
  if (!legal_kinds(c, cons).contains(a.kind)) return false;
  if (a.creates_arc() && cons && !cons->required.empty()) {
    auto arc = arc_of(c, a.kind);
    const auto& r = cons->required[arc->second];
    if (r && r->label >= 0 && r->label != a.label) return false;
  }
  return true;
}

std::vector<Action> allowed_actions(const Configuration& c, int num_labels,
                                    const ArcConstraints* cons) {
  std::vector<Action> out;
  const KindSet k = legal_kinds(c, cons);
  if (k.contains(ActionKind::kShift)) out.push_back(Action::shift());
  if (k.contains(ActionKind::kReduce)) out.push_back(Action::reduce());
  const bool constrained = cons && !cons->required.empty();
  for (ActionKind kind : {ActionKind::kLeftArc, ActionKind::kRightArc}) {
    if (!k.contains(kind)) continue;
    int fixed = -1;
    if (constrained) {
      const auto arc = arc_of(c, kind);
      const auto& r = cons->required[arc->second];
      if (r) fixed = r->label;
    }
    for (int l = 0; l < num_labels; ++l)
      if (fixed < 0 || fixed == l) out.push_back(Action{kind, l});
  }
  return out;
}

void apply_in_place(Configuration& c, const Action& a) {
  switch (a.kind) {
    case ActionKind::kShift:
      c.stack.push_back(c.next++);
      break;
    case ActionKind::kReduce:
      c.stack.pop_back();
      break;
    case ActionKind::kLeftArc: {
      const int s = c.stack_top();
      c.head[s] = c.next;
      c.label[s] = a.label;
      c.stack.pop_back();
      break;
    }
    case ActionKind::kRightArc: {
      const int s = c.stack_top();
      c.head[c.next] = s;
      c.label[c.next] = a.label;
      c.stack.push_back(c.next++);
      break;
    }
  }
}

Configuration apply(const Configuration& c, const Action& a) {
  if (c.terminal()) throw DataError("cannot apply an action to a terminal configuration");
  if (!base_legal(c).contains(a.kind))
    throw DataError("illegal action in configuration (stack top " + std::to_string(c.stack_top()) + ")");
  if (a.creates_arc() && a.label < 0) throw DataError("arc action without a label");
  Configuration out = c;
  apply_in_place(out, a);
  return out;
}

namespace {

Action oracle_unchecked(const Configuration& c, const std::vector<int>& gold_head,
                        const std::vector<int>& gold_label) {
  const int s = c.stack_top();
  const int b = c.next;
  if (s != kRoot && !c.has_head(s) && gold_head[s] == b) return Action::left(gold_label[s]);
  if (gold_head[b] == s) return Action::right(gold_label[b]);
  if (c.has_head(s)) {
    for (std::size_t i = 0; i + 1 < c.stack.size(); ++i) {
      const int k = c.stack[i];
      if (gold_head[b] == k || (k != kRoot && gold_head[k] == b)) return Action::reduce();
    }
  }
  return Action::shift();
}

void gold_arrays(const Sentence& gold, const LabelAlphabet& labels, std::vector<int>* heads,
                 std::vector<int>* lab) {
  if (!gold.has_all_heads()) throw DataError("oracle undefined: gold tree has missing heads");
  if (!is_projective(gold)) throw DataError("oracle undefined: gold tree is not projective");
  *heads = gold.heads();
  lab->assign(gold.tokens.size() + 1, -1);
  for (const auto& t : gold.tokens) (*lab)[t.index] = labels.id(t.deprel.value_or("dep"));
}

}  // namespace

Action static_oracle(const Configuration& c, const Sentence& gold, const LabelAlphabet& labels) {
  if (c.terminal()) throw DataError("oracle called on a terminal configuration");
  std::vector<int> heads, lab;
  gold_arrays(gold, labels, &heads, &lab);
  return oracle_unchecked(c, heads, lab);
}

std::vector<Action> oracle_sequence(const Sentence& gold, const LabelAlphabet& labels) {
  std::vector<int> heads, lab;
  gold_arrays(gold, labels, &heads, &lab);
  Configuration c = initial_config(gold);
  std::vector<Action> seq;
  while (!c.terminal()) {
    Action a = oracle_unchecked(c, heads, lab);
    apply_in_place(c, a);
    seq.push_back(a);
  }
  for (int m = 1; m <= c.n; ++m)
    if (c.head[m] != heads[m])
      throw DataError("oracle failed to reconstruct the gold tree (token " + std::to_string(m) + ")");
  return seq;
}

Sentence config_to_tree(const Configuration& c, const Sentence& sentence,
                        const LabelAlphabet& labels, const std::string& fallback_label) {
  Sentence out = sentence;
  for (auto& t : out.tokens) {
    const int i = t.index;
    if (c.head[i] >= 0) {
      t.head = c.head[i];
      t.deprel = labels.name(c.label[i]);
    } else {
      t.head = kRoot;
      t.deprel = fallback_label;
    }
  }
  return out;
}

}  // namespace xlparse
