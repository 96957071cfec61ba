// Arc-eager transition system: configurations, actions, legality with
// optional projected-arc constraints, the static oracle, and tree
// read-off.

#ifndef XLPARSE_TRANSITION_H_
#define XLPARSE_TRANSITION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "xlparse/treebank.h"

namespace xlparse {

// Dependency-label alphabet. Label ids are dense and stable in insertion
// order; that order is the label tie-break order during decoding.
class LabelAlphabet {
 public:
  LabelAlphabet() = default;
  explicit LabelAlphabet(const std::vector<std::string>& labels);

  int add(const std::string& label);
  // Throws DataError for unknown labels.
  int id(const std::string& label) const;
  std::optional<int> find(const std::string& label) const;
  const std::string& name(int id) const { return labels_.at(id); }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const LabelAlphabet& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

// Labels of every token in the treebank, sorted.
LabelAlphabet collect_labels(const Treebank& treebank);
void add_labels(LabelAlphabet& alphabet, const Treebank& treebank);

// Ordinal order is the decoder's tie-break order.
enum class ActionKind : std::uint8_t { kShift = 0, kReduce = 1, kLeftArc = 2, kRightArc = 3 };

struct Action {
  ActionKind kind = ActionKind::kShift;
  int label = -1;  // present iff LEFT_ARC / RIGHT_ARC

  static Action shift() { return {ActionKind::kShift, -1}; }
  static Action reduce() { return {ActionKind::kReduce, -1}; }
  static Action left(int label) { return {ActionKind::kLeftArc, label}; }
  static Action right(int label) { return {ActionKind::kRightArc, label}; }

  bool creates_arc() const {
    return kind == ActionKind::kLeftArc || kind == ActionKind::kRightArc;
  }
  bool operator==(const Action&) const = default;
};

// Dense action index: SHIFT=0, REDUCE=1, LEFT(l)=2+l, RIGHT(l)=2+L+l.
int action_index(const Action& a, int num_labels);
Action action_from_index(int index, int num_labels);
inline int num_actions(int num_labels) { return 2 + 2 * num_labels; }
std::string to_string(const Action& a, const LabelAlphabet& labels);

// Small set of action kinds.
class KindSet {
 public:
  void insert(ActionKind k) { bits_ |= bit(k); }
  void erase(ActionKind k) { bits_ &= static_cast<std::uint8_t>(~bit(k)); }
  bool contains(ActionKind k) const { return bits_ & bit(k); }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcount(bits_); }
  bool operator==(const KindSet&) const = default;

 private:
  static std::uint8_t bit(ActionKind k) { return static_cast<std::uint8_t>(1u << static_cast<int>(k)); }
  std::uint8_t bits_ = 0;
};

struct Configuration {
  std::vector<int> stack;  // bottom is ROOT (0)
  int next = 1;            // buffer front; the buffer is [next, n]
  int n = 0;
  std::vector<int> head;   // size n+1, -1 = none
  std::vector<int> label;  // size n+1, -1 = none

  bool terminal() const { return next > n; }
  int stack_top() const { return stack.back(); }
  bool has_head(int i) const { return head[i] >= 0; }
  bool in_buffer(int i) const { return i >= next && i <= n; }
  std::vector<int> buffer() const;

  bool operator==(const Configuration&) const = default;
};

struct ArcConstraint {
  int head = -1;
  int label = -1;  // -1: any label
};

// Required heads per token, typically read off a projected PartialTree.
struct ArcConstraints {
  std::vector<std::optional<ArcConstraint>> required;  // size n+1

  // Takes every present head (and label, when it is in the alphabet).
  static ArcConstraints from_sentence(const Sentence& sentence, const LabelAlphabet& labels);
  bool empty() const;
};

Configuration initial_config(const Sentence& sentence);
Configuration initial_config(int num_tokens);

// Standard arc-eager legality. With constraints, arc-creating kinds that
// contradict a required head are removed, and among what remains only the
// kinds that lose the fewest still-reachable constraint arcs are kept
// (zero whenever the constraints extend to a projective tree). SHIFT is
// never contradicting, so the set is never empty. Throws on terminal
// configurations.
KindSet legal_kinds(const Configuration& c, const ArcConstraints* constraints = nullptr);

// Label-level check on top of legal_kinds.
bool is_allowed(const Configuration& c, const Action& a, const ArcConstraints* constraints = nullptr);

// Every allowed labelled action, in ordinal order.
std::vector<Action> allowed_actions(const Configuration& c, int num_labels,
                                    const ArcConstraints* constraints = nullptr);

// Throws DataError when the action is illegal (unconstrained rules).
Configuration apply(const Configuration& c, const Action& a);
// Same, without the legality check. For hot loops that already filtered.
void apply_in_place(Configuration& c, const Action& a);

// Canonical next action for a projective gold tree. Throws DataError
// ("oracle undefined") if the gold tree is not projective.
Action static_oracle(const Configuration& c, const Sentence& gold, const LabelAlphabet& labels);
std::vector<Action> oracle_sequence(const Sentence& gold, const LabelAlphabet& labels);

// Reads heads/labels off the arcs; unattached tokens go to ROOT with
// fallback_label.
Sentence config_to_tree(const Configuration& c, const Sentence& sentence,
                        const LabelAlphabet& labels, const std::string& fallback_label = "dep");

}  // namespace xlparse

#endif  // XLPARSE_TRANSITION_H_
