#include "xlparse/features.h"

#include <algorithm>
#include <array>

#include "xlparse/clustering.h"
#include "xlparse/common.h"

namespace xlparse {

namespace {

constexpr int kNumSlots = 15;

const char* slot_name(Slot s) {
  static const char* names[kNumSlots] = {"S0",  "S1",   "S2",  "N0",   "N1",  "N2",   "N3",  "S0h",
                                         "S0h2", "S0l", "S0l2", "S0r", "S0r2", "N0l", "N0l2"};
  return names[static_cast<int>(s)];
}

const char* attr_name(Attr a) {
  static const char* names[] = {"p", "w", "l", "d", "vr", "vl", "sr", "sl", "x4", "x6", "xf", "cf"};
  return names[static_cast<int>(a)];
}

Slot parse_slot(const std::string& s) {
  for (int i = 0; i < kNumSlots; ++i)
    if (s == slot_name(static_cast<Slot>(i))) return static_cast<Slot>(i);
  throw Error("bad template slot " + s);
}

Attr parse_attr(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Attr::kCF); ++i)
    if (s == attr_name(static_cast<Attr>(i))) return static_cast<Attr>(i);
  throw Error("bad template attribute " + s);
}

// Base inventory. Each line is one template; atoms are "slot:attr".
// Unlexicalized (family P).
const char* const kPosTemplates[] = {
    // single positions
    "S0:p", "N0:p", "N1:p", "N2:p", "N3:p", "S1:p", "S2:p",
    // pairs
    "S0:p N0:p", "N0:p N1:p", "S1:p S0:p",
    // triples
    "N0:p N1:p N2:p", "S0:p N0:p N1:p", "S0h:p S0:p N0:p", "S0:p S0l:p N0:p",
    "S0:p S0r:p N0:p", "S0:p N0:p N0l:p", "S1:p S0:p N0:p",
    // distance
    "S0:p S0:d", "N0:p S0:d", "S0:p N0:p S0:d",
    // valency
    "S0:p S0:vr", "S0:p S0:vl", "N0:p N0:vl",
    // unigrams
    "S0h:p", "S0:l", "S0l:p", "S0l:l", "S0r:p", "S0r:l", "N0l:p", "N0l:l",
    // third order
    "S0h2:p", "S0h:l", "S0l2:p", "S0l2:l", "S0r2:p", "S0r2:l", "N0l2:p", "N0l2:l",
    "S0:p S0l:p S0l2:p", "S0:p S0r:p S0r2:p", "S0:p S0h:p S0h2:p", "N0:p N0l:p N0l2:p",
    // label sets
    "S0:p S0:sr", "S0:p S0:sl", "N0:p N0:sl",
};

// Lexicalized (family L); "w" reads Token::lexform.
const char* const kLexTemplates[] = {
    "S0:w S0:p", "S0:w", "N0:w N0:p", "N0:w", "N1:w N1:p", "N1:w", "N2:w N2:p", "N2:w",
    "S0:w S0:p N0:w N0:p", "S0:w S0:p N0:w", "S0:w N0:w N0:p", "S0:w S0:p N0:p",
    "S0:p N0:w N0:p", "S0:w N0:w",
    "S0:w S0:d", "N0:w S0:d", "S0:w N0:w S0:d",
    "S0:w S0:vr", "S0:w S0:vl", "N0:w N0:vl",
    "S0h:w", "S0l:w", "S0r:w", "N0l:w",
    "S0h2:w", "S0l2:w", "S0r2:w", "N0l2:w",
    "S0:w S0:sr", "S0:w S0:sl", "N0:w N0:sl",
};

std::vector<Atom> parse_atoms(const std::string& line) {
  std::vector<Atom> atoms;
  for (const auto& tok : split_whitespace(line)) {
    auto parts = split(tok, ':');
    atoms.push_back({parse_slot(parts.at(0)), parse_attr(parts.at(1))});
  }
  return atoms;
}

std::string render_name(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += '.';
    out += slot_name(atoms[i].slot);
    out += attr_name(atoms[i].attr);
  }
  return out;
}

bool at_s0_or_n0(Slot s) { return s == Slot::kS0 || s == Slot::kN0; }

struct Inventory {
  std::vector<FeatureTemplate> templates;
  std::array<std::pair<int, int>, 3> ranges;
};

Inventory build_inventory() {
  Inventory inv;
  auto add = [&](Family f, std::vector<Atom> atoms) {
    const int id = static_cast<int>(inv.templates.size());
    std::string name = render_name(atoms);
    inv.templates.push_back({id, f, std::move(atoms), std::move(name)});
  };
  std::vector<std::vector<Atom>> pos_base, lex_base;
  for (const char* t : kPosTemplates) pos_base.push_back(parse_atoms(t));
  for (const char* t : kLexTemplates) lex_base.push_back(parse_atoms(t));

  int begin = 0;
  for (auto& a : pos_base) add(Family::kPos, a);
  inv.ranges[static_cast<int>(Family::kPos)] = {begin, static_cast<int>(inv.templates.size())};
  begin = static_cast<int>(inv.templates.size());
  for (auto& a : lex_base) add(Family::kLexical, a);
  inv.ranges[static_cast<int>(Family::kLexical)] = {begin, static_cast<int>(inv.templates.size())};
  begin = static_cast<int>(inv.templates.size());

  // POS tests at S0/N0 are re-emitted with 4- and 6-bit cross-lingual
  // prefixes, over the cross product of slot choices.
  for (const auto& base : pos_base) {
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (base[i].attr == Attr::kPos && at_s0_or_n0(base[i].slot)) slots.push_back(i);
    if (slots.empty()) continue;
    int combos = 1;
    for (std::size_t i = 0; i < slots.size(); ++i) combos *= 3;
    for (int code = 1; code < combos; ++code) {
      auto atoms = base;
      int rest = code;
      for (std::size_t k = 0; k < slots.size(); ++k) {
        const int choice = rest % 3;
        rest /= 3;
        if (choice == 1) atoms[slots[k]].attr = Attr::kX4;
        if (choice == 2) atoms[slots[k]].attr = Attr::kX6;
      }
      add(Family::kCluster, atoms);
    }
  }
  // Word tests at S0/N0 are re-emitted with the full cluster string of
  // the cross-lingual (surface form) and monolingual (lexform) clusterings.
  for (const auto& base : lex_base) {
    bool all_at_zero = true, any_word = false;
    for (const auto& a : base)
      if (a.attr == Attr::kWord) {
        any_word = true;
        all_at_zero = all_at_zero && at_s0_or_n0(a.slot);
      }
    if (!any_word || !all_at_zero) continue;
    for (Attr repl : {Attr::kXF, Attr::kCF}) {
      auto atoms = base;
      for (auto& a : atoms)
        if (a.attr == Attr::kWord) a.attr = repl;
      add(Family::kCluster, atoms);
    }
  }
  inv.ranges[static_cast<int>(Family::kCluster)] = {begin, static_cast<int>(inv.templates.size())};
  return inv;
}

const Inventory& inventory() {
  static const Inventory inv = build_inventory();
  return inv;
}

constexpr std::uint64_t kRootTag = 0x726f6f74ULL;

std::uint64_t number_hash(std::uint64_t tag, long v) {
  return hash_combine(tag, static_cast<std::uint64_t>(v) + 0x1234567ULL);
}

int distance_bucket(int d) {
  if (d <= 4) return d;
  if (d <= 9) return 5;
  return 10;
}

// Slot positions and child information for one configuration.
struct Resolved {
  std::array<int, kNumSlots> pos;
  std::vector<int> s0_left, s0_right, n0_left;  // children, left-to-right
  int s0 = -1, n0 = -1;
};

Resolved resolve(const Configuration& c) {
  Resolved r;
  r.pos.fill(-1);
  const auto& st = c.stack;
  const int depth = static_cast<int>(st.size());
  auto set = [&](Slot s, int v) { r.pos[static_cast<int>(s)] = v; };
  if (depth >= 1) set(Slot::kS0, st[depth - 1]);
  if (depth >= 2) set(Slot::kS1, st[depth - 2]);
  if (depth >= 3) set(Slot::kS2, st[depth - 3]);
  for (int k = 0; k < 4; ++k)
    if (c.next + k <= c.n) r.pos[static_cast<int>(Slot::kN0) + k] = c.next + k;
  r.s0 = r.pos[static_cast<int>(Slot::kS0)];
  r.n0 = r.pos[static_cast<int>(Slot::kN0)];
  if (r.s0 > 0 && c.head[r.s0] >= 0) {
    const int h = c.head[r.s0];
    set(Slot::kS0h, h);
    if (h > 0 && c.head[h] >= 0) set(Slot::kS0h2, c.head[h]);
  }
  for (int m = 1; m <= c.n; ++m) {
    const int h = c.head[m];
    if (h < 0) continue;
    if (h == r.s0) (m < r.s0 ? r.s0_left : r.s0_right).push_back(m);
    if (h == r.n0 && r.n0 >= 0 && m < r.n0) r.n0_left.push_back(m);
  }
  if (r.s0 >= 0) {
    if (!r.s0_left.empty()) set(Slot::kS0l, r.s0_left[0]);
    if (r.s0_left.size() >= 2) set(Slot::kS0l2, r.s0_left[1]);
    if (!r.s0_right.empty()) set(Slot::kS0r, r.s0_right.back());
    if (r.s0_right.size() >= 2) set(Slot::kS0r2, r.s0_right[r.s0_right.size() - 2]);
  }
  if (r.n0 >= 0) {
    if (!r.n0_left.empty()) set(Slot::kN0l, r.n0_left[0]);
    if (r.n0_left.size() >= 2) set(Slot::kN0l2, r.n0_left[1]);
  }
  return r;
}

const std::vector<int>* children_of(const Resolved& r, Slot s, bool right) {
  if (s == Slot::kS0) return right ? &r.s0_right : &r.s0_left;
  if (s == Slot::kN0) return right ? nullptr : &r.n0_left;
  return nullptr;
}

std::vector<int> sorted_labels(const Configuration& c, const std::vector<int>* kids) {
  std::vector<int> labels;
  if (kids)
    for (int k : *kids) labels.push_back(c.label[k]);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

FeatureContext::Value atom_value(const FeatureContext& ctx, const Configuration& c,
                                 const Resolved& r, const Atom& a) {
  using V = FeatureContext::Value;
  if (a.attr == Attr::kDist) {
    if (r.s0 < 0 || r.n0 < 0) return {};
    return V{number_hash(0xd157, distance_bucket(r.n0 - r.s0)), true};
  }
  const int i = r.pos[static_cast<int>(a.slot)];
  if (i < 0) return {};
  const auto& tv = ctx.values(i);
  switch (a.attr) {
    case Attr::kPos: return tv.pos;
    case Attr::kWord: return tv.word;
    case Attr::kX4: return tv.x4;
    case Attr::kX6: return tv.x6;
    case Attr::kXF: return tv.xf;
    case Attr::kCF: return tv.cf;
    case Attr::kLabel: return V{i > 0 ? ctx.label_hash(c.label[i]) : ctx.label_hash(-1), true};
    case Attr::kValR:
    case Attr::kValL: {
      const auto* kids = children_of(r, a.slot, a.attr == Attr::kValR);
      return V{number_hash(0x7a1, kids ? static_cast<long>(kids->size()) : 0), true};
    }
    case Attr::kSetR:
    case Attr::kSetL: {
      std::uint64_t h = 0x5e7;
      for (int l : sorted_labels(c, children_of(r, a.slot, a.attr == Attr::kSetR)))
        h = hash_combine(h, ctx.label_hash(l));
      return V{h, true};
    }
    case Attr::kDist: break;
  }
  return {};
}

std::string atom_string(const FeatureContext& ctx, const Configuration& c, const Resolved& r,
                        const Atom& a) {
  if (a.attr == Attr::kDist) return std::to_string(distance_bucket(r.n0 - r.s0));
  const int i = r.pos[static_cast<int>(a.slot)];
  const auto& ts = ctx.strings(i);
  switch (a.attr) {
    case Attr::kPos: return ts.pos;
    case Attr::kWord: return ts.word;
    case Attr::kX4: return ts.x4;
    case Attr::kX6: return ts.x6;
    case Attr::kXF: return ts.xf;
    case Attr::kCF: return ts.cf;
    case Attr::kLabel: return ctx.label_name(i > 0 ? c.label[i] : -1);
    case Attr::kValR:
    case Attr::kValL: {
      const auto* kids = children_of(r, a.slot, a.attr == Attr::kValR);
      return std::to_string(kids ? kids->size() : 0);
    }
    case Attr::kSetR:
    case Attr::kSetL: {
      std::vector<std::string> names;
      for (int l : sorted_labels(c, children_of(r, a.slot, a.attr == Attr::kSetR)))
        names.push_back(ctx.label_name(l));
      return "{" + join(names, ",") + "}";
    }
    case Attr::kDist: break;
  }
  return "";
}

template <typename Emit>
void for_each_feature(const FeatureContext& ctx, const Configuration& c, const TemplateSet& ts,
                      const Resolved& r, Emit&& emit) {
  const auto& inv = inventory();
  for (Family f : {Family::kPos, Family::kLexical, Family::kCluster}) {
    if (!ts.enabled(f)) continue;
    const auto [begin, end] = inv.ranges[static_cast<int>(f)];
    for (int id = begin; id < end; ++id) {
      const auto& t = inv.templates[id];
      std::uint64_t h = hash_combine(0xfea7ULL, static_cast<std::uint64_t>(id));
      bool ok = true;
      for (const auto& a : t.atoms) {
        const auto v = atom_value(ctx, c, r, a);
        if (!v.present) {
          ok = false;
          break;
        }
        h = hash_combine(h, v.hash);
      }
      if (ok) emit(t, FeatureId{static_cast<std::uint32_t>(id), h});
    }
  }
}

}  // namespace

const std::vector<FeatureTemplate>& feature_templates() { return inventory().templates; }

std::pair<int, int> family_range(Family f) { return inventory().ranges[static_cast<int>(f)]; }

Family family_of(int template_id) { return inventory().templates.at(template_id).family; }

bool TemplateSet::enabled(Family f) const {
  switch (f) {
    case Family::kPos: return pos;
    case Family::kCluster: return cluster;
    case Family::kLexical: return lexical;
  }
  return false;
}

std::string TemplateSet::to_string() const {
  std::vector<std::string> parts;
  if (pos) parts.push_back("P");
  if (cluster) parts.push_back("C");
  if (lexical) parts.push_back("L");
  return join(parts, "+");
}

TemplateSet TemplateSet::parse(const std::string& s) {
  TemplateSet t{false, false, false};
  for (const auto& p : split(s, '+')) {
    if (p == "P")
      t.pos = true;
    else if (p == "C")
      t.cluster = true;
    else if (p == "L")
      t.lexical = true;
    else
      throw DataError("bad feature family list '" + s + "'");
  }
  return t;
}

std::string cluster_prefix(const std::string& bits, int level) {
  if (bits.empty()) throw DataError("cluster_prefix: empty bit-string");
  if (level < 1) throw DataError("cluster_prefix: level must be >= 1");
  return bits.substr(0, std::min<std::size_t>(static_cast<std::size_t>(level), bits.size()));
}

FeatureContext::FeatureContext(const Sentence& s, const ClusterSet& clusters,
                               const LabelAlphabet& labels) {
  const int n = s.size();
  values_.resize(n + 1);
  strings_.resize(n + 1);
  auto val = [](const std::string& str, std::uint64_t tag) {
    return Value{hash_combine(tag, hash_string(str)), true};
  };
  {
    auto& v = values_[0];
    auto& st = strings_[0];
    const std::string root = "<ROOT>";
    // ROOT has a POS value only, so families C and L never fire on it.
    v.pos = Value{hash_combine(kRootTag, hash_string(root)), true};
    st.pos = root;
  }
  for (int i = 1; i <= n; ++i) {
    const auto& t = s.at(i);
    auto& v = values_[i];
    auto& st = strings_[i];
    v.pos = val(t.upos, 1);
    st.pos = t.upos;
    if (t.lexform) {
      v.word = val(*t.lexform, 2);
      st.word = *t.lexform;
    }
    if (clusters.crosslingual) {
      if (const std::string* bits = clusters.crosslingual->lookup(t.form)) {
        st.x4 = cluster_prefix(*bits, 4);
        st.x6 = cluster_prefix(*bits, 6);
        st.xf = *bits;
        v.x4 = val(st.x4, 3);
        v.x6 = val(st.x6, 4);
        v.xf = val(st.xf, 5);
      }
    }
    if (clusters.monolingual && t.lexform) {
      if (const std::string* bits = clusters.monolingual->lookup(*t.lexform)) {
        st.cf = *bits;
        v.cf = val(st.cf, 6);
      }
    }
  }
  label_names_ = labels.labels();
  for (const auto& l : label_names_) label_hashes_.push_back(hash_combine(7, hash_string(l)));
}

std::uint64_t FeatureContext::label_hash(int label) const {
  if (label < 0) return 0x6e6f6e65ULL;
  return label_hashes_.at(label);
}

const std::string& FeatureContext::label_name(int label) const {
  static const std::string none = "<none>";
  if (label < 0) return none;
  return label_names_.at(label);
}

void extract_features(const FeatureContext& ctx, const Configuration& c, const TemplateSet& ts,
                      std::vector<FeatureId>& out) {
  const Resolved r = resolve(c);
  for_each_feature(ctx, c, ts, r, [&](const FeatureTemplate&, FeatureId f) { out.push_back(f); });
}

std::vector<FeatureId> extract_features(const FeatureContext& ctx, const Configuration& c,
                                        const TemplateSet& ts) {
  std::vector<FeatureId> out;
  extract_features(ctx, c, ts, out);
  return out;
}

std::vector<std::pair<FeatureId, std::string>> describe_features(const FeatureContext& ctx,
                                                                 const Configuration& c,
                                                                 const TemplateSet& ts) {
  const Resolved r = resolve(c);
  std::vector<std::pair<FeatureId, std::string>> out;
  for_each_feature(ctx, c, ts, r, [&](const FeatureTemplate& t, FeatureId f) {
    std::vector<std::string> vals;
    for (const auto& a : t.atoms) vals.push_back(atom_string(ctx, c, r, a));
    out.emplace_back(f, t.name + "=" + join(vals, "|"));
  });
  return out;
}

}  // namespace xlparse
