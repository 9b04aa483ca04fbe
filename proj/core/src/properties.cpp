#include "tensorkernel/properties.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace tk {

int permutation_sign(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    std::size_t j = i;
    while (!seen[j]) {
      seen[j] = true;
      j = static_cast<std::size_t>(perm[j]);
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

void TableauSpec::validate() const {
  for (std::size_t i = 1; i < shape.size(); ++i)
    if (shape[i] > shape[i - 1])
      throw Error("tableau shape must be weakly decreasing");
  if (static_cast<int>(slot_order.size()) != cell_count())
    throw Error("tableau slot_order size does not match shape");
  std::vector<int> sorted = slot_order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i))
      throw Error("tableau slot_order must be a permutation of 0..n-1");
}

PropertyTable::PropertyTable() { anonymous_.name = ""; }

void PropertyTable::declare_indices(const std::string& set_name,
                                    const std::vector<std::string>& members,
                                    const std::vector<std::string>& families) {
  auto it = set_index_.find(set_name);
  if (it != set_index_.end()) {
    IndexSet& s = sets_[it->second];
    for (const auto& m : members)
      if (std::find(s.members.begin(), s.members.end(), m) == s.members.end())
        s.members.push_back(m);
    for (const auto& f : families)
      if (std::find(s.families.begin(), s.families.end(), f) == s.families.end())
        s.families.push_back(f);
    return;
  }
  IndexSet s;
  s.name = set_name;
  s.members = members;
  s.families = families;
  set_index_[set_name] = static_cast<int>(sets_.size());
  sets_.push_back(std::move(s));
}

void PropertyTable::declare_integer_range(const std::vector<std::string>& names, int lo,
                                          int hi) {
  if (hi < lo) throw Error("empty integer range");
  if (sets_.empty()) {
    // Range on anonymous names gives the anonymous set a dimension.
    for (const auto& n : names) resolve_index(n);
    anonymous_.range = {lo, hi};
    return;
  }
  std::optional<int> set_idx;
  for (const auto& n : names) {
    auto set = lookup_index(n);
    if (!set) throw UnknownProperty("Integer range on undeclared index '" + n + "'");
    int idx = set_index_.at(*set);
    if (set_idx && *set_idx != idx)
      throw ConflictingProperty("Integer range spans several index sets");
    set_idx = idx;
  }
  sets_[*set_idx].range = {lo, hi};
}

std::optional<std::string> PropertyTable::lookup_index(const std::string& name) const {
  for (const auto& s : sets_) {
    if (std::find(s.members.begin(), s.members.end(), name) != s.members.end())
      return s.name;
    for (const auto& fam : s.families) {
      if (name.size() > fam.size() && name.compare(0, fam.size(), fam) == 0) {
        bool digits = true;
        for (std::size_t i = fam.size(); i < name.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
        if (digits) return s.name;
      }
    }
  }
  if (std::find(anonymous_.members.begin(), anonymous_.members.end(), name) !=
      anonymous_.members.end())
    return std::string("");
  return std::nullopt;
}

std::optional<std::string> PropertyTable::resolve_index(const std::string& name) {
  auto found = lookup_index(name);
  if (found) return found;
  if (!sets_.empty()) return std::nullopt;
  anonymous_.members.push_back(name);
  return std::string("");
}

std::optional<int> PropertyTable::dimension_of(const std::string& set_name) const {
  if (set_name.empty())
    return anonymous_.has_range() ? std::optional<int>(anonymous_.dimension()) : std::nullopt;
  auto it = set_index_.find(set_name);
  if (it == set_index_.end()) return std::nullopt;
  const IndexSet& s = sets_[it->second];
  if (!s.has_range()) return std::nullopt;
  return s.dimension();
}

std::optional<int> PropertyTable::dimension_of_name(const std::string& name) const {
  auto set = lookup_index(name);
  if (!set) return std::nullopt;
  return dimension_of(*set);
}

std::string PropertyTable::fresh_name(const std::string& set_name,
                                      const std::vector<std::string>& used) const {
  auto in_use = [&used](const std::string& n) {
    return std::find(used.begin(), used.end(), n) != used.end();
  };
  const IndexSet* s = nullptr;
  if (set_name.empty()) {
    s = &anonymous_;
  } else {
    auto it = set_index_.find(set_name);
    if (it != set_index_.end()) s = &sets_[it->second];
  }
  if (s) {
    for (const auto& m : s->members)
      if (!in_use(m)) return m;
    for (const auto& fam : s->families) {
      for (int k = 1;; ++k) {
        std::string cand = fam + std::to_string(k);
        if (!in_use(cand)) return cand;
      }
    }
  }
  // Anonymous fallback: single letters, then i1, i2, ...
  for (char c = 'a'; c <= 'z'; ++c) {
    std::string cand(1, c);
    if (!in_use(cand)) return cand;
  }
  for (int k = 1;; ++k) {
    std::string cand = "i" + std::to_string(k);
    if (!in_use(cand)) return cand;
  }
}

std::pair<int, int> PropertyTable::name_rank(const std::string& name) const {
  for (std::size_t si = 0; si < sets_.size(); ++si) {
    const IndexSet& s = sets_[si];
    auto it = std::find(s.members.begin(), s.members.end(), name);
    if (it != s.members.end())
      return {static_cast<int>(si), static_cast<int>(it - s.members.begin())};
    for (std::size_t fi = 0; fi < s.families.size(); ++fi) {
      const auto& fam = s.families[fi];
      if (name.size() > fam.size() && name.compare(0, fam.size(), fam) == 0) {
        bool digits = !name.substr(fam.size()).empty();
        for (std::size_t i = fam.size(); i < name.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
        if (digits) {
          int n = std::stoi(name.substr(fam.size()));
          return {static_cast<int>(si),
                  static_cast<int>(s.members.size() + fi * 1000000 + n)};
        }
      }
    }
  }
  auto it = std::find(anonymous_.members.begin(), anonymous_.members.end(), name);
  if (it != anonymous_.members.end())
    return {static_cast<int>(sets_.size()),
            static_cast<int>(it - anonymous_.members.begin())};
  return {static_cast<int>(sets_.size()) + 1, 0};
}

HeadEntry& PropertyTable::touch(const std::string& head) {
  auto [it, inserted] = heads_.try_emplace(head);
  return it->second;
}

void PropertyTable::note_head_use(const std::string& head, int arity) {
  HeadEntry& e = touch(head);
  if (e.variadic) return;
  if (!e.arity) {
    e.arity = arity;
    return;
  }
  if (*e.arity != arity)
    throw ArityMismatch("head '" + head + "' used with " + std::to_string(arity) +
                        " slots, previously " + std::to_string(*e.arity));
}

void PropertyTable::declare_head_property(const std::string& head, PropKind kind, int arity,
                                          bool variadic) {
  HeadEntry& e = touch(head);
  if (e.decl_order < 0) e.decl_order = next_decl_order_++;
  if (variadic) {
    e.variadic = true;
  } else if (kind != PropKind::SelfNonCommuting) {
    note_head_use(head, arity);
  }
  e.kinds.insert(kind);

  if (kind == PropKind::Metric || kind == PropKind::KroneckerDelta) {
    // Binding to a set happens lazily: the declaration pattern's indices may
    // belong to the anonymous set. Recorded per set at first declaration.
  }
  if (kind == PropKind::RiemannTensor) {
    TableauSpec spec;
    spec.shape = {2, 2};
    spec.slot_order = {0, 2, 1, 3};
    e.tableau = spec;
  }
}

void PropertyTable::declare_gamma(const std::string& head, const std::string& metric_head) {
  HeadEntry& e = touch(head);
  if (e.decl_order < 0) e.decl_order = next_decl_order_++;
  e.variadic = true;
  e.kinds.insert(PropKind::GammaMatrix);
  e.kinds.insert(PropKind::SelfNonCommuting);
  e.gamma_metric = metric_head;
}

void PropertyTable::declare_tableau(const std::string& head, int arity,
                                    const TableauSpec& spec) {
  spec.validate();
  if (spec.cell_count() != arity)
    throw PatternArityMismatch("tableau covers " + std::to_string(spec.cell_count()) +
                               " slots but pattern has " + std::to_string(arity));
  HeadEntry& e = touch(head);
  if (e.decl_order < 0) e.decl_order = next_decl_order_++;
  note_head_use(head, arity);
  e.kinds.insert(PropKind::TableauSymmetry);
  e.tableau = spec;
}

void PropertyTable::declare_wrapped_tableau(const std::string& wrapper_head,
                                            const std::string& inner_head, int wrapper_arity,
                                            int inner_arity, const TableauSpec& spec) {
  spec.validate();
  if (spec.cell_count() != wrapper_arity + inner_arity)
    throw PatternArityMismatch("tableau does not cover the wrapped pattern's slots");
  wrapped_tableaux_[{wrapper_head, inner_head}] = spec;
  touch(inner_head);
  if (heads_[inner_head].decl_order < 0) heads_[inner_head].decl_order = next_decl_order_++;
}

std::pair<std::string, std::string> PropertyTable::pair_key(const std::string& a,
                                                            const std::string& b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

void PropertyTable::declare_commuting(const std::vector<std::string>& heads, bool anti) {
  PairRelation rel = anti ? PairRelation::anticommuting : PairRelation::commuting;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    HeadEntry& e = touch(heads[i]);
    if (e.decl_order < 0) e.decl_order = next_decl_order_++;
    for (std::size_t j = i + 1; j < heads.size(); ++j) {
      auto key = pair_key(heads[i], heads[j]);
      auto it = relations_.find(key);
      if (it != relations_.end() && it->second != rel)
        throw ConflictingProperty("heads '" + heads[i] + "' and '" + heads[j] +
                                  "' already carry a conflicting commutation property");
      relations_[key] = rel;
    }
  }
}

const HeadEntry* PropertyTable::head_entry(const std::string& head) const {
  auto it = heads_.find(head);
  return it == heads_.end() ? nullptr : &it->second;
}

bool PropertyTable::head_has(const std::string& head, PropKind k) const {
  const HeadEntry* e = head_entry(head);
  return e && e->has(k);
}

bool PropertyTable::is_derivative_head(const std::string& head) const {
  return head_has(head, PropKind::PartialDerivative) || head_has(head, PropKind::Derivative);
}

bool PropertyTable::is_metric_head(const std::string& head) const {
  return head_has(head, PropKind::Metric);
}

bool PropertyTable::is_kronecker_head(const std::string& head) const {
  return head_has(head, PropKind::KroneckerDelta);
}

const std::string& PropertyTable::gamma_metric(const std::string& head) const {
  static const std::string empty;
  const HeadEntry* e = head_entry(head);
  return e ? e->gamma_metric : empty;
}

std::optional<std::string> PropertyTable::gamma_head() const {
  for (const auto& [head, e] : heads_)
    if (e.has(PropKind::GammaMatrix)) return head;
  return std::nullopt;
}

PairRelation PropertyTable::relation(const std::string& a, const std::string& b) const {
  auto it = relations_.find(pair_key(a, b));
  if (it != relations_.end()) return it->second;
  bool a_nc = head_has(a, PropKind::SelfNonCommuting) || head_has(a, PropKind::GammaMatrix);
  bool b_nc = head_has(b, PropKind::SelfNonCommuting) || head_has(b, PropKind::GammaMatrix);
  if (a_nc && b_nc) return PairRelation::noncommuting;
  return PairRelation::commuting;
}

std::tuple<int, int, std::string> PropertyTable::head_rank(const std::string& head) const {
  const HeadEntry* e = head_entry(head);
  if (e && e->decl_order >= 0) return {0, e->decl_order, head};
  return {1, 0, head};
}

std::optional<TableauSpec> PropertyTable::tableau_of(const TensorFactor& f) const {
  if (!f.derivs.empty()) {
    auto it = wrapped_tableaux_.find({f.derivs.front().head, f.head});
    if (it != wrapped_tableaux_.end() &&
        it->second.cell_count() == static_cast<int>(f.combined_slots().size()))
      return it->second;
  }
  const HeadEntry* e = head_entry(f.head);
  if (!e) return std::nullopt;
  int arity = static_cast<int>(f.slots.size());
  auto offset_for_wrappers = [&f](TableauSpec spec) {
    int off = static_cast<int>(f.wrapper_slot_count());
    for (int& s : spec.slot_order) s += off;
    return spec;
  };
  if (e->tableau && e->tableau->cell_count() == arity)
    return offset_for_wrappers(*e->tableau);
  if (e->has(PropKind::GammaMatrix) && arity >= 2) {
    TableauSpec spec;  // single column: total antisymmetry
    spec.shape.assign(arity, 1);
    spec.slot_order.resize(arity);
    for (int i = 0; i < arity; ++i) spec.slot_order[i] = i;
    return offset_for_wrappers(spec);
  }
  if ((e->has(PropKind::Metric) || e->has(PropKind::KroneckerDelta)) && arity == 2) {
    TableauSpec spec;  // one row: symmetric pair
    spec.shape = {2};
    spec.slot_order = {0, 1};
    return offset_for_wrappers(spec);
  }
  return std::nullopt;
}

std::optional<TableauSpec> PropertyTable::projection_tableau_of(const TensorFactor& f) const {
  if (!f.derivs.empty()) {
    auto it = wrapped_tableaux_.find({f.derivs.front().head, f.head});
    if (it != wrapped_tableaux_.end() &&
        it->second.cell_count() == static_cast<int>(f.combined_slots().size()))
      return it->second;
  }
  const HeadEntry* e = head_entry(f.head);
  if (!e || !e->tableau) return std::nullopt;
  if (e->tableau->cell_count() != static_cast<int>(f.slots.size())) return std::nullopt;
  TableauSpec spec = *e->tableau;
  int off = static_cast<int>(f.wrapper_slot_count());
  for (int& s : spec.slot_order) s += off;
  return spec;
}

bool PropertyTable::has_wrapped_tableau_for(const std::string& inner_head) const {
  for (const auto& [key, spec] : wrapped_tableaux_)
    if (key.second == inner_head) return true;
  return false;
}

std::vector<SignedPermutation> tableau_generators(const TableauSpec& spec,
                                                  std::size_t n_slots) {
  std::vector<SignedPermutation> gens;
  const auto& shape = spec.shape;
  int rows = static_cast<int>(shape.size());
  auto cell_index = [&shape](int r, int c) {
    int idx = 0;
    for (int i = 0; i < r; ++i) idx += shape[i];
    return idx + c;
  };
  int cols = rows ? shape[0] : 0;
  auto column_height = [&shape, rows](int c) {
    int h = 0;
    for (int r = 0; r < rows; ++r)
      if (shape[r] > c) ++h;
    return h;
  };

  // Antisymmetry within each column.
  for (int c = 0; c < cols; ++c) {
    int h = column_height(c);
    for (int r = 0; r + 1 < h; ++r) {
      int si = spec.slot_order[cell_index(r, c)];
      int sj = spec.slot_order[cell_index(r + 1, c)];
      gens.push_back(SignedPermutation::transposition(n_slots, si, sj, -1));
    }
  }
  // Exchange of adjacent equal-length columns.
  for (int c = 0; c + 1 < cols; ++c) {
    int h1 = column_height(c);
    int h2 = column_height(c + 1);
    if (h1 != h2) continue;
    SignedPermutation p = SignedPermutation::identity(n_slots);
    for (int r = 0; r < h1; ++r) {
      int si = spec.slot_order[cell_index(r, c)];
      int sj = spec.slot_order[cell_index(r, c + 1)];
      std::swap(p.perm[si], p.perm[sj]);
    }
    p.sign = 1;
    gens.push_back(p);
  }
  return gens;
}

std::vector<SignedPermutation> generate_group(const std::vector<SignedPermutation>& gens,
                                              std::size_t n_slots, std::size_t max_size,
                                              bool* contradiction) {
  if (contradiction) *contradiction = false;
  std::map<std::vector<int>, int> seen;  // perm -> sign
  std::vector<SignedPermutation> group;
  std::vector<SignedPermutation> frontier;
  SignedPermutation id = SignedPermutation::identity(n_slots);
  seen[id.perm] = 1;
  group.push_back(id);
  frontier.push_back(id);
  while (!frontier.empty()) {
    std::vector<SignedPermutation> next;
    for (const auto& g : frontier) {
      for (const auto& gen : gens) {
        SignedPermutation h = compose(gen, g);
        auto it = seen.find(h.perm);
        if (it == seen.end()) {
          if (group.size() >= max_size)
            throw OrbitTooLarge("symmetry group exceeds the orbit cap");
          seen[h.perm] = h.sign;
          group.push_back(h);
          next.push_back(h);
        } else if (it->second != h.sign && contradiction) {
          *contradiction = true;
        }
      }
    }
    frontier = std::move(next);
  }
  return group;
}

std::vector<SignedPermutation> PropertyTable::monoterm_generators(
    const std::string& head) const {
  const HeadEntry* e = head_entry(head);
  if (!e) throw NoSymmetry("head '" + head + "' has no declared symmetry");
  if (e->arity && *e->arity == 0) return {};
  TensorFactor f;
  f.head = head;
  if (e->tableau) {
    f.slots.resize(e->tableau->cell_count());
  } else if (e->arity) {
    f.slots.resize(*e->arity);
  } else {
    throw NoSymmetry("head '" + head + "' has no declared symmetry");
  }
  auto spec = tableau_of(f);
  if (!spec) throw NoSymmetry("head '" + head + "' has no declared symmetry");
  return tableau_generators(*spec, f.slots.size());
}

std::vector<SignedPermutation> PropertyTable::factor_generators(const TensorFactor& f) const {
  std::vector<SignedPermutation> gens;
  std::size_t n = f.combined_slots().size();
  auto spec = tableau_of(f);
  if (spec) {
    auto tg = tableau_generators(*spec, n);
    gens.insert(gens.end(), tg.begin(), tg.end());
  }
  // Multiple indices on one partial-derivative wrapper commute.
  std::size_t off = 0;
  for (const auto& d : f.derivs) {
    if (head_has(d.head, PropKind::PartialDerivative)) {
      for (std::size_t i = 0; i + 1 < d.slots.size(); ++i)
        gens.push_back(SignedPermutation::transposition(
            n, static_cast<int>(off + i), static_cast<int>(off + i + 1), 1));
    }
    off += d.slots.size();
  }
  return gens;
}

bool PropertyTable::symmetric_metric_for(const std::string& set_name) const {
  // A single metric per session is the paper's setting; the metric is
  // declared symmetric by assumption (see design decisions).
  for (const auto& [head, e] : heads_)
    if (e.has(PropKind::Metric)) return true;
  (void)set_name;
  return false;
}

std::string PropertyTable::dump() const {
  std::ostringstream os;
  for (const auto& s : sets_) {
    os << "Indices(" << (s.name.empty() ? "default" : s.name) << "): ";
    for (std::size_t i = 0; i < s.members.size(); ++i) {
      if (i) os << ", ";
      os << s.members[i];
    }
    for (const auto& f : s.families) os << ", " << f << "#";
    if (s.has_range())
      os << "  [Integer(" << s.range->first << ".." << s.range->second << ")]";
    os << "\n";
  }
  auto kind_name = [](PropKind k) {
    switch (k) {
      case PropKind::Metric: return "Metric";
      case PropKind::KroneckerDelta: return "KroneckerDelta";
      case PropKind::PartialDerivative: return "PartialDerivative";
      case PropKind::Derivative: return "Derivative";
      case PropKind::GammaMatrix: return "GammaMatrix";
      case PropKind::SelfNonCommuting: return "SelfNonCommuting";
      case PropKind::TableauSymmetry: return "TableauSymmetry";
      case PropKind::RiemannTensor: return "RiemannTensor";
      case PropKind::SatisfiesBianchi: return "SatisfiesBianchi";
    }
    return "?";
  };
  std::vector<std::pair<int, std::string>> ordered;
  for (const auto& [head, e] : heads_) ordered.push_back({e.decl_order, head});
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [order, head] : ordered) {
    const HeadEntry& e = heads_.at(head);
    if (e.kinds.empty()) continue;
    os << head << ": ";
    bool first = true;
    for (PropKind k : e.kinds) {
      if (!first) os << ", ";
      first = false;
      os << kind_name(k);
      if (k == PropKind::GammaMatrix) os << "(metric=" << e.gamma_metric << ")";
      if (k == PropKind::TableauSymmetry && e.tableau) {
        os << "(shape={";
        for (std::size_t i = 0; i < e.tableau->shape.size(); ++i)
          os << (i ? "," : "") << e.tableau->shape[i];
        os << "}, indices={";
        for (std::size_t i = 0; i < e.tableau->slot_order.size(); ++i)
          os << (i ? "," : "") << e.tableau->slot_order[i];
        os << "})";
      }
    }
    os << "\n";
  }
  for (const auto& [key, spec] : wrapped_tableaux_) {
    os << key.first << "{" << key.second << "}: TableauSymmetry(shape={";
    for (std::size_t i = 0; i < spec.shape.size(); ++i) os << (i ? "," : "") << spec.shape[i];
    os << "}, indices={";
    for (std::size_t i = 0; i < spec.slot_order.size(); ++i)
      os << (i ? "," : "") << spec.slot_order[i];
    os << "})\n";
  }
  for (const auto& [key, rel] : relations_) {
    os << "{" << key.first << "," << key.second << "}: "
       << (rel == PairRelation::anticommuting
               ? "AntiCommuting"
               : rel == PairRelation::commuting ? "Commuting" : "NonCommuting")
       << "\n";
  }
  if (!post_rules_.empty()) {
    os << "PostDefaultRules(";
    for (std::size_t i = 0; i < post_rules_.size(); ++i) {
      if (i) os << ", ";
      os << "@@" << post_rules_[i].name << (post_rules_[i].bangs == 2 ? "!!" : "!") << "(%)";
    }
    os << ")\n";
  }
  return os.str();
}

}  // namespace tk
