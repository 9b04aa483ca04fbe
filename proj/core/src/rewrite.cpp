#include "tensorkernel/rewrite.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tensorkernel/clifford.hpp"
#include "tensorkernel/symmetry.hpp"

namespace tk {

namespace {

const std::string& sort_head(const TensorFactor& f) {
  return f.derivs.empty() ? f.head : f.derivs.front().head;
}

int cmp(int a, int b) { return a < b ? -1 : (a > b ? 1 : 0); }

int compare_slots(const std::vector<IndexSlot>& a, const std::vector<IndexSlot>& b,
                  const PropertyTable& t) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto ra = t.name_rank(a[i].name);
    auto rb = t.name_rank(b[i].name);
    if (ra != rb) return ra < rb ? -1 : 1;
    if (a[i].variance != b[i].variance)
      return a[i].variance == Variance::upper ? -1 : 1;
  }
  return cmp(static_cast<int>(a.size()), static_cast<int>(b.size()));
}

}  // namespace

int compare_factors(const TensorFactor& a, const TensorFactor& b, const PropertyTable& t) {
  auto ra = t.head_rank(sort_head(a));
  auto rb = t.head_rank(sort_head(b));
  if (ra != rb) return ra < rb ? -1 : 1;
  auto ca = a.combined_slots();
  auto cb = b.combined_slots();
  // Higher rank first: gamma_{a b c} sorts before gamma_{a} g_{b c}.
  if (ca.size() != cb.size()) return ca.size() > cb.size() ? -1 : 1;
  if (int c = cmp(static_cast<int>(a.derivs.size()), static_cast<int>(b.derivs.size())))
    return c;
  for (std::size_t i = 0; i < a.derivs.size(); ++i) {
    auto da = t.head_rank(a.derivs[i].head);
    auto db = t.head_rank(b.derivs[i].head);
    if (da != db) return da < db ? -1 : 1;
  }
  auto ha = t.head_rank(a.head);
  auto hb = t.head_rank(b.head);
  if (ha != hb) return ha < hb ? -1 : 1;
  return compare_slots(ca, cb, t);
}

int compare_monomials(const Monomial& a, const Monomial& b, const PropertyTable& t) {
  // Scalars (empty factor lists) sort last.
  if (a.factors.empty() != b.factors.empty()) return a.factors.empty() ? 1 : -1;
  std::size_t n = std::min(a.factors.size(), b.factors.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare_factors(a.factors[i], b.factors[i], t)) return c;
  return cmp(static_cast<int>(a.factors.size()), static_cast<int>(b.factors.size()));
}

Expr distribute(const Expr& e) {
  Expr f = flatten(e);
  if (f.is_scalar() || f.is_factor()) return f;
  if (f.is_sum()) {
    std::vector<Expr> out;
    for (const auto& t : f.sum_value().terms) {
      Expr d = distribute(t);
      for (const auto& u : d.terms()) out.push_back(u);
    }
    return flatten(Expr::sum(std::move(out)));
  }
  const auto& p = f.product_value();
  std::vector<Monomial> partials{Monomial{p.coeff, {}}};
  for (const auto& child : p.factors) {
    if (child.is_factor()) {
      for (auto& m : partials) m.factors.push_back(child.factor_value());
      continue;
    }
    Expr d = distribute(child);
    std::vector<Monomial> expanded = d.monomials();
    std::vector<Monomial> next;
    next.reserve(partials.size() * expanded.size());
    for (const auto& m : partials) {
      for (const auto& x : expanded) {
        Monomial nm;
        nm.coeff = m.coeff * x.coeff;
        nm.factors = m.factors;
        nm.factors.insert(nm.factors.end(), x.factors.begin(), x.factors.end());
        next.push_back(std::move(nm));
      }
    }
    partials = std::move(next);
  }
  std::vector<Monomial> kept;
  for (auto& m : partials)
    if (m.coeff != 0) kept.push_back(std::move(m));
  return flatten(Expr::from_monomials(kept));
}

Expr prodsort(const Expr& e, const PropertyTable& t) {
  return map_monomials(flatten(e), [&t](const Monomial& m0) {
    Monomial m = m0;
    auto& fs = m.factors;
    for (std::size_t i = 1; i < fs.size(); ++i) {
      std::size_t j = i;
      while (j > 0 && compare_factors(fs[j], fs[j - 1], t) < 0) {
        PairRelation rel = t.relation(sort_head(fs[j - 1]), sort_head(fs[j]));
        if (rel == PairRelation::noncommuting) break;
        if (rel == PairRelation::anticommuting) m.coeff = -m.coeff;
        std::swap(fs[j], fs[j - 1]);
        --j;
      }
    }
    return m;
  });
}

namespace {

bool match_pattern(const TensorFactor& pat, const TensorFactor& f,
                   std::map<std::string, std::string>& binding) {
  if (pat.head != f.head) return false;
  if (pat.derivs.size() != f.derivs.size()) return false;
  if (pat.slots.size() != f.slots.size()) return false;
  for (std::size_t i = 0; i < pat.derivs.size(); ++i) {
    if (pat.derivs[i].head != f.derivs[i].head) return false;
    if (pat.derivs[i].slots.size() != f.derivs[i].slots.size()) return false;
  }
  auto pc = pat.combined_slots();
  auto fc = f.combined_slots();
  binding.clear();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    if (pc[i].variance != fc[i].variance) return false;
    auto it = binding.find(pc[i].name);
    if (it != binding.end()) {
      if (it->second != fc[i].name) return false;
    } else {
      binding[pc[i].name] = fc[i].name;
    }
  }
  return true;
}

Expr rename_expr(const Expr& e, const std::map<std::string, std::string>& ren) {
  if (e.is_scalar()) return e;
  if (e.is_factor()) {
    TensorFactor f = e.factor_value();
    auto apply = [&ren](IndexSlot& s) {
      auto it = ren.find(s.name);
      if (it != ren.end()) s.name = it->second;
    };
    for (auto& d : f.derivs)
      for (auto& s : d.slots) apply(s);
    for (auto& s : f.slots) apply(s);
    return Expr::factor(std::move(f));
  }
  if (e.is_sum()) {
    std::vector<Expr> ts;
    for (const auto& t : e.sum_value().terms) ts.push_back(rename_expr(t, ren));
    return Expr(Expr::Sum{std::move(ts)});
  }
  const auto& p = e.product_value();
  std::vector<Expr> fs;
  for (const auto& f : p.factors) fs.push_back(rename_expr(f, ren));
  return Expr(Expr::Product{p.coeff, std::move(fs)});
}

void collect_expr_names(const Expr& e, std::set<std::string>& names) {
  if (e.is_factor()) {
    for (const auto& s : e.factor_value().combined_slots()) names.insert(s.name);
  } else if (e.is_sum()) {
    for (const auto& t : e.sum_value().terms) collect_expr_names(t, names);
  } else if (e.is_product()) {
    for (const auto& f : e.product_value().factors) collect_expr_names(f, names);
  }
}

std::string set_of(const Expr& e, const std::string& name) {
  std::string set;
  std::function<bool(const Expr&)> walk = [&](const Expr& x) -> bool {
    if (x.is_factor()) {
      for (const auto& s : x.factor_value().combined_slots())
        if (s.name == name) {
          set = s.set;
          return true;
        }
      return false;
    }
    if (x.is_sum()) {
      for (const auto& t : x.sum_value().terms)
        if (walk(t)) return true;
    } else if (x.is_product()) {
      for (const auto& f : x.product_value().factors)
        if (walk(f)) return true;
    }
    return false;
  };
  walk(e);
  return set;
}

Expr substitute_once(const Expr& e, const SubstitutionRule& rule, PropertyTable& t,
                     bool* changed) {
  // Pattern slot names must be pairwise distinct abstract indices.
  {
    std::set<std::string> seen;
    for (const auto& s : rule.lhs.combined_slots()) {
      if (!seen.insert(s.name).second)
        throw PatternArityMismatch("substitution pattern repeats index '" + s.name + "'");
    }
  }
  std::set<std::string> rhs_names;
  collect_expr_names(rule.rhs, rhs_names);
  std::set<std::string> lhs_names;
  for (const auto& s : rule.lhs.combined_slots()) lhs_names.insert(s.name);

  return map_monomials_expr(flatten(e), [&](const Monomial& m) -> Expr {
    std::vector<Expr> children;
    std::set<std::string> used_set;
    for (const auto& n : all_names(m)) used_set.insert(n);
    bool local_change = false;
    for (const auto& f : m.factors) {
      std::map<std::string, std::string> binding;
      if (!match_pattern(rule.lhs, f, binding)) {
        children.push_back(Expr::factor(f));
        continue;
      }
      local_change = true;
      // Freshen rhs dummies (names not bound by the pattern) against every
      // name in use in this monomial and in the bindings.
      std::map<std::string, std::string> ren;
      std::vector<std::string> used(used_set.begin(), used_set.end());
      for (const auto& [k, v] : binding) used.push_back(v);
      for (const auto& n : rhs_names) {
        if (lhs_names.count(n)) continue;
        std::string fresh = t.fresh_name(set_of(rule.rhs, n), used);
        used.push_back(fresh);
        used_set.insert(fresh);
        ren[n] = fresh;
      }
      Expr rhs = rename_expr(rule.rhs, ren);
      rhs = rename_expr(rhs, binding);
      children.push_back(rhs);
    }
    if (changed && local_change) *changed = true;
    return flatten(Expr::product(m.coeff, std::move(children)));
  });
}

}  // namespace

Expr substitute(const Expr& e, const SubstitutionRule& rule, PropertyTable& t, bool repeat) {
  Expr cur = e;
  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;
    Expr next = substitute_once(cur, rule, t, &changed);
    bool stable = (next == cur);
    cur = std::move(next);
    if (!repeat || !changed || stable) break;
  }
  return cur;
}

namespace {

bool is_bare_two_slot(const TensorFactor& f) {
  return f.derivs.empty() && f.slots.size() == 2;
}

// Eliminates one eligible factor of `head_pred` kind starting the scan at
// *pos. Returns true when something was eliminated.
bool eliminate_step(Monomial& m, const PropertyTable& t, bool metric_mode,
                    std::size_t* pos) {
  auto& fs = m.factors;
  for (std::size_t i = *pos; i < fs.size(); ++i) {
    const TensorFactor& f = fs[i];
    if (!is_bare_two_slot(f)) continue;
    bool mixed = f.slots[0].variance != f.slots[1].variance;
    if (metric_mode) {
      if (!t.is_metric_head(f.head)) continue;
    } else {
      if (!t.is_kronecker_head(f.head)) continue;
      if (!mixed && !t.is_metric_head(f.head)) continue;
    }

    // Self-paired: the trace.
    if (f.slots[0].name == f.slots[1].name) {
      if (!mixed) continue;  // cannot occur for well-formed monomials
      auto dim = t.dimension_of_name(f.slots[0].name);
      if (!dim) continue;
      m.coeff *= *dim;
      fs.erase(fs.begin() + static_cast<long>(i));
      *pos = i;
      return true;
    }

    // Find a partner slot in another factor for either slot of f.
    for (int side = 0; side < 2; ++side) {
      const IndexSlot& s = f.slots[side];
      const IndexSlot& other = f.slots[1 - side];
      for (std::size_t j = 0; j < fs.size(); ++j) {
        if (j == i) continue;
        auto combined = fs[j].combined_slots();
        for (std::size_t k = 0; k < combined.size(); ++k) {
          if (combined[k].name == s.name && combined[k].variance != s.variance) {
            combined[k].name = other.name;
            combined[k].variance = other.variance;
            combined[k].set = other.set;
            fs[j].assign_combined_slots(combined);
            fs.erase(fs.begin() + static_cast<long>(i));
            *pos = i;
            return true;
          }
        }
      }
    }
  }
  return false;
}

Monomial eliminate_pass(const Monomial& m0, const PropertyTable& t, bool metric_mode) {
  Monomial m = m0;
  std::size_t pos = 0;
  while (eliminate_step(m, t, metric_mode, &pos)) {
  }
  return m;
}

}  // namespace

Expr eliminate_metric(const Expr& e, const PropertyTable& t, bool repeat) {
  Expr cur = flatten(e);
  for (int pass = 0; pass < 64; ++pass) {
    Expr next = map_monomials(cur, [&t](const Monomial& m) {
      return eliminate_pass(m, t, /*metric_mode=*/true);
    });
    if (!repeat || next == cur) return next;
    cur = std::move(next);
  }
  return cur;
}

Expr eliminate_kr(const Expr& e, const PropertyTable& t) {
  Expr cur = flatten(e);
  for (int pass = 0; pass < 64; ++pass) {
    Expr next = map_monomials(cur, [&t](const Monomial& m) {
      return eliminate_pass(m, t, /*metric_mode=*/false);
    });
    if (next == cur) return next;
    cur = std::move(next);
  }
  return cur;
}

Expr collect_terms(const Expr& e, const PropertyTable& t) {
  Expr f = flatten(e);
  if (f.is_product() && !f.is_distributed()) {
    const auto& p = f.product_value();
    std::vector<Expr> fs;
    for (const auto& child : p.factors)
      fs.push_back(child.is_sum() ? collect_terms(child, t) : child);
    return flatten(Expr::product(p.coeff, std::move(fs)));
  }
  if (!f.is_sum()) return f;

  std::vector<Expr> passthrough;
  std::vector<Monomial> monos;
  for (const auto& term : f.sum_value().terms) {
    if (term.is_sum() || !term.is_distributed()) {
      passthrough.push_back(collect_terms(term, t));
      continue;
    }
    Monomial m = term.monomials().front();
    bool merged = false;
    for (auto& k : monos) {
      if (same_factors(k, m)) {
        k.coeff += m.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) monos.push_back(std::move(m));
  }
  std::vector<Monomial> kept;
  for (auto& m : monos)
    if (m.coeff != 0) kept.push_back(std::move(m));
  std::stable_sort(kept.begin(), kept.end(), [&t](const Monomial& a, const Monomial& b) {
    return compare_monomials(a, b, t) < 0;
  });
  std::vector<Expr> terms;
  for (const auto& m : kept) terms.push_back(Expr::from_monomial(m));
  for (const auto& p : passthrough) terms.push_back(p);
  return flatten(Expr::sum(std::move(terms)));
}

Expr apply_post_rules(const Expr& e, PropertyTable& t, std::size_t max_orbit) {
  Expr cur = e;
  for (const AlgoCall& call : t.post_rules()) {
    for (int pass = 0; pass < 64; ++pass) {
      Expr next;
      if (call.name == "prodsort") {
        next = prodsort(cur, t);
      } else if (call.name == "eliminate_kr") {
        next = eliminate_kr(cur, t);
      } else if (call.name == "eliminate_metric") {
        next = eliminate_metric(cur, t, call.bangs >= 2);
      } else if (call.name == "canonicalise") {
        next = canonicalise(cur, t, max_orbit);
      } else if (call.name == "collect_terms") {
        next = collect_terms(cur, t);
      } else if (call.name == "distribute") {
        next = distribute(cur);
      } else if (call.name == "join") {
        bool expand = std::find(call.args.begin(), call.args.end(), "expand") !=
                      call.args.end();
        next = join(cur, t, expand, call.bangs >= 2);
      } else {
        throw Error("unknown post rule '" + call.name + "'");
      }
      bool stable = (next == cur);
      cur = std::move(next);
      if (call.bangs < 2 || stable) break;
    }
  }
  return cur;
}

}  // namespace tk
