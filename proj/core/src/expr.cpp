#include "tensorkernel/expr.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

namespace tk {

std::vector<IndexSlot> TensorFactor::combined_slots() const {
  std::vector<IndexSlot> out;
  for (const auto& d : derivs) out.insert(out.end(), d.slots.begin(), d.slots.end());
  out.insert(out.end(), slots.begin(), slots.end());
  return out;
}

std::size_t TensorFactor::wrapper_slot_count() const {
  std::size_t n = 0;
  for (const auto& d : derivs) n += d.slots.size();
  return n;
}

void TensorFactor::assign_combined_slots(const std::vector<IndexSlot>& combined) {
  std::size_t k = 0;
  for (auto& d : derivs)
    for (auto& s : d.slots) s = combined.at(k++);
  for (auto& s : slots) s = combined.at(k++);
}

bool same_factors(const Monomial& a, const Monomial& b) {
  return a.factors == b.factors;
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) return Expr(Rational(0));
  if (terms.size() == 1) return std::move(terms.front());
  return Expr(Sum{std::move(terms)});
}

Expr Expr::product(Rational coeff, std::vector<Expr> factors) {
  if (coeff == 0) return Expr(Rational(0));
  if (factors.empty()) return Expr(std::move(coeff));
  if (factors.size() == 1 && coeff == 1) return std::move(factors.front());
  return Expr(Product{std::move(coeff), std::move(factors)});
}

Expr Expr::from_monomial(const Monomial& m) {
  std::vector<Expr> fs;
  fs.reserve(m.factors.size());
  for (const auto& f : m.factors) fs.push_back(Expr::factor(f));
  return Expr::product(m.coeff, std::move(fs));
}

Expr Expr::from_monomials(const std::vector<Monomial>& ms) {
  std::vector<Expr> terms;
  terms.reserve(ms.size());
  for (const auto& m : ms) terms.push_back(from_monomial(m));
  return Expr::sum(std::move(terms));
}

bool Expr::is_zero() const { return is_scalar() && scalar_value() == 0; }

bool Expr::is_distributed() const {
  if (is_scalar() || is_factor()) return true;
  if (is_product()) {
    for (const auto& f : product_value().factors)
      if (!f.is_factor()) return false;
    return true;
  }
  for (const auto& t : sum_value().terms) {
    if (t.is_sum() || !t.is_distributed()) return false;
  }
  return true;
}

std::vector<Monomial> Expr::monomials() const {
  if (!is_distributed()) throw Error("expression is not in distributed form");
  std::vector<Monomial> out;
  auto add_term = [&out](const Expr& t) {
    Monomial m;
    if (t.is_scalar()) {
      m.coeff = t.scalar_value();
    } else if (t.is_factor()) {
      m.factors.push_back(t.factor_value());
    } else {
      const auto& p = t.product_value();
      m.coeff = p.coeff;
      for (const auto& f : p.factors) m.factors.push_back(f.factor_value());
    }
    out.push_back(std::move(m));
  };
  if (is_sum()) {
    for (const auto& t : sum_value().terms) add_term(t);
  } else {
    add_term(*this);
  }
  return out;
}

std::vector<Expr> Expr::terms() const {
  if (is_sum()) return sum_value().terms;
  return {*this};
}

namespace {

Expr flatten_impl(const Expr& e);

Expr flatten_product(const Expr::Product& p) {
  Rational coeff = p.coeff;
  std::vector<Expr> factors;
  for (const auto& f0 : p.factors) {
    Expr f = flatten_impl(f0);
    if (f.is_scalar()) {
      coeff *= f.scalar_value();
    } else if (f.is_product()) {
      const auto& q = f.product_value();
      coeff *= q.coeff;
      for (const auto& g : q.factors) factors.push_back(g);
    } else {
      factors.push_back(std::move(f));
    }
  }
  if (coeff == 0) return Expr(Rational(0));
  return Expr::product(std::move(coeff), std::move(factors));
}

Expr flatten_impl(const Expr& e) {
  if (e.is_scalar() || e.is_factor()) return e;
  if (e.is_product()) return flatten_product(e.product_value());

  std::vector<Expr> terms;
  for (const auto& t0 : e.sum_value().terms) {
    Expr t = flatten_impl(t0);
    if (t.is_zero()) continue;
    if (t.is_sum()) {
      for (const auto& u : t.sum_value().terms) terms.push_back(u);
    } else {
      terms.push_back(std::move(t));
    }
  }
  return Expr::sum(std::move(terms));
}

}  // namespace

Expr flatten(const Expr& e) { return flatten_impl(e); }

Expr normalize(const Expr& e) {
  Expr f = flatten_impl(e);
  if (!f.is_sum()) return f;

  // Merge sibling monomials identical up to coefficient, keeping the
  // position of the first occurrence. Non-flat terms pass through.
  std::vector<std::optional<Monomial>> keys;
  std::vector<Expr> merged;
  for (const auto& t : f.sum_value().terms) {
    std::optional<Monomial> m;
    if (!t.is_sum() && t.is_distributed()) m = t.monomials().front();
    bool found = false;
    if (m) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i] && same_factors(*keys[i], *m)) {
          keys[i]->coeff += m->coeff;
          found = true;
          break;
        }
      }
    }
    if (!found) {
      keys.push_back(m);
      merged.push_back(t);
    }
  }
  std::vector<Expr> kept;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (keys[i]) {
      if (keys[i]->coeff == 0) continue;
      kept.push_back(Expr::from_monomial(*keys[i]));
    } else {
      kept.push_back(merged[i]);
    }
  }
  return Expr::sum(std::move(kept));
}

namespace {

struct SlotCount {
  int upper = 0;
  int lower = 0;
};

void count_factor(const TensorFactor& f, std::map<std::string, SlotCount>& counts) {
  for (const auto& s : f.combined_slots()) {
    auto& c = counts[s.name];
    (s.variance == Variance::upper ? c.upper : c.lower) += 1;
  }
}

using FreeMultiset = std::vector<IndexSlot>;

FreeMultiset resolve_counts(const std::map<std::string, SlotCount>& counts) {
  FreeMultiset frees;
  for (const auto& [name, c] : counts) {
    int total = c.upper + c.lower;
    if (total > 2)
      throw Error("index '" + name + "' appears more than twice in a monomial");
    if (total == 2) {
      if (c.upper == 2 || c.lower == 2)
        throw Error("index '" + name + "' repeated with the same variance");
      continue;  // dummy pair
    }
    frees.push_back(IndexSlot{name, c.upper ? Variance::upper : Variance::lower, ""});
  }
  std::sort(frees.begin(), frees.end(), [](const IndexSlot& a, const IndexSlot& b) {
    if (a.name != b.name) return a.name < b.name;
    return variance_char(a.variance) < variance_char(b.variance);
  });
  return frees;
}

FreeMultiset free_indices_impl(const Expr& e);

FreeMultiset free_product(const std::vector<Expr>& factors) {
  std::map<std::string, SlotCount> counts;
  for (const auto& f : factors) {
    if (f.is_factor()) {
      count_factor(f.factor_value(), counts);
    } else {
      for (const auto& s : free_indices_impl(f)) {
        auto& c = counts[s.name];
        (s.variance == Variance::upper ? c.upper : c.lower) += 1;
      }
    }
  }
  return resolve_counts(counts);
}

FreeMultiset free_indices_impl(const Expr& e) {
  if (e.is_scalar()) return {};
  if (e.is_factor()) {
    std::map<std::string, SlotCount> counts;
    count_factor(e.factor_value(), counts);
    return resolve_counts(counts);
  }
  if (e.is_product()) return free_product(e.product_value().factors);

  std::vector<const Expr*> live;
  for (const auto& t : e.sum_value().terms)
    if (!t.is_zero()) live.push_back(&t);
  if (live.empty()) return {};
  FreeMultiset first = free_indices_impl(*live.front());
  for (std::size_t i = 1; i < live.size(); ++i) {
    if (free_indices_impl(*live[i]) != first)
      throw FreeIndexMismatch("sum terms have different free indices");
  }
  return first;
}

}  // namespace

std::vector<IndexSlot> free_indices(const Expr& e) { return free_indices_impl(e); }

std::vector<std::string> dummy_names(const Monomial& m) {
  std::map<std::string, SlotCount> counts;
  for (const auto& f : m.factors) count_factor(f, counts);
  std::vector<std::string> out;
  for (const auto& [name, c] : counts)
    if (c.upper + c.lower == 2 && c.upper == 1) out.push_back(name);
  return out;
}

std::vector<std::string> all_names(const Monomial& m) {
  std::set<std::string> names;
  for (const auto& f : m.factors)
    for (const auto& s : f.combined_slots()) names.insert(s.name);
  return {names.begin(), names.end()};
}

Expr add(const Expr& a, const Expr& b) {
  FreeMultiset fa = free_indices(a);
  FreeMultiset fb = free_indices(b);
  if (!a.is_zero() && !b.is_zero() && fa != fb)
    throw FreeIndexMismatch("cannot add expressions with different free indices");
  std::vector<Expr> terms = a.terms();
  for (const auto& t : b.terms()) terms.push_back(t);
  return normalize(Expr::sum(std::move(terms)));
}

namespace {

void collect_names(const Expr& e, std::set<std::string>& names) {
  if (e.is_factor()) {
    for (const auto& s : e.factor_value().combined_slots()) names.insert(s.name);
  } else if (e.is_sum()) {
    for (const auto& t : e.sum_value().terms) collect_names(t, names);
  } else if (e.is_product()) {
    for (const auto& f : e.product_value().factors) collect_names(f, names);
  }
}

Expr rename_everywhere(const Expr& e, const std::map<std::string, std::string>& ren) {
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
    for (const auto& t : e.sum_value().terms) ts.push_back(rename_everywhere(t, ren));
    return Expr(Expr::Sum{std::move(ts)});
  }
  const auto& p = e.product_value();
  std::vector<Expr> fs;
  for (const auto& f : p.factors) fs.push_back(rename_everywhere(f, ren));
  return Expr(Expr::Product{p.coeff, std::move(fs)});
}

std::string set_of_name(const Expr& e, const std::string& name) {
  std::string set;
  std::function<bool(const Expr&)> find = [&](const Expr& x) -> bool {
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
        if (find(t)) return true;
    } else if (x.is_product()) {
      for (const auto& f : x.product_value().factors)
        if (find(f)) return true;
    }
    return false;
  };
  find(e);
  return set;
}

std::set<std::string> expr_dummy_names(const Expr& e) {
  std::set<std::string> all;
  collect_names(e, all);
  std::set<std::string> frees;
  for (const auto& s : free_indices(e)) frees.insert(s.name);
  std::set<std::string> dummies;
  for (const auto& n : all)
    if (!frees.count(n)) dummies.insert(n);
  return dummies;
}

}  // namespace

Expr tensor_product(
    const Expr& a, const Expr& b,
    const std::function<std::string(const std::string&, const std::vector<std::string>&)>&
        fresh_name) {
  std::set<std::string> a_names;
  collect_names(a, a_names);
  std::set<std::string> b_names;
  collect_names(b, b_names);

  Expr b2 = b;
  std::map<std::string, std::string> ren;
  std::vector<std::string> used(a_names.begin(), a_names.end());
  used.insert(used.end(), b_names.begin(), b_names.end());
  for (const auto& d : expr_dummy_names(b)) {
    if (a_names.count(d)) {
      std::string fresh = fresh_name(set_of_name(b, d), used);
      used.push_back(fresh);
      ren[d] = fresh;
    }
  }
  if (!ren.empty()) b2 = rename_everywhere(b2, ren);

  Rational coeff = 1;
  std::vector<Expr> factors;
  for (Expr side : {normalize(a), normalize(b2)}) {
    if (side.is_scalar()) {
      coeff *= side.scalar_value();
    } else if (side.is_product()) {
      coeff *= side.product_value().coeff;
      for (const auto& f : side.product_value().factors) factors.push_back(f);
    } else {
      factors.push_back(std::move(side));
    }
  }
  Expr result = Expr::product(std::move(coeff), std::move(factors));
  free_indices(result);  // validate index invariants
  return result;
}

Expr contract_last(
    const Expr& e,
    const std::function<std::string(const std::string&, const std::vector<std::string>&)>&
        fresh_name) {
  return map_monomials(e, [&](const Monomial& m) -> Monomial {
    std::map<std::string, SlotCount> counts;
    for (const auto& f : m.factors) count_factor(f, counts);
    auto is_free = [&counts](const std::string& n) {
      const auto& c = counts.at(n);
      return c.upper + c.lower == 1;
    };

    // Last free upper and last free lower slot, scanning factors in order.
    int up_f = -1, up_s = -1, dn_f = -1, dn_s = -1;
    for (int fi = 0; fi < static_cast<int>(m.factors.size()); ++fi) {
      auto combined = m.factors[fi].combined_slots();
      for (int si = 0; si < static_cast<int>(combined.size()); ++si) {
        if (!is_free(combined[si].name)) continue;
        if (combined[si].variance == Variance::upper) {
          up_f = fi;
          up_s = si;
        } else {
          dn_f = fi;
          dn_s = si;
        }
      }
    }
    if (up_f < 0 || dn_f < 0)
      throw NoContractibleSlots("monomial has no free upper/lower slot pair");

    Monomial out = m;
    std::vector<std::string> used = all_names(m);
    std::string set = m.factors[up_f].combined_slots()[up_s].set;
    std::string fresh = fresh_name(set, used);
    auto rename_at = [&out, &fresh](int fi, int si) {
      auto combined = out.factors[fi].combined_slots();
      combined[si].name = fresh;
      out.factors[fi].assign_combined_slots(combined);
    };
    rename_at(up_f, up_s);
    rename_at(dn_f, dn_s);
    return out;
  });
}

Expr map_monomials(const Expr& e, const std::function<Monomial(const Monomial&)>& fn) {
  return map_monomials_expr(
      e, [&fn](const Monomial& m) { return Expr::from_monomial(fn(m)); });
}

Expr map_monomials_expr(const Expr& e, const std::function<Expr(const Monomial&)>& fn) {
  if (e.is_sum()) {
    std::vector<Expr> ts;
    for (const auto& t : e.sum_value().terms) ts.push_back(map_monomials_expr(t, fn));
    return flatten(Expr::sum(std::move(ts)));
  }
  if (e.is_product() && !e.is_distributed()) {
    // Product with sum children: maximal runs of plain factors are handed to
    // fn as one monomial; sum children are recursed into independently.
    const auto& p = e.product_value();
    std::vector<Expr> fs;
    Monomial run;
    auto flush = [&]() {
      if (run.factors.empty()) return;
      fs.push_back(fn(run));
      run = Monomial{};
    };
    for (const auto& f : p.factors) {
      if (f.is_factor()) {
        run.factors.push_back(f.factor_value());
      } else {
        flush();
        fs.push_back(map_monomials_expr(f, fn));
      }
    }
    flush();
    return flatten(Expr::product(p.coeff, std::move(fs)));
  }
  Monomial m = e.monomials().front();
  return flatten(fn(m));
}

}  // namespace tk
