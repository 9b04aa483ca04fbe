#include "tensorkernel/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tk {

namespace {

int compare_expr(const ScalarExpr& a, const ScalarExpr& b);

int cmp_int(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

int compare_vec(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a != b) return a < b ? -1 : 1;
  return 0;
}

}  // namespace

int compare(const ScalarAtom& a, const ScalarAtom& b) {
  if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
  if (a.name != b.name) return a.name < b.name ? -1 : 1;
  if (int c = compare_vec(a.deps, b.deps)) return c;
  if (int c = compare_vec(a.dvars, b.dvars)) return c;
  bool ha = a.arg != nullptr, hb = b.arg != nullptr;
  if (ha != hb) return ha ? 1 : -1;
  if (ha) return compare_expr(*a.arg, *b.arg);
  return 0;
}

bool operator==(const ScalarAtom& a, const ScalarAtom& b) { return compare(a, b) == 0; }

namespace {

int compare_term_powers(const ScalarTerm& a, const ScalarTerm& b) {
  std::size_t n = std::min(a.powers.size(), b.powers.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a.powers[i].first, b.powers[i].first)) return c;
    if (a.powers[i].second != b.powers[i].second)
      return a.powers[i].second < b.powers[i].second ? -1 : 1;
  }
  return cmp_int(static_cast<long>(a.powers.size()), static_cast<long>(b.powers.size()));
}

int compare_expr(const ScalarExpr& a, const ScalarExpr& b) {
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  std::size_t n = std::min(ta.size(), tb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare_term_powers(ta[i], tb[i])) return c;
    if (ta[i].coeff != tb[i].coeff) return ta[i].coeff < tb[i].coeff ? -1 : 1;
  }
  return cmp_int(static_cast<long>(ta.size()), static_cast<long>(tb.size()));
}

void sort_powers(ScalarTerm& t) {
  std::sort(t.powers.begin(), t.powers.end(),
            [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
}

// Merge equal atoms, drop zero exponents; numbers folded by the caller.
void normalize_term(ScalarTerm& t) {
  sort_powers(t);
  std::vector<std::pair<ScalarAtom, int>> out;
  for (auto& [atom, exp] : t.powers) {
    if (!out.empty() && out.back().first == atom)
      out.back().second += exp;
    else
      out.push_back({atom, exp});
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const auto& p) { return p.second == 0; }),
            out.end());
  t.powers = std::move(out);
}

}  // namespace

ScalarExpr ScalarExpr::from_terms(std::vector<ScalarTerm> terms) {
  for (auto& t : terms) normalize_term(t);
  std::sort(terms.begin(), terms.end(), [](const ScalarTerm& a, const ScalarTerm& b) {
    return compare_term_powers(a, b) < 0;
  });
  std::vector<ScalarTerm> merged;
  for (auto& t : terms) {
    if (t.coeff == 0) continue;
    if (!merged.empty() && compare_term_powers(merged.back(), t) == 0)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(std::move(t));
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const ScalarTerm& t) { return t.coeff == 0; }),
               merged.end());
  ScalarExpr e;
  e.terms_ = std::move(merged);
  return e;
}

ScalarExpr ScalarExpr::number(Rational r) {
  if (r == 0) return ScalarExpr();
  ScalarTerm t;
  t.coeff = std::move(r);
  return from_terms({t});
}

ScalarExpr ScalarExpr::symbol(const std::string& name) {
  ScalarAtom a;
  a.kind = ScalarAtom::Kind::symbol;
  a.name = name;
  ScalarTerm t;
  t.powers.push_back({a, 1});
  return from_terms({t});
}

ScalarExpr ScalarExpr::constant(const std::string& name) {
  ScalarAtom a;
  a.kind = ScalarAtom::Kind::constant;
  a.name = name;
  ScalarTerm t;
  t.powers.push_back({a, 1});
  return from_terms({t});
}

ScalarExpr ScalarExpr::func(const std::string& name, const std::vector<std::string>& deps) {
  ScalarAtom a;
  a.kind = ScalarAtom::Kind::func;
  a.name = name;
  a.deps = deps;
  ScalarTerm t;
  t.powers.push_back({a, 1});
  return from_terms({t});
}

bool ScalarExpr::is_number() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].powers.empty());
}

Rational ScalarExpr::number_value() const {
  if (terms_.empty()) return 0;
  if (!is_number()) throw Error("scalar expression is not a number");
  return terms_[0].coeff;
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
  std::vector<ScalarTerm> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return ScalarExpr::from_terms(std::move(terms));
}

ScalarExpr operator-(const ScalarExpr& a) {
  std::vector<ScalarTerm> terms = a.terms_;
  for (auto& t : terms) t.coeff = -t.coeff;
  return ScalarExpr::from_terms(std::move(terms));
}

ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return a + (-b); }

ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
  std::vector<ScalarTerm> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      ScalarTerm t;
      t.coeff = ta.coeff * tb.coeff;
      t.powers = ta.powers;
      t.powers.insert(t.powers.end(), tb.powers.begin(), tb.powers.end());
      out.push_back(std::move(t));
    }
  }
  return ScalarExpr::from_terms(std::move(out));
}

bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
  return compare_expr(a, b) == 0;
}

ScalarExpr ScalarExpr::pow(int n) const {
  if (n == 0) return number(1);
  if (terms_.empty()) {
    if (n < 0) throw Error("division by zero scalar");
    return ScalarExpr();
  }
  if (terms_.size() == 1) {
    const ScalarTerm& t = terms_[0];
    ScalarTerm r;
    if (n > 0) {
      r.coeff = 1;
      for (int k = 0; k < n; ++k) r.coeff *= t.coeff;
    } else {
      r.coeff = 1;
      for (int k = 0; k < -n; ++k) r.coeff /= t.coeff;
    }
    r.powers = t.powers;
    for (auto& [atom, exp] : r.powers) exp *= n;
    return from_terms({r});
  }
  if (n > 0) {
    ScalarExpr acc = *this;
    for (int k = 1; k < n; ++k) acc = acc * *this;
    return acc;
  }
  // Reciprocal of a sum: an opaque atom with a negative exponent.
  ScalarAtom a;
  a.kind = ScalarAtom::Kind::sum;
  a.arg = std::make_shared<ScalarExpr>(*this);
  ScalarTerm t;
  t.powers.push_back({a, n});
  return from_terms({t});
}

namespace {

ScalarExpr wrap_atom(ScalarAtom::Kind kind, const ScalarExpr& e) {
  ScalarAtom a;
  a.kind = kind;
  a.arg = std::make_shared<ScalarExpr>(e);
  ScalarTerm t;
  t.powers.push_back({a, 1});
  return ScalarExpr::from_terms({t});
}

}  // namespace

ScalarExpr ScalarExpr::abs_of(const ScalarExpr& e) {
  if (e.is_number()) {
    Rational v = e.number_value();
    return number(v < 0 ? -v : v);
  }
  // |c x| = |c| |x| for a single term with a rational coefficient.
  if (e.terms_.size() == 1) {
    ScalarTerm t = e.terms_[0];
    Rational c = t.coeff < 0 ? -t.coeff : t.coeff;
    ScalarExpr inner;
    ScalarTerm unit;
    unit.coeff = 1;
    unit.powers = t.powers;
    inner = from_terms({unit});
    return number(c) * wrap_atom(ScalarAtom::Kind::abs, inner);
  }
  return wrap_atom(ScalarAtom::Kind::abs, e);
}

ScalarExpr ScalarExpr::sin_of(const ScalarExpr& e) {
  return wrap_atom(ScalarAtom::Kind::sin, e);
}

ScalarExpr ScalarExpr::cos_of(const ScalarExpr& e) {
  return wrap_atom(ScalarAtom::Kind::cos, e);
}

ScalarExpr simplify(const ScalarExpr& e) {
  return ScalarExpr::from_terms(e.terms());
}

namespace {

ScalarExpr atom_expr(const ScalarAtom& a, int exp) {
  ScalarTerm t;
  t.powers.push_back({a, exp});
  return ScalarExpr::from_terms({t});
}

ScalarExpr diff_atom(const ScalarAtom& a, const std::string& x) {
  switch (a.kind) {
    case ScalarAtom::Kind::symbol:
      return ScalarExpr::number(a.name == x ? 1 : 0);
    case ScalarAtom::Kind::constant:
      return ScalarExpr::number(0);
    case ScalarAtom::Kind::func: {
      if (std::find(a.deps.begin(), a.deps.end(), x) == a.deps.end())
        return ScalarExpr::number(0);
      ScalarAtom d = a;
      d.kind = ScalarAtom::Kind::func_deriv;
      d.dvars = {x};
      return atom_expr(d, 1);
    }
    case ScalarAtom::Kind::func_deriv: {
      if (std::find(a.deps.begin(), a.deps.end(), x) == a.deps.end())
        return ScalarExpr::number(0);
      ScalarAtom d = a;
      d.dvars.push_back(x);
      std::sort(d.dvars.begin(), d.dvars.end());
      return atom_expr(d, 1);
    }
    case ScalarAtom::Kind::abs: {
      // d|u|/dx = u' |u| / u
      ScalarExpr du = diff(*a.arg, x);
      return du * atom_expr(a, 1) * a.arg->pow(-1);
    }
    case ScalarAtom::Kind::sin: {
      ScalarExpr du = diff(*a.arg, x);
      return du * ScalarExpr::cos_of(*a.arg);
    }
    case ScalarAtom::Kind::cos: {
      ScalarExpr du = diff(*a.arg, x);
      return ScalarExpr::number(-1) * du * ScalarExpr::sin_of(*a.arg);
    }
    case ScalarAtom::Kind::sum:
      return diff(*a.arg, x);
  }
  return ScalarExpr::number(0);
}

}  // namespace

ScalarExpr diff(const ScalarExpr& e, const std::string& x) {
  ScalarExpr out;
  for (const auto& term : e.terms()) {
    // Product rule over the power factors.
    for (std::size_t i = 0; i < term.powers.size(); ++i) {
      const auto& [atom, exp] = term.powers[i];
      ScalarExpr d = diff_atom(atom, x);
      if (d.is_zero()) continue;
      ScalarTerm rest;
      rest.coeff = term.coeff * exp;
      for (std::size_t j = 0; j < term.powers.size(); ++j) {
        if (j == i) {
          if (exp != 1) rest.powers.push_back({term.powers[j].first, exp - 1});
        } else {
          rest.powers.push_back(term.powers[j]);
        }
      }
      out = out + ScalarExpr::from_terms({rest}) * d;
    }
  }
  return out;
}

ScalarExpr sqrt_perfect(const ScalarExpr& e) {
  if (e.is_zero()) return e;
  if (e.terms().size() != 1)
    throw Error("sqrt of a non-monomial scalar expression");
  const ScalarTerm& t = e.terms()[0];
  if (t.coeff < 0) throw Error("sqrt of a negative coefficient");
  Integer num = numerator(t.coeff);
  Integer den = denominator(t.coeff);
  Integer rnum = boost::multiprecision::sqrt(num);
  Integer rden = boost::multiprecision::sqrt(den);
  if (rnum * rnum != num || rden * rden != den)
    throw Error("sqrt of a non-square coefficient");

  ScalarTerm out;
  out.coeff = Rational(rnum, rden);
  for (const auto& [atom, exp] : t.powers) {
    if (exp % 2 != 0) throw Error("sqrt of an odd power");
    int half = exp / 2;
    if (half % 2 == 0) {
      out.powers.push_back({atom, half});
    } else {
      // |x|^half with half odd keeps the absolute value visible.
      ScalarAtom a;
      a.kind = ScalarAtom::Kind::abs;
      a.arg = std::make_shared<ScalarExpr>(atom_expr(atom, 1));
      out.powers.push_back({a, half});
    }
  }
  return ScalarExpr::from_terms({out});
}

std::string EvalContext::deriv_key(const std::string& func,
                                   const std::vector<std::string>& dvars) {
  std::string key = func + "|";
  std::vector<std::string> sorted = dvars;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i) key += ",";
    key += sorted[i];
  }
  return key;
}

namespace {

double eval_atom(const ScalarAtom& a, const EvalContext& ctx) {
  switch (a.kind) {
    case ScalarAtom::Kind::symbol:
    case ScalarAtom::Kind::constant: {
      auto it = ctx.bindings.find(a.name);
      if (it != ctx.bindings.end()) return it->second;
      if (a.name == "pi") return 3.14159265358979323846;
      throw UnboundSymbol("no binding for '" + a.name + "'");
    }
    case ScalarAtom::Kind::func: {
      auto it = ctx.func_values.find(a.name);
      if (it == ctx.func_values.end())
        throw UnboundSymbol("no value for function '" + a.name + "'");
      return it->second;
    }
    case ScalarAtom::Kind::func_deriv: {
      auto it = ctx.func_derivs.find(EvalContext::deriv_key(a.name, a.dvars));
      if (it == ctx.func_derivs.end())
        throw UnboundSymbol("no value for derivative of '" + a.name + "'");
      return it->second;
    }
    case ScalarAtom::Kind::abs:
      return std::fabs(eval_at(*a.arg, ctx));
    case ScalarAtom::Kind::sin:
      return std::sin(eval_at(*a.arg, ctx));
    case ScalarAtom::Kind::cos:
      return std::cos(eval_at(*a.arg, ctx));
    case ScalarAtom::Kind::sum:
      return eval_at(*a.arg, ctx);
  }
  throw Error("unreachable");
}

}  // namespace

double eval_at(const ScalarExpr& e, const EvalContext& ctx) {
  double total = 0.0;
  for (const auto& term : e.terms()) {
    double v = to_double(term.coeff);
    for (const auto& [atom, exp] : term.powers)
      v *= std::pow(eval_atom(atom, ctx), exp);
    total += v;
  }
  return total;
}

namespace {

std::string atom_str(const ScalarAtom& a, bool tex);

std::string exprs_str(const ScalarExpr& e, bool tex);

std::string power_str(const ScalarAtom& atom, int exp, bool tex) {
  std::string base = atom_str(atom, tex);
  if (exp == 1) return base;
  if (tex) return base + "^{" + std::to_string(exp) + "}";
  return base + "^" + std::to_string(exp);
}

std::string atom_str(const ScalarAtom& a, bool tex) {
  switch (a.kind) {
    case ScalarAtom::Kind::symbol:
    case ScalarAtom::Kind::constant:
      if (tex && a.name == "pi") return "\\pi";
      if (tex && a.name == "theta") return "\\theta";
      if (tex && a.name == "phi") return "\\phi";
      if (tex && a.name == "rho") return "\\rho";
      return a.name;
    case ScalarAtom::Kind::func:
      return a.name;
    case ScalarAtom::Kind::func_deriv: {
      std::size_t order = a.dvars.size();
      std::string vars;
      for (const auto& v : a.dvars) vars += "d" + v;
      if (tex) {
        std::string num = order == 1 ? "d" : "d^" + std::to_string(order);
        std::string den;
        for (const auto& v : a.dvars) den += "\\,d" + v;
        return "\\frac{" + num + " " + a.name + "}{" + den + "}";
      }
      if (order == 1) return "d" + a.name + "/" + vars;
      return "d" + std::to_string(order) + a.name + "/" + vars;
    }
    case ScalarAtom::Kind::abs:
      if (tex) return "\\left|" + exprs_str(*a.arg, tex) + "\\right|";
      return "|" + exprs_str(*a.arg, tex) + "|";
    case ScalarAtom::Kind::sin:
      return (tex ? std::string("\\sin(") : std::string("sin(")) + exprs_str(*a.arg, tex) +
             ")";
    case ScalarAtom::Kind::cos:
      return (tex ? std::string("\\cos(") : std::string("cos(")) + exprs_str(*a.arg, tex) +
             ")";
    case ScalarAtom::Kind::sum:
      return "(" + exprs_str(*a.arg, tex) + ")";
  }
  return "?";
}

std::string term_str(const ScalarTerm& t, bool tex, bool strip_sign) {
  Rational coeff = strip_sign && t.coeff < 0 ? -t.coeff : t.coeff;
  std::vector<std::string> nums;
  std::vector<std::string> dens;
  bool num_has_deriv = false;
  for (const auto& [atom, exp] : t.powers) {
    if (exp > 0) {
      nums.push_back(power_str(atom, exp, tex));
      if (atom.kind == ScalarAtom::Kind::func_deriv) num_has_deriv = true;
    } else {
      dens.push_back(power_str(atom, -exp, tex));
    }
  }
  Integer cnum = numerator(coeff);
  Integer cden = denominator(coeff);

  std::ostringstream os;
  bool neg = cnum < 0;
  Integer abs_num = neg ? Integer(-cnum) : cnum;
  if (neg) os << "-";
  bool printed_num = false;
  if (abs_num != 1 || nums.empty()) {
    os << abs_num.str();
    printed_num = true;
  }
  for (std::size_t i = 0; i < nums.size(); ++i) {
    if (printed_num || i > 0) os << ' ';
    // Parenthesize derivative atoms when a denominator follows.
    if (!tex && (cden != 1 || !dens.empty()) &&
        nums[i].find('/') != std::string::npos)
      os << '(' << nums[i] << ')';
    else
      os << nums[i];
    printed_num = true;
  }
  (void)num_has_deriv;
  if (cden != 1 || !dens.empty()) {
    std::vector<std::string> all_dens;
    if (cden != 1) all_dens.push_back(cden.str());
    all_dens.insert(all_dens.end(), dens.begin(), dens.end());
    os << '/';
    if (all_dens.size() == 1) {
      os << all_dens[0];
    } else {
      os << '(';
      for (std::size_t i = 0; i < all_dens.size(); ++i) {
        if (i) os << ' ';
        os << all_dens[i];
      }
      os << ')';
    }
  }
  return os.str();
}

std::string exprs_str(const ScalarExpr& e, bool tex) {
  const auto& terms = e.terms();
  if (terms.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i == 0) {
      os << term_str(terms[i], tex, false);
    } else {
      os << (terms[i].coeff < 0 ? " - " : " + ") << term_str(terms[i], tex, true);
    }
  }
  return os.str();
}

}  // namespace

std::string ScalarExpr::str() const { return exprs_str(*this, false); }
std::string ScalarExpr::tex() const { return exprs_str(*this, true); }

}  // namespace tk
