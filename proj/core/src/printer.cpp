#include "tensorkernel/printer.hpp"

#include <sstream>

namespace tk {

namespace {

void print_slot_groups(std::ostringstream& os, const std::vector<IndexSlot>& slots,
                       bool tex) {
  std::size_t i = 0;
  bool first_group = true;
  while (i < slots.size()) {
    Variance v = slots[i].variance;
    std::size_t j = i;
    while (j < slots.size() && slots[j].variance == v) ++j;
    if (tex && !first_group) os << "\\,";
    os << (v == Variance::upper ? '^' : '_') << '{';
    for (std::size_t k = i; k < j; ++k) {
      if (k > i) os << ' ';
      os << slots[k].name;
    }
    os << '}';
    first_group = false;
    i = j;
  }
}

void print_factor(std::ostringstream& os, const TensorFactor& f, bool tex,
                  std::size_t deriv_index = 0) {
  if (deriv_index < f.derivs.size()) {
    const DerivOp& d = f.derivs[deriv_index];
    if (tex) os << '{' << d.head << '}';
    else os << d.head;
    print_slot_groups(os, d.slots, tex);
    os << '{';
    print_factor(os, f, tex, deriv_index + 1);
    os << '}';
    return;
  }
  if (tex) os << '{' << f.head << '}';
  else os << f.head;
  print_slot_groups(os, f.slots, tex);
}

std::string coeff_prefix(const Rational& coeff, bool has_factors, bool tex) {
  if (!has_factors) {
    if (!tex || is_integer(coeff)) return to_string(coeff);
    return (coeff < 0 ? std::string("-") : std::string()) + "\\frac{" +
           numerator(abs(coeff)).str() + "}{" + denominator(coeff).str() + "}";
  }
  std::string s;
  Rational a = coeff;
  if (coeff < 0) {
    s += "-";
    a = -coeff;
  }
  if (a != 1) {
    if (tex) {
      if (is_integer(a)) {
        s += numerator(a).str() + "\\, ";
      } else {
        s += "\\frac{" + numerator(a).str() + "}{" + denominator(a).str() + "} ";
      }
    } else {
      s += to_string(a) + " ";
    }
  }
  return s;
}

std::string print_expr(const Expr& e, bool tex);

// One sum term: sign handled by the caller when strip_sign is set.
std::string print_term(const Expr& t, bool tex, bool strip_sign) {
  Rational coeff = 1;
  std::vector<const Expr*> children;
  if (t.is_scalar()) {
    coeff = t.scalar_value();
  } else if (t.is_factor()) {
    children.push_back(&t);
  } else if (t.is_product()) {
    coeff = t.product_value().coeff;
    for (const auto& f : t.product_value().factors) children.push_back(&f);
  } else {
    // Nested sum as a term: parenthesize.
    return "(" + print_expr(t, tex) + ")";
  }
  if (strip_sign) coeff = abs(coeff);

  std::ostringstream os;
  os << coeff_prefix(coeff, !children.empty(), tex);
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i > 0) os << ' ';
    const Expr& c = *children[i];
    if (c.is_factor()) {
      print_factor(os, c.factor_value(), tex);
    } else {
      os << '(' << print_expr(c, tex) << ')';
    }
  }
  return os.str();
}

std::string print_expr(const Expr& e, bool tex) {
  if (!e.is_sum()) return print_term(e, tex, false);
  const auto& terms = e.sum_value().terms;
  if (terms.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Expr& t = terms[i];
    Rational coeff = 1;
    if (t.is_scalar()) coeff = t.scalar_value();
    else if (t.is_product()) coeff = t.product_value().coeff;
    if (i == 0) {
      os << print_term(t, tex, false);
    } else {
      os << (coeff < 0 ? " - " : " + ") << print_term(t, tex, true);
    }
  }
  return os.str();
}

}  // namespace

std::string print_plain(const Expr& e) { return print_expr(e, false); }

std::string print_plain(const Monomial& m) {
  return print_plain(Expr::from_monomial(m));
}

std::string print_plain(const TensorFactor& f) {
  std::ostringstream os;
  print_factor(os, f, false);
  return os.str();
}

std::string print_tex(const Expr& e) { return print_expr(e, true); }

}  // namespace tk
