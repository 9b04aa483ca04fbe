#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tensorkernel/diagnostics.hpp"
#include "tensorkernel/rational.hpp"

namespace tk {

class ScalarExpr;

/// One multiplicative atom of a scalar term.
struct ScalarAtom {
  enum class Kind { symbol, constant, func, func_deriv, abs, sin, cos, sum };
  Kind kind = Kind::symbol;
  std::string name;                     // symbol/constant/func name
  std::vector<std::string> deps;        // func dependency list
  std::vector<std::string> dvars;       // differentiation variables, sorted
  std::shared_ptr<const ScalarExpr> arg;  // abs/sin/cos/sum payload

  friend bool operator==(const ScalarAtom& a, const ScalarAtom& b);
};

int compare(const ScalarAtom& a, const ScalarAtom& b);

struct ScalarTerm {
  Rational coeff = 1;
  std::vector<std::pair<ScalarAtom, int>> powers;  // sorted by atom, exp != 0
};

/// A scalar symbolic expression in expanded normal form: a sum of terms,
/// each an exact rational coefficient times a power product of atoms.
/// Construction keeps the form normalized, so simplify() is the identity on
/// already-built values.
class ScalarExpr {
 public:
  ScalarExpr() = default;

  static ScalarExpr number(Rational r);
  static ScalarExpr number(long n) { return number(Rational(n)); }
  static ScalarExpr symbol(const std::string& name);
  static ScalarExpr constant(const std::string& name);  // c, pi
  static ScalarExpr func(const std::string& name, const std::vector<std::string>& deps);
  static ScalarExpr from_terms(std::vector<ScalarTerm> terms);

  bool is_zero() const { return terms_.empty(); }
  bool is_number() const;
  Rational number_value() const;

  const std::vector<ScalarTerm>& terms() const { return terms_; }

  friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
  friend ScalarExpr operator-(const ScalarExpr& a);
  friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);
  friend bool operator==(const ScalarExpr& a, const ScalarExpr& b);

  /// Integer power; negative exponents of sums become reciprocal atoms.
  ScalarExpr pow(int n) const;

  static ScalarExpr abs_of(const ScalarExpr& e);
  static ScalarExpr sin_of(const ScalarExpr& e);
  static ScalarExpr cos_of(const ScalarExpr& e);

  std::string str() const;
  std::string tex() const;

 private:
  std::vector<ScalarTerm> terms_;
};

/// Partial derivative with the standard rules; unknown functions produce
/// formal derivative atoms (mixed partials commute via sorted variables).
/// d|u|/dx is represented algebraically as u' |u| / u.
ScalarExpr diff(const ScalarExpr& e, const std::string& x);

/// Re-normalization; idempotent and evaluation-preserving.
ScalarExpr simplify(const ScalarExpr& e);

/// Square root of a perfect-square monomial; odd powers contribute their
/// absolute value (sqrt(r^2) = |r|), which is never dropped.
ScalarExpr sqrt_perfect(const ScalarExpr& e);

struct EvalContext {
  std::map<std::string, double> bindings;     // symbols and named constants
  std::map<std::string, double> func_values;  // f -> value at the point
  /// key: "f|x,y" with differentiation variables sorted.
  std::map<std::string, double> func_derivs;

  static std::string deriv_key(const std::string& func,
                               const std::vector<std::string>& dvars);
};

/// IEEE double evaluation. Throws UnboundSymbol for missing bindings.
double eval_at(const ScalarExpr& e, const EvalContext& ctx);

}  // namespace tk
