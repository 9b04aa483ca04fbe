#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "tensorkernel/diagnostics.hpp"
#include "tensorkernel/index.hpp"
#include "tensorkernel/rational.hpp"

namespace tk {

/// A derivative operator applied to a tensor factor, e.g. the \partial_{c}
/// in \partial_{c}{g_{a b}}. Wrappers are stored outermost-first.
struct DerivOp {
  std::string head;
  std::vector<IndexSlot> slots;

  friend bool operator==(const DerivOp& a, const DerivOp& b) {
    return a.head == b.head && a.slots == b.slots;
  }
};

/// One tensor factor: head symbol, ordered index slots, and any derivative
/// wrappers applied to it.
struct TensorFactor {
  std::string head;
  std::vector<IndexSlot> slots;
  std::vector<DerivOp> derivs;

  bool has_derivs() const { return !derivs.empty(); }

  /// Combined slot view: wrapper slots (outermost first) followed by the
  /// factor's own slots. Symmetry machinery permutes this vector.
  std::vector<IndexSlot> combined_slots() const;
  std::size_t wrapper_slot_count() const;
  void assign_combined_slots(const std::vector<IndexSlot>& slots);

  friend bool operator==(const TensorFactor& a, const TensorFactor& b) {
    return a.head == b.head && a.slots == b.slots && a.derivs == b.derivs;
  }
};

/// A monomial in normal form: exact rational coefficient times an ordered
/// factor list. Factor order is significant across noncommuting factors.
struct Monomial {
  Rational coeff = 1;
  std::vector<TensorFactor> factors;

  bool is_scalar() const { return factors.empty(); }

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.coeff == b.coeff && a.factors == b.factors;
  }
};

/// Returns true when the factor lists match exactly (coefficients ignored).
bool same_factors(const Monomial& a, const Monomial& b);

/// Immutable symbolic expression tree. Sums and products are n-ary; a
/// product carries a rational coefficient and may contain sum children
/// (e.g. between @substitute and @distribute). Scalars are bare rationals.
class Expr {
 public:
  struct Sum {
    std::vector<Expr> terms;
  };
  struct Product {
    Rational coeff = 1;
    std::vector<Expr> factors;
  };
  using Node = std::variant<Rational, TensorFactor, Sum, Product>;

  Expr() : node_(Rational(0)) {}
  explicit Expr(Rational r) : node_(std::move(r)) {}
  explicit Expr(TensorFactor f) : node_(std::move(f)) {}
  explicit Expr(Sum s) : node_(std::move(s)) {}
  explicit Expr(Product p) : node_(std::move(p)) {}

  static Expr scalar(Rational r) { return Expr(std::move(r)); }
  static Expr factor(TensorFactor f) { return Expr(std::move(f)); }
  static Expr sum(std::vector<Expr> terms);
  static Expr product(Rational coeff, std::vector<Expr> factors);
  static Expr from_monomial(const Monomial& m);
  static Expr from_monomials(const std::vector<Monomial>& ms);

  bool is_scalar() const { return std::holds_alternative<Rational>(node_); }
  bool is_factor() const { return std::holds_alternative<TensorFactor>(node_); }
  bool is_sum() const { return std::holds_alternative<Sum>(node_); }
  bool is_product() const { return std::holds_alternative<Product>(node_); }
  bool is_zero() const;

  const Rational& scalar_value() const { return std::get<Rational>(node_); }
  const TensorFactor& factor_value() const { return std::get<TensorFactor>(node_); }
  const Sum& sum_value() const { return std::get<Sum>(node_); }
  const Product& product_value() const { return std::get<Product>(node_); }

  /// True when the tree is a plain sum of monomials (no product has a sum
  /// child). Such expressions convert losslessly to monomial lists.
  bool is_distributed() const;

  /// Monomial view of a distributed expression. Throws Error otherwise.
  std::vector<Monomial> monomials() const;

  /// Sum terms at the top level (a non-sum node is a single term).
  std::vector<Expr> terms() const;

  friend bool operator==(const Expr& a, const Expr& b) { return a.node_ == b.node_; }

  const Node& node() const { return node_; }

 private:
  Node node_;
};

/// Structural flattening: associativity of sums/products, scalar folding
/// into coefficients, zero-term elimination, singleton unwrapping. Products
/// of sums are left in place; sibling monomials are not merged. Idempotent.
Expr flatten(const Expr& e);

/// flatten plus merging of sibling monomials identical up to coefficient
/// (the sum normal form). Idempotent.
Expr normalize(const Expr& e);

/// Free indices of an expression: names occurring exactly once per monomial,
/// with variance, sorted by (name, variance). Validates the index invariants
/// (a name at most twice per monomial, opposite variance if twice; all sum
/// terms agree) and throws FreeIndexMismatch / SyntaxError text on violation.
std::vector<IndexSlot> free_indices(const Expr& e);

/// Dummy names of one monomial (names appearing twice).
std::vector<std::string> dummy_names(const Monomial& m);
std::vector<std::string> all_names(const Monomial& m);

/// Abelian-group sum. Free-index multisets of both operands must agree.
Expr add(const Expr& a, const Expr& b);

/// Tensor product. Dummy names of `b` colliding with names of `a` are
/// renamed to fresh names of their set before the product is formed.
/// The fresh-name supply is provided by the caller (session property table).
Expr tensor_product(const Expr& a, const Expr& b,
                    const std::function<std::string(const std::string& set,
                                                    const std::vector<std::string>& used)>&
                        fresh_name);

/// Contraction over the last upper and last lower slot of every monomial.
Expr contract_last(const Expr& e,
                   const std::function<std::string(const std::string& set,
                                                   const std::vector<std::string>& used)>&
                       fresh_name);

/// Applies fn to every monomial of a distributed subtree; inside products
/// with sum children, fn is applied within each sum child independently.
Expr map_monomials(const Expr& e, const std::function<Monomial(const Monomial&)>& fn);

/// Like map_monomials but a monomial may expand into an expression.
Expr map_monomials_expr(const Expr& e, const std::function<Expr(const Monomial&)>& fn);

}  // namespace tk
