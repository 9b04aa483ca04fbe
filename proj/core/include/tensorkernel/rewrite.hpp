#pragma once

#include <cstddef>
#include <vector>

#include "tensorkernel/expr.hpp"
#include "tensorkernel/properties.hpp"

namespace tk {

/// Canonical factor order for products and the monomial order used when
/// collect_terms sorts a sum: declared heads first (declaration order), then
/// alphabetical; higher combined arity before lower; then slot sequences by
/// (name rank, variance) with upper before lower.
int compare_factors(const TensorFactor& a, const TensorFactor& b, const PropertyTable& t);
int compare_monomials(const Monomial& a, const Monomial& b, const PropertyTable& t);

/// Opens all brackets: no product node keeps a sum child; coefficients are
/// multiplied through. Term order is the left-to-right expansion order.
Expr distribute(const Expr& e);

/// Sorts commuting factors into canonical head order within each monomial.
/// A transposition of a declared AntiCommuting pair flips the sign; factors
/// of a noncommuting class keep their relative order.
Expr prodsort(const Expr& e, const PropertyTable& t);

struct SubstitutionRule {
  TensorFactor lhs;  // single tensor pattern with distinct abstract indices
  Expr rhs;
};

/// Replaces every factor matching the rule's lhs (up to index renaming) by
/// the rhs with the matched renaming applied; rhs dummies are freshened to
/// avoid capture. With repeat, passes iterate until a fixpoint.
Expr substitute(const Expr& e, const SubstitutionRule& rule, PropertyTable& t, bool repeat);

/// Contracts bare metric factors: g_{ad} g^{de} -> delta; a metric paired
/// with any other factor's slot raises or lowers that slot and disappears.
/// Metrics under a derivative are opaque. With repeat, runs to fixpoint.
Expr eliminate_metric(const Expr& e, const PropertyTable& t, bool repeat);

/// Contracts Kronecker deltas; a delta trace becomes the index-set dimension
/// when declared. When the delta's head also carries Metric, bare metric
/// contractions of that head are eliminated as well.
Expr eliminate_kr(const Expr& e, const PropertyTable& t);

/// Merges monomials identical up to coefficient, drops zero monomials and
/// sorts the surviving terms into the canonical monomial order.
Expr collect_terms(const Expr& e, const PropertyTable& t);

/// Runs the session's PostDefaultRules pipeline in declared order.
Expr apply_post_rules(const Expr& e, PropertyTable& t, std::size_t max_orbit);

}  // namespace tk
