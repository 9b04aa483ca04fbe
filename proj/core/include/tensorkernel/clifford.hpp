#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tensorkernel/expr.hpp"
#include "tensorkernel/properties.hpp"

namespace tk {

/// Dimension of the spinor space over an n-dimensional vector space:
/// 2^(n/2) for even n, 2^((n-1)/2) for odd n.
long spinor_dimension(int n);

/// The elementary Clifford product of a rank-1 gamma with a rank-q one:
///   gamma_a gamma_{b1..bq} = gamma_{a b1..bq}
///                          + sum_j (-1)^(j+1) g_{a bj} gamma_{b1..^bj..bq}
/// Gamma factors acquiring a repeated index vanish by antisymmetry, as do
/// factors whose rank exceeds the index-set dimension.
std::vector<Monomial> clifford_step(const IndexSlot& a, const std::vector<IndexSlot>& b,
                                    const std::string& gamma_head,
                                    const std::string& metric_head,
                                    std::optional<int> dimension);

/// General rank-p x rank-q product, computed by recursively splitting the
/// left factor through clifford_step. Every resulting monomial carries at
/// most one gamma factor plus metric factors.
std::vector<Monomial> gamma_product(const std::vector<IndexSlot>& a,
                                    const std::vector<IndexSlot>& b,
                                    const std::string& gamma_head,
                                    const std::string& metric_head,
                                    std::optional<int> dimension);

/// @join: replaces adjacent pairs of gamma factors by their Clifford product
/// expansion. With expand, products of antisymmetrized blocks expand fully;
/// without it only rank-1 left factors are joined. With repeat, passes
/// iterate until a fixpoint. Requires a GammaMatrix declaration.
Expr join(const Expr& e, const PropertyTable& t, bool expand, bool repeat);

}  // namespace tk
