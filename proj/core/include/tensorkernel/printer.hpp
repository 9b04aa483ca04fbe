#pragma once

#include <string>

#include "tensorkernel/expr.hpp"

namespace tk {

/// Deterministic, re-parseable plain text: `-4 \gamma_{c d} + 21 g_{c d}`.
std::string print_plain(const Expr& e);
std::string print_plain(const Monomial& m);
std::string print_plain(const TensorFactor& f);

/// TeX math fragment: `{\delta}^{a}\,_{b}`, coefficients as `2\,` / \frac.
std::string print_tex(const Expr& e);

}  // namespace tk
