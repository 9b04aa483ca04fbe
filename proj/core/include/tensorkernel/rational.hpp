#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace tk {

using Integer = boost::multiprecision::cpp_int;

/// Exact rational coefficient type. All symbolic coefficients in the kernel
/// are rationals; floats never enter the symbolic core.
using Rational = boost::multiprecision::cpp_rational;

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace tk
