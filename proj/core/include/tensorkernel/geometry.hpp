#pragma once

#include <string>
#include <vector>

#include "tensorkernel/scalar.hpp"

namespace tk {

/// A named coordinate chart: coordinate symbols, metric matrix, and caches
/// for the inverse metric, determinant and Christoffel symbols. Caches are
/// filled on construction and immutable afterwards.
struct Chart {
  std::string name;
  std::vector<std::string> coords;
  std::vector<std::vector<ScalarExpr>> metric;   // g_ij
  std::vector<std::vector<ScalarExpr>> inverse;  // g^ij
  ScalarExpr det;
  ScalarExpr sqrt_det_abs;  // sqrt(|det g|)
  /// christoffel[a][b][c] = Gamma^a_{bc}
  std::vector<std::vector<std::vector<ScalarExpr>>> christoffel;

  std::size_t dim() const { return coords.size(); }
  bool is_diagonal() const;
};

enum class FieldKind { scalar, contravariant, covariant };

struct ComponentField {
  FieldKind kind = FieldKind::scalar;
  std::vector<ScalarExpr> components;
  std::vector<std::string> dependencies;
};

/// Builds a chart from a metric; computes inverse, determinant and
/// Christoffel symbols. Throws SingularMetric when det g = 0.
Chart make_chart(const std::string& name, const std::vector<std::string>& coords,
                 const std::vector<std::vector<ScalarExpr>>& metric);

/// cartesian3, cylindrical or spherical. Throws UnknownChart otherwise.
Chart builtin_chart(const std::string& name);

std::vector<std::vector<ScalarExpr>> inverse_metric(const Chart& c);

/// Gamma^a_{bc} = (1/2) g^{ad} (d_b g_{dc} + d_c g_{bd} - d_d g_{bc}).
std::vector<std::vector<std::vector<ScalarExpr>>> christoffel(const Chart& c);

/// Div v = (1/sqrt|g|) d_i (sqrt|g| v^i); requires a contravariant field.
ScalarExpr div(const Chart& c, const ComponentField& v);

/// (rot w)^i = eps^{ijk} d_j w_k / sqrt|g|; requires a 3d covariant field.
ComponentField rot(const Chart& c, const ComponentField& w);

/// (grad f)_i = d_i f.
ComponentField grad(const Chart& c, const ScalarExpr& f);

/// Physical (unit-length) components via Lame coefficients h_i = sqrt(g_ii);
/// requires a diagonal metric.
ComponentField physical_components(const Chart& c, const ComponentField& v);

/// nabla_k g_ij = d_k g_ij - Gamma^l_{ik} g_lj - Gamma^l_{jk} g_il,
/// indexed [k][i][j]; identically zero for charts built from their metric.
std::vector<std::vector<std::vector<ScalarExpr>>> metric_compatibility_check(const Chart& c);

struct MaxwellResiduals {
  ScalarExpr div_b;                    // Div B
  ScalarExpr gauss;                    // Div D - 4 pi rho
  std::vector<ScalarExpr> ampere;      // Rot H + (1/c) dD/dt - (4 pi/c) j
  std::vector<ScalarExpr> faraday;     // Rot E + (1/c) dB/dt
};

MaxwellResiduals maxwell_residuals(const Chart& c, const ComponentField& B,
                                   const ComponentField& D, const ComponentField& j,
                                   const ComponentField& H, const ComponentField& E,
                                   const ScalarExpr& rho);

/// The paper's symbolic field setup on a chart: B, D, j contravariant,
/// H, E covariant, rho scalar, all depending on t and the coordinates.
struct MaxwellFields {
  ComponentField B, D, j, H, E;
  ScalarExpr rho;
};
MaxwellFields default_maxwell_fields(const Chart& c);

/// Parses the `tensorkernel-fields v1` line format.
MaxwellFields parse_field_spec(const std::string& text, const Chart& c);

// --- report rendering (CLI surface) ---
std::string chart_report(const Chart& c, bool tex);
std::string christoffel_report(const Chart& c, bool tex);
std::string maxwell_report(const Chart& c, const MaxwellFields& f, bool tex);

}  // namespace tk
