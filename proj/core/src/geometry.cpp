#include "tensorkernel/geometry.hpp"

#include <algorithm>
#include <sstream>

#include "tensorkernel/diagnostics.hpp"

namespace tk {

bool Chart::is_diagonal() const {
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j)
      if (i != j && !metric[i][j].is_zero()) return false;
  return true;
}

namespace {

ScalarExpr determinant(const std::vector<std::vector<ScalarExpr>>& m) {
  std::size_t n = m.size();
  if (n == 1) return m[0][0];
  ScalarExpr det;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::vector<ScalarExpr>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<ScalarExpr> row;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) row.push_back(m[i][j]);
      minor.push_back(std::move(row));
    }
    ScalarExpr cof = m[0][k] * determinant(minor);
    det = (k % 2 == 0) ? det + cof : det - cof;
  }
  return det;
}

std::vector<std::vector<ScalarExpr>> invert(const std::vector<std::vector<ScalarExpr>>& m,
                                            const ScalarExpr& det) {
  std::size_t n = m.size();
  std::vector<std::vector<ScalarExpr>> inv(n, std::vector<ScalarExpr>(n));
  bool diagonal = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !m[i][j].is_zero()) diagonal = false;
  if (diagonal) {
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = m[i][i].pow(-1);
    return inv;
  }
  ScalarExpr det_inv = det.pow(-1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::vector<ScalarExpr>> minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        std::vector<ScalarExpr> row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != i) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
      }
      ScalarExpr cof = determinant(minor);
      if ((i + j) % 2 == 1) cof = -cof;
      inv[i][j] = cof * det_inv;
    }
  }
  return inv;
}

}  // namespace

Chart make_chart(const std::string& name, const std::vector<std::string>& coords,
                 const std::vector<std::vector<ScalarExpr>>& metric) {
  Chart c;
  c.name = name;
  c.coords = coords;
  c.metric = metric;
  std::size_t n = coords.size();
  if (metric.size() != n) throw Error("metric size does not match coordinate count");
  for (const auto& row : metric)
    if (row.size() != n) throw Error("metric is not square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(metric[i][j] == metric[j][i])) throw Error("metric must be symmetric");

  c.det = determinant(metric);
  if (c.det.is_zero()) throw SingularMetric("chart '" + name + "' has det g = 0");
  c.inverse = invert(metric, c.det);

  if (c.is_diagonal()) {
    ScalarExpr prod = ScalarExpr::number(1);
    for (std::size_t i = 0; i < n; ++i) prod = prod * sqrt_perfect(c.metric[i][i]);
    c.sqrt_det_abs = prod;
  } else {
    c.sqrt_det_abs = sqrt_perfect(c.det);
  }

  c.christoffel.assign(n, std::vector<std::vector<ScalarExpr>>(n, std::vector<ScalarExpr>(n)));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t k = 0; k < n; ++k) {
        ScalarExpr sum;
        for (std::size_t d = 0; d < n; ++d) {
          ScalarExpr inner = diff(c.metric[d][k], coords[b]) +
                             diff(c.metric[b][d], coords[k]) -
                             diff(c.metric[b][k], coords[d]);
          sum = sum + c.inverse[a][d] * inner;
        }
        c.christoffel[a][b][k] = ScalarExpr::number(Rational(1, 2)) * sum;
      }
    }
  }
  return c;
}

Chart builtin_chart(const std::string& name) {
  auto zero = ScalarExpr();
  auto one = ScalarExpr::number(1);
  if (name == "cartesian3") {
    std::vector<std::vector<ScalarExpr>> g{{one, zero, zero},
                                           {zero, one, zero},
                                           {zero, zero, one}};
    return make_chart(name, {"x", "y", "z"}, g);
  }
  if (name == "cylindrical") {
    ScalarExpr r = ScalarExpr::symbol("r");
    std::vector<std::vector<ScalarExpr>> g{{one, zero, zero},
                                           {zero, r * r, zero},
                                           {zero, zero, one}};
    return make_chart(name, {"r", "theta", "z"}, g);
  }
  if (name == "spherical") {
    ScalarExpr r = ScalarExpr::symbol("r");
    ScalarExpr sin_theta = ScalarExpr::sin_of(ScalarExpr::symbol("theta"));
    std::vector<std::vector<ScalarExpr>> g{
        {one, zero, zero},
        {zero, r * r, zero},
        {zero, zero, r * r * sin_theta * sin_theta}};
    return make_chart(name, {"r", "theta", "phi"}, g);
  }
  throw UnknownChart("unknown chart '" + name + "'");
}

std::vector<std::vector<ScalarExpr>> inverse_metric(const Chart& c) { return c.inverse; }

std::vector<std::vector<std::vector<ScalarExpr>>> christoffel(const Chart& c) {
  return c.christoffel;
}

ScalarExpr div(const Chart& c, const ComponentField& v) {
  if (v.kind != FieldKind::contravariant)
    throw KindMismatch("Div requires a contravariant vector field");
  if (v.components.size() != c.dim())
    throw KindMismatch("field dimension does not match the chart");
  ScalarExpr sum;
  ScalarExpr inv_sqrt = c.sqrt_det_abs.pow(-1);
  for (std::size_t i = 0; i < c.dim(); ++i)
    sum = sum + inv_sqrt * diff(c.sqrt_det_abs * v.components[i], c.coords[i]);
  return simplify(sum);
}

ComponentField rot(const Chart& c, const ComponentField& w) {
  if (c.dim() != 3) throw DimensionNot3("Rot is defined on three-dimensional charts");
  if (w.kind != FieldKind::covariant)
    throw KindMismatch("Rot requires a covariant vector field");
  if (w.components.size() != 3)
    throw KindMismatch("field dimension does not match the chart");
  ComponentField out;
  out.kind = FieldKind::contravariant;
  out.dependencies = w.dependencies;
  ScalarExpr inv_sqrt = c.sqrt_det_abs.pow(-1);
  auto eps = [](int i, int j, int k) -> int {
    if (i == j || j == k || i == k) return 0;
    return ((j - i) * (k - i) * (k - j) > 0) ? 1 : -1;
  };
  for (int i = 0; i < 3; ++i) {
    ScalarExpr comp;
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        int e = eps(i, j, k);
        if (e == 0) continue;
        ScalarExpr t = diff(w.components[static_cast<std::size_t>(k)],
                            c.coords[static_cast<std::size_t>(j)]);
        comp = (e > 0) ? comp + t : comp - t;
      }
    }
    out.components.push_back(simplify(inv_sqrt * comp));
  }
  return out;
}

ComponentField grad(const Chart& c, const ScalarExpr& f) {
  ComponentField out;
  out.kind = FieldKind::covariant;
  for (const auto& x : c.coords) out.components.push_back(diff(f, x));
  return out;
}

ComponentField physical_components(const Chart& c, const ComponentField& v) {
  if (!c.is_diagonal())
    throw NonOrthogonalChart("physical components require a diagonal metric");
  ComponentField out = v;
  if (v.kind == FieldKind::scalar) return out;
  if (v.components.size() != c.dim())
    throw KindMismatch("field dimension does not match the chart");
  for (std::size_t i = 0; i < c.dim(); ++i) {
    ScalarExpr h = sqrt_perfect(c.metric[i][i]);
    out.components[i] = (v.kind == FieldKind::contravariant)
                            ? simplify(h * v.components[i])
                            : simplify(v.components[i] * h.pow(-1));
  }
  return out;
}

std::vector<std::vector<std::vector<ScalarExpr>>> metric_compatibility_check(const Chart& c) {
  std::size_t n = c.dim();
  std::vector<std::vector<std::vector<ScalarExpr>>> out(
      n, std::vector<std::vector<ScalarExpr>>(n, std::vector<ScalarExpr>(n)));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        ScalarExpr v = diff(c.metric[i][j], c.coords[k]);
        for (std::size_t l = 0; l < n; ++l) {
          v = v - c.christoffel[l][i][k] * c.metric[l][j];
          v = v - c.christoffel[l][j][k] * c.metric[i][l];
        }
        out[k][i][j] = simplify(v);
      }
    }
  }
  return out;
}

MaxwellResiduals maxwell_residuals(const Chart& c, const ComponentField& B,
                                   const ComponentField& D, const ComponentField& j,
                                   const ComponentField& H, const ComponentField& E,
                                   const ScalarExpr& rho) {
  MaxwellResiduals out;
  ScalarExpr four_pi = ScalarExpr::number(4) * ScalarExpr::constant("pi");
  ScalarExpr inv_c = ScalarExpr::constant("c").pow(-1);

  out.div_b = div(c, B);
  out.gauss = simplify(div(c, D) - four_pi * rho);

  ComponentField rot_h = rot(c, H);
  ComponentField rot_e = rot(c, E);
  for (std::size_t i = 0; i < c.dim(); ++i) {
    ScalarExpr a = rot_h.components[i] + inv_c * diff(D.components[i], "t") -
                   four_pi * inv_c * j.components[i];
    out.ampere.push_back(simplify(a));
    ScalarExpr f = rot_e.components[i] + inv_c * diff(B.components[i], "t");
    out.faraday.push_back(simplify(f));
  }
  return out;
}

MaxwellFields default_maxwell_fields(const Chart& c) {
  std::vector<std::string> deps{"t"};
  deps.insert(deps.end(), c.coords.begin(), c.coords.end());
  auto vec = [&deps](const std::string& base, FieldKind kind, bool underscore) {
    ComponentField f;
    f.kind = kind;
    f.dependencies = deps;
    for (int i = 1; i <= 3; ++i) {
      std::string name = underscore ? base + "_" + std::to_string(i)
                                    : base + std::to_string(i);
      f.components.push_back(ScalarExpr::func(name, deps));
    }
    return f;
  };
  MaxwellFields f;
  f.B = vec("B", FieldKind::contravariant, false);
  f.D = vec("D", FieldKind::contravariant, false);
  f.j = vec("j", FieldKind::contravariant, false);
  f.H = vec("H", FieldKind::covariant, true);
  f.E = vec("E", FieldKind::covariant, true);
  f.rho = ScalarExpr::func("rho", deps);
  return f;
}

MaxwellFields parse_field_spec(const std::string& text, const Chart& c) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "tensorkernel-fields v1")
    throw IoError("field spec must start with 'tensorkernel-fields v1'");

  MaxwellFields out = default_maxwell_fields(c);
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw IoError("malformed field line: " + line);
    std::string name = trim(line.substr(0, eq));
    std::string rest = trim(line.substr(eq + 1));

    std::vector<std::string> deps;
    std::size_t dep_pos = rest.find("depends");
    std::string value = trim(dep_pos == std::string::npos ? rest : rest.substr(0, dep_pos));
    if (dep_pos != std::string::npos) {
      std::istringstream ds(rest.substr(dep_pos + 7));
      std::string d;
      while (std::getline(ds, d, ',')) {
        d = trim(d);
        if (!d.empty()) deps.push_back(d);
      }
    }
    if (deps.empty()) {
      deps.push_back("t");
      deps.insert(deps.end(), c.coords.begin(), c.coords.end());
    }

    auto parse_vec = [&](FieldKind kind) {
      if (value.size() < 2 || value.front() != '[' || value.back() != ']')
        throw IoError("expected [c1,c2,c3] components for field " + name);
      ComponentField f;
      f.kind = kind;
      f.dependencies = deps;
      std::istringstream cs(value.substr(1, value.size() - 2));
      std::string comp;
      while (std::getline(cs, comp, ',')) {
        comp = trim(comp);
        if (!comp.empty()) f.components.push_back(ScalarExpr::func(comp, deps));
      }
      if (f.components.size() != c.dim())
        throw IoError("field " + name + " needs " + std::to_string(c.dim()) +
                      " components");
      return f;
    };
    if (name == "B") out.B = parse_vec(FieldKind::contravariant);
    else if (name == "D") out.D = parse_vec(FieldKind::contravariant);
    else if (name == "j") out.j = parse_vec(FieldKind::contravariant);
    else if (name == "H") out.H = parse_vec(FieldKind::covariant);
    else if (name == "E") out.E = parse_vec(FieldKind::covariant);
    else if (name == "rho") out.rho = ScalarExpr::func(value, deps);
    else throw IoError("unknown field '" + name + "'");
  }
  return out;
}

namespace {

std::string matrix_str(const std::vector<std::vector<ScalarExpr>>& m, bool tex) {
  std::ostringstream os;
  for (const auto& row : m) {
    os << "[";
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) os << ", ";
      os << (tex ? row[j].tex() : row[j].str());
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace

std::string chart_report(const Chart& c, bool tex) {
  std::ostringstream os;
  os << "chart " << c.name << "\n";
  os << "coords:";
  for (const auto& x : c.coords) os << " " << x;
  os << "\n";
  os << "lg:\n" << matrix_str(c.metric, tex);
  os << "ug:\n" << matrix_str(c.inverse, tex);
  os << "sqrt|det g| = " << (tex ? c.sqrt_det_abs.tex() : c.sqrt_det_abs.str()) << "\n";
  return os.str();
}

std::string christoffel_report(const Chart& c, bool tex) {
  std::ostringstream os;
  os << "christoffel " << c.name << "\n";
  bool any = false;
  for (std::size_t a = 0; a < c.dim(); ++a) {
    for (std::size_t b = 0; b < c.dim(); ++b) {
      for (std::size_t k = b; k < c.dim(); ++k) {
        const ScalarExpr& g = c.christoffel[a][b][k];
        if (g.is_zero()) continue;
        any = true;
        os << "Gamma^" << c.coords[a] << "_{" << c.coords[b] << " " << c.coords[k]
           << "} = " << (tex ? g.tex() : g.str()) << "\n";
      }
    }
  }
  if (!any) os << "all components vanish\n";
  return os.str();
}

std::string maxwell_report(const Chart& c, const MaxwellFields& f, bool tex) {
  MaxwellResiduals r = maxwell_residuals(c, f.B, f.D, f.j, f.H, f.E, f.rho);
  auto s = [tex](const ScalarExpr& e) { return tex ? e.tex() : e.str(); };
  std::ostringstream os;
  os << "maxwell " << c.name << "\n";
  os << "div B = " << s(r.div_b) << "\n";
  os << "div D - 4 pi rho = " << s(r.gauss) << "\n";
  for (std::size_t i = 0; i < r.ampere.size(); ++i)
    os << "(rot H + (1/c) dD/dt - (4 pi/c) j)[" << i + 1 << "] = " << s(r.ampere[i])
       << "\n";
  for (std::size_t i = 0; i < r.faraday.size(); ++i)
    os << "(rot E + (1/c) dB/dt)[" << i + 1 << "] = " << s(r.faraday[i]) << "\n";
  return os.str();
}

}  // namespace tk
