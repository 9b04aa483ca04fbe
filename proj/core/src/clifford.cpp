#include "tensorkernel/clifford.hpp"

#include <set>

namespace tk {

long spinor_dimension(int n) {
  if (n < 1) throw Error("spinor dimension requires n >= 1");
  int half = n / 2;  // floor: covers both 2^(n/2) and 2^((n-1)/2)
  return 1L << half;
}

namespace {

bool has_repeated_name(const std::vector<IndexSlot>& slots) {
  std::set<std::string> seen;
  for (const auto& s : slots)
    if (!seen.insert(s.name).second) return true;
  return false;
}

// nullopt = the factor is zero (repeated index or rank above the dimension).
std::optional<TensorFactor> make_gamma(const std::vector<IndexSlot>& slots,
                                       const std::string& gamma_head,
                                       std::optional<int> dimension) {
  if (has_repeated_name(slots)) return std::nullopt;
  if (dimension && static_cast<int>(slots.size()) > *dimension) return std::nullopt;
  TensorFactor f;
  f.head = gamma_head;
  f.slots = slots;
  return f;
}

TensorFactor make_metric(const IndexSlot& a, const IndexSlot& b,
                         const std::string& metric_head) {
  TensorFactor f;
  f.head = metric_head;
  f.slots = {a, b};
  return f;
}

}  // namespace

std::vector<Monomial> clifford_step(const IndexSlot& a, const std::vector<IndexSlot>& b,
                                    const std::string& gamma_head,
                                    const std::string& metric_head,
                                    std::optional<int> dimension) {
  std::vector<Monomial> out;

  std::vector<IndexSlot> combined;
  combined.push_back(a);
  combined.insert(combined.end(), b.begin(), b.end());
  if (auto g = make_gamma(combined, gamma_head, dimension)) {
    Monomial m;
    if (!g->slots.empty()) m.factors.push_back(*g);
    out.push_back(std::move(m));
  }

  for (std::size_t j = 0; j < b.size(); ++j) {
    Monomial m;
    m.coeff = (j % 2 == 0) ? 1 : -1;  // (-1)^(j+1) with 1-based j
    m.factors.push_back(make_metric(a, b[j], metric_head));
    std::vector<IndexSlot> rest;
    for (std::size_t k = 0; k < b.size(); ++k)
      if (k != j) rest.push_back(b[k]);
    auto g = make_gamma(rest, gamma_head, dimension);
    if (!g) continue;
    if (!g->slots.empty()) m.factors.push_back(*g);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Monomial> gamma_product(const std::vector<IndexSlot>& a,
                                    const std::vector<IndexSlot>& b,
                                    const std::string& gamma_head,
                                    const std::string& metric_head,
                                    std::optional<int> dimension) {
  if (a.empty()) {
    std::vector<Monomial> out;
    Monomial m;
    if (auto g = make_gamma(b, gamma_head, dimension)) {
      if (!g->slots.empty()) m.factors.push_back(*g);
      out.push_back(std::move(m));
    }
    return out;
  }
  if (a.size() == 1) return clifford_step(a.front(), b, gamma_head, metric_head, dimension);

  IndexSlot head_slot = a.front();
  std::vector<IndexSlot> rest(a.begin() + 1, a.end());

  // gamma_A gamma_B = gamma_a (gamma_A' gamma_B)
  //                 - sum_j (-1)^(j+1) g_{a A'_j} (gamma_{A'\j} gamma_B)
  std::vector<Monomial> out;
  for (const Monomial& m : gamma_product(rest, b, gamma_head, metric_head, dimension)) {
    // Left-multiply the single gamma factor of m by gamma_a.
    std::vector<IndexSlot> c;
    std::vector<TensorFactor> metrics;
    for (const auto& f : m.factors) {
      if (f.head == gamma_head)
        c = f.slots;
      else
        metrics.push_back(f);
    }
    for (const Monomial& s : clifford_step(head_slot, c, gamma_head, metric_head, dimension)) {
      Monomial nm;
      nm.coeff = m.coeff * s.coeff;
      nm.factors = s.factors;
      nm.factors.insert(nm.factors.end(), metrics.begin(), metrics.end());
      out.push_back(std::move(nm));
    }
  }
  for (std::size_t j = 0; j < rest.size(); ++j) {
    Rational sign = (j % 2 == 0) ? -1 : 1;  // -(-1)^(j+1), 1-based j
    std::vector<IndexSlot> reduced;
    for (std::size_t k = 0; k < rest.size(); ++k)
      if (k != j) reduced.push_back(rest[k]);
    TensorFactor g = make_metric(head_slot, rest[j], metric_head);
    for (const Monomial& m : gamma_product(reduced, b, gamma_head, metric_head, dimension)) {
      Monomial nm;
      nm.coeff = m.coeff * sign;
      nm.factors.push_back(g);
      nm.factors.insert(nm.factors.end(), m.factors.begin(), m.factors.end());
      out.push_back(std::move(nm));
    }
  }
  return out;
}

namespace {

struct GammaContext {
  std::string gamma_head;
  std::string metric_head;
};

bool is_bare_gamma(const Expr& e, const std::string& gamma_head) {
  return e.is_factor() && e.factor_value().head == gamma_head &&
         e.factor_value().derivs.empty();
}

Expr join_pass(const Expr& e, const PropertyTable& t, const GammaContext& ctx, bool expand,
               bool* changed) {
  if (e.is_scalar() || e.is_factor()) return e;
  if (e.is_sum()) {
    std::vector<Expr> ts;
    for (const auto& term : e.sum_value().terms)
      ts.push_back(join_pass(term, t, ctx, expand, changed));
    return flatten(Expr::sum(std::move(ts)));
  }
  const auto& p = e.product_value();
  std::vector<Expr> out;
  std::size_t i = 0;
  while (i < p.factors.size()) {
    const Expr& cur = p.factors[i];
    if (i + 1 < p.factors.size() && is_bare_gamma(cur, ctx.gamma_head) &&
        is_bare_gamma(p.factors[i + 1], ctx.gamma_head)) {
      const auto& lhs = cur.factor_value().slots;
      const auto& rhs = p.factors[i + 1].factor_value().slots;
      if (expand || lhs.size() == 1) {
        std::optional<int> dim;
        if (!lhs.empty()) dim = t.dimension_of_name(lhs.front().name);
        else if (!rhs.empty()) dim = t.dimension_of_name(rhs.front().name);
        auto monos = gamma_product(lhs, rhs, ctx.gamma_head, ctx.metric_head, dim);
        out.push_back(Expr::from_monomials(monos));
        *changed = true;
        i += 2;
        continue;
      }
    }
    if (cur.is_sum()) {
      out.push_back(join_pass(cur, t, ctx, expand, changed));
    } else {
      out.push_back(cur);
    }
    ++i;
  }
  return flatten(Expr::product(p.coeff, std::move(out)));
}

}  // namespace

Expr join(const Expr& e, const PropertyTable& t, bool expand, bool repeat) {
  GammaContext ctx;
  auto head = t.gamma_head();
  if (!head) throw MissingGammaMetric("no GammaMatrix declaration in scope");
  ctx.gamma_head = *head;
  ctx.metric_head = t.gamma_metric(*head);
  if (ctx.metric_head.empty())
    throw MissingGammaMetric("GammaMatrix declaration names no metric");

  Expr cur = flatten(e);
  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;
    Expr next = join_pass(cur, t, ctx, expand, &changed);
    bool stable = (next == cur);
    cur = std::move(next);
    if (!repeat || !changed || stable) break;
  }
  return cur;
}

}  // namespace tk
