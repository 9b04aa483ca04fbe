#include "tensorkernel/symmetry.hpp"

#include <algorithm>
#include <set>

namespace tk {

namespace {

// Arrangement key: per slot (set rank, member rank, variance), flattened.
using Key = std::vector<long>;

Key arrangement_key(const std::vector<std::vector<IndexSlot>>& factor_slots,
                    const PropertyTable& t,
                    const std::map<std::string, std::string>& rename) {
  Key key;
  for (const auto& slots : factor_slots) {
    for (const auto& s : slots) {
      auto it = rename.find(s.name);
      const std::string& name = it == rename.end() ? s.name : it->second;
      auto [set_rank, member_rank] = t.name_rank(name);
      key.push_back(set_rank);
      key.push_back(member_rank);
      key.push_back(s.variance == Variance::upper ? 0 : 1);
    }
  }
  return key;
}

// First-appearance canonical renaming of dummy names: each dummy gets the
// first name of its set not used by free indices or earlier assignments.
std::map<std::string, std::string> canonical_rename(
    const std::vector<std::vector<IndexSlot>>& factor_slots,
    const std::set<std::string>& dummies, const std::set<std::string>& frees,
    const PropertyTable& t) {
  std::map<std::string, std::string> ren;
  if (dummies.empty()) return ren;
  std::vector<std::string> used(frees.begin(), frees.end());
  for (const auto& slots : factor_slots) {
    for (const auto& s : slots) {
      if (!dummies.count(s.name) || ren.count(s.name)) continue;
      std::string fresh = t.fresh_name(s.set, used);
      used.push_back(fresh);
      ren[s.name] = fresh;
      if (ren.size() == dummies.size()) return ren;
    }
  }
  return ren;
}

Monomial zero_monomial() {
  Monomial z;
  z.coeff = 0;
  return z;
}

Monomial canonicalise_monomial(const Monomial& m, const PropertyTable& t,
                               std::size_t max_orbit) {
  if (m.factors.empty() || m.coeff == 0) return m;

  std::vector<std::vector<SignedPermutation>> groups;
  std::size_t combos = 1;
  for (const auto& f : m.factors) {
    auto gens = t.factor_generators(f);
    bool contradiction = false;
    auto group =
        generate_group(gens, f.combined_slots().size(), max_orbit, &contradiction);
    if (contradiction) return zero_monomial();
    combos *= group.size();
    if (combos > max_orbit)
      throw OrbitTooLarge("canonicalisation orbit exceeds the configured cap");
    groups.push_back(std::move(group));
  }

  std::vector<std::string> dummy_list = dummy_names(m);
  std::set<std::string> dummies(dummy_list.begin(), dummy_list.end());
  std::set<std::string> frees;
  for (const auto& n : all_names(m))
    if (!dummies.count(n)) frees.insert(n);

  bool flips_allowed = !dummies.empty() && t.symmetric_metric_for("");
  std::size_t flip_count = flips_allowed ? dummy_list.size() : 0;
  if (flip_count >= 63 || combos > (max_orbit >> flip_count))
    throw OrbitTooLarge("canonicalisation orbit exceeds the configured cap");

  std::vector<std::vector<IndexSlot>> base_slots;
  for (const auto& f : m.factors) base_slots.push_back(f.combined_slots());

  bool have_best = false;
  Key best_key;
  int best_sign = 1;
  std::vector<std::vector<IndexSlot>> best_slots;
  std::map<std::string, std::string> best_ren;
  std::map<Key, int> seen_sign;

  std::vector<std::size_t> idx(groups.size(), 0);
  for (;;) {
    // Apply the chosen group element of every factor.
    std::vector<std::vector<IndexSlot>> arranged(base_slots.size());
    int sign = 1;
    for (std::size_t fi = 0; fi < base_slots.size(); ++fi) {
      const SignedPermutation& g = groups[fi][idx[fi]];
      arranged[fi] = g.apply(base_slots[fi]);
      sign *= g.sign;
    }

    for (std::size_t mask = 0; mask < (std::size_t(1) << flip_count); ++mask) {
      std::vector<std::vector<IndexSlot>> flipped = arranged;
      for (std::size_t b = 0; b < flip_count; ++b) {
        if (!(mask & (std::size_t(1) << b))) continue;
        for (auto& slots : flipped)
          for (auto& s : slots)
            if (s.name == dummy_list[b]) s.variance = flip(s.variance);
      }
      auto ren = canonical_rename(flipped, dummies, frees, t);
      Key key = arrangement_key(flipped, t, ren);
      auto [it, inserted] = seen_sign.try_emplace(key, sign);
      if (!inserted && it->second != sign) return zero_monomial();
      if (!have_best || key < best_key) {
        have_best = true;
        best_key = key;
        best_sign = sign;
        best_slots = flipped;
        best_ren = ren;
      }
    }

    // Odometer over per-factor group elements.
    std::size_t fi = 0;
    while (fi < idx.size()) {
      if (++idx[fi] < groups[fi].size()) break;
      idx[fi] = 0;
      ++fi;
    }
    if (fi == idx.size()) break;
  }

  Monomial out = m;
  out.coeff = m.coeff * best_sign;
  for (std::size_t fi = 0; fi < out.factors.size(); ++fi) {
    auto slots = best_slots[fi];
    for (auto& s : slots) {
      auto it = best_ren.find(s.name);
      if (it != best_ren.end()) s.name = it->second;
    }
    out.factors[fi].assign_combined_slots(slots);
  }
  return out;
}

}  // namespace

Expr canonicalise(const Expr& e, const PropertyTable& t, std::size_t max_orbit) {
  return map_monomials(flatten(e), [&](const Monomial& m) {
    return canonicalise_monomial(m, t, max_orbit);
  });
}

namespace {

// All permutations of n slots that permute positions within each block,
// identity elsewhere. Blocks are disjoint position lists.
std::vector<std::vector<int>> block_permutations(const std::vector<std::vector<int>>& blocks,
                                                 std::size_t n) {
  std::vector<std::vector<int>> out;
  std::vector<int> id(n);
  for (std::size_t i = 0; i < n; ++i) id[i] = static_cast<int>(i);
  out.push_back(id);
  for (const auto& block : blocks) {
    if (block.size() < 2) continue;
    std::vector<int> order(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<std::vector<int>> images;
    std::vector<int> perm = order;
    std::sort(perm.begin(), perm.end());
    do {
      images.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<std::vector<int>> next;
    for (const auto& base : out) {
      for (const auto& img : images) {
        std::vector<int> p = base;
        // content at block[i] moves to block[img[i]] on top of base
        std::vector<int> q(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = static_cast<int>(i);
        for (std::size_t i = 0; i < block.size(); ++i)
          q[block[i]] = block[static_cast<std::size_t>(img[i])];
        // compose: apply base then q
        std::vector<int> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = q[static_cast<std::size_t>(base[i])];
        next.push_back(std::move(r));
      }
    }
    out = std::move(next);
  }
  return out;
}

struct TableauBlocks {
  std::vector<std::vector<int>> rows;
  std::vector<std::vector<int>> cols;
  long hook_product = 1;
};

TableauBlocks tableau_blocks(const TableauSpec& spec) {
  TableauBlocks out;
  const auto& shape = spec.shape;
  int nrows = static_cast<int>(shape.size());
  auto cell_index = [&shape](int r, int c) {
    int idx = 0;
    for (int i = 0; i < r; ++i) idx += shape[i];
    return idx + c;
  };
  auto column_height = [&shape, nrows](int c) {
    int h = 0;
    for (int r = 0; r < nrows; ++r)
      if (shape[r] > c) ++h;
    return h;
  };
  for (int r = 0; r < nrows; ++r) {
    std::vector<int> row;
    for (int c = 0; c < shape[r]; ++c) row.push_back(spec.slot_order[cell_index(r, c)]);
    out.rows.push_back(row);
  }
  int ncols = nrows ? shape[0] : 0;
  for (int c = 0; c < ncols; ++c) {
    std::vector<int> col;
    int h = column_height(c);
    for (int r = 0; r < h; ++r) col.push_back(spec.slot_order[cell_index(r, c)]);
    out.cols.push_back(col);
  }
  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < shape[r]; ++c) {
      long arm = shape[r] - c - 1;
      long leg = column_height(c) - r - 1;
      out.hook_product *= arm + leg + 1;
    }
  }
  return out;
}

}  // namespace

std::map<std::vector<int>, Rational> young_projector_terms(const TableauSpec& spec,
                                                           std::size_t n_slots) {
  spec.validate();
  TableauBlocks blocks = tableau_blocks(spec);
  auto row_perms = block_permutations(blocks.rows, n_slots);
  auto col_perms = block_permutations(blocks.cols, n_slots);
  Rational c(1, blocks.hook_product);

  std::map<std::vector<int>, Rational> terms;
  for (const auto& q : col_perms) {
    int sq = permutation_sign(q);
    for (const auto& p : row_perms) {
      // apply p (row symmetrizer) first, then q (column antisymmetrizer)
      std::vector<int> perm(n_slots);
      for (std::size_t i = 0; i < n_slots; ++i)
        perm[i] = q[static_cast<std::size_t>(p[i])];
      terms[perm] += c * sq;
    }
  }
  for (auto it = terms.begin(); it != terms.end();) {
    if (it->second == 0)
      it = terms.erase(it);
    else
      ++it;
  }
  return terms;
}

namespace {

Expr project_monomial(const Monomial& m, const PropertyTable& t,
                      const std::string& only_head) {
  std::vector<Expr> result_terms;
  std::vector<Monomial> pending{m};
  for (std::size_t fi = 0; fi < m.factors.size(); ++fi) {
    const TensorFactor& f = m.factors[fi];
    if (!only_head.empty() && f.head != only_head) continue;
    auto spec = t.projection_tableau_of(f);
    if (!spec) continue;
    std::size_t n = f.combined_slots().size();
    auto terms = young_projector_terms(*spec, n);
    std::vector<Monomial> next;
    for (const auto& base : pending) {
      auto base_slots = base.factors[fi].combined_slots();
      for (const auto& [perm, coeff] : terms) {
        Monomial nm = base;
        std::vector<IndexSlot> slots(n);
        for (std::size_t i = 0; i < n; ++i)
          slots[static_cast<std::size_t>(perm[i])] = base_slots[i];
        nm.factors[fi].assign_combined_slots(slots);
        nm.coeff = base.coeff * coeff;
        next.push_back(std::move(nm));
      }
    }
    pending = std::move(next);
  }
  for (const auto& pm : pending) result_terms.push_back(Expr::from_monomial(pm));
  return flatten(Expr::sum(std::move(result_terms)));
}

}  // namespace

Expr young_project(const Expr& e, const std::string& head, const PropertyTable& t) {
  const HeadEntry* entry = t.head_entry(head);
  bool has_tableau = entry && (entry->tableau || entry->has(PropKind::RiemannTensor));
  if (!has_tableau && !t.has_wrapped_tableau_for(head))
    throw NoSymmetry("head '" + head + "' has no tableau symmetry");
  return map_monomials_expr(
      flatten(e), [&](const Monomial& m) { return project_monomial(m, t, head); });
}

Expr young_project_all(const Expr& e, const PropertyTable& t) {
  return map_monomials_expr(
      flatten(e), [&](const Monomial& m) { return project_monomial(m, t, ""); });
}

}  // namespace tk
