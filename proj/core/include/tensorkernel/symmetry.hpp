#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tensorkernel/expr.hpp"
#include "tensorkernel/properties.hpp"
#include "tensorkernel/rational.hpp"

namespace tk {

/// Monoterm canonicalization. Per monomial, the symmetry group of every
/// factor (from its tableau generators) is enumerated together with
/// admissible dummy-pair variance exchanges; dummies are then renamed in
/// first-appearance order to the first unused names of their set, and the
/// representative minimal under the slot-sequence order is selected with
/// its accumulated sign. A monomial whose orbit contains both signs of one
/// arrangement is zero. Throws OrbitTooLarge beyond max_orbit combinations.
Expr canonicalise(const Expr& e, const PropertyTable& t, std::size_t max_orbit);

/// The Young projector of a tableau as a coefficient table over slot
/// permutations: P = (column antisymmetrizer . row symmetrizer) / hooks.
/// Keys are permutation image vectors in SignedPermutation convention.
std::map<std::vector<int>, Rational> young_projector_terms(const TableauSpec& spec,
                                                           std::size_t n_slots);

/// Replaces every occurrence of `head` by its image under the Young
/// projector of its declared tableau. Throws NoSymmetry when the head has
/// no tableau (directly or via RiemannTensor / SatisfiesBianchi).
Expr young_project(const Expr& e, const std::string& head, const PropertyTable& t);

/// @young_project_tensor form: projects every factor that carries a tableau.
Expr young_project_all(const Expr& e, const PropertyTable& t);

}  // namespace tk
