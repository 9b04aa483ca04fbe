#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace tk {

/// A signed permutation of slot positions. `perm[i]` is the position the
/// content of slot i moves to, so applying to a slot vector v yields w with
/// w[perm[i]] = v[i]. Composition satisfies
///   apply(compose(a, b), v) == apply(a, apply(b, v)).
struct SignedPermutation {
  std::vector<int> perm;
  int sign = 1;

  static SignedPermutation identity(std::size_t n) {
    SignedPermutation p;
    p.perm.resize(n);
    std::iota(p.perm.begin(), p.perm.end(), 0);
    return p;
  }

  static SignedPermutation transposition(std::size_t n, int i, int j, int sign) {
    SignedPermutation p = identity(n);
    std::swap(p.perm[i], p.perm[j]);
    p.sign = sign;
    return p;
  }

  std::size_t size() const { return perm.size(); }

  friend bool operator==(const SignedPermutation& a, const SignedPermutation& b) {
    return a.perm == b.perm && a.sign == b.sign;
  }
  friend bool operator<(const SignedPermutation& a, const SignedPermutation& b) {
    if (a.perm != b.perm) return a.perm < b.perm;
    return a.sign < b.sign;
  }

  template <typename T>
  std::vector<T> apply(const std::vector<T>& v) const {
    std::vector<T> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[perm[i]] = v[i];
    return out;
  }
};

inline SignedPermutation compose(const SignedPermutation& a, const SignedPermutation& b) {
  // apply b first, then a.
  SignedPermutation c;
  c.perm.resize(b.perm.size());
  for (std::size_t i = 0; i < b.perm.size(); ++i) c.perm[i] = a.perm[b.perm[i]];
  c.sign = a.sign * b.sign;
  return c;
}

/// Sign of a plain permutation given as an image vector.
int permutation_sign(const std::vector<int>& perm);

}  // namespace tk
