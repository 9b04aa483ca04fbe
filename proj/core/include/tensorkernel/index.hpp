#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace tk {

enum class Variance { upper, lower };

inline char variance_char(Variance v) { return v == Variance::upper ? 'u' : 'd'; }
inline Variance flip(Variance v) {
  return v == Variance::upper ? Variance::lower : Variance::upper;
}

/// One abstract index occurrence. The set name records which declared index
/// set the name was resolved against at parse time; structural identity of
/// slots is (name, variance) since a name belongs to exactly one set.
struct IndexSlot {
  std::string name;
  Variance variance = Variance::lower;
  std::string set;

  friend bool operator==(const IndexSlot& a, const IndexSlot& b) {
    return a.name == b.name && a.variance == b.variance;
  }
};

/// A declared index set: finite member names in declaration order plus
/// optional generated families ("u#" declares u1, u2, ...) and an optional
/// integer component range.
struct IndexSet {
  std::string name;
  std::vector<std::string> members;
  std::vector<std::string> families;
  std::optional<std::pair<int, int>> range;

  int dimension() const { return range ? range->second - range->first + 1 : 0; }
  bool has_range() const { return range.has_value(); }
};

}  // namespace tk
