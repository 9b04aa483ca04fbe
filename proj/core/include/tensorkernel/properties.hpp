#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tensorkernel/diagnostics.hpp"
#include "tensorkernel/expr.hpp"
#include "tensorkernel/index.hpp"
#include "tensorkernel/permutation.hpp"

namespace tk {

/// Young-diagram symmetry carrier: weakly decreasing row lengths plus the
/// assignment of factor slot positions to tableau cells in row-reading
/// order (slot_order[cell] = slot position).
struct TableauSpec {
  std::vector<int> shape;
  std::vector<int> slot_order;

  int cell_count() const {
    int n = 0;
    for (int r : shape) n += r;
    return n;
  }
  void validate() const;
};

enum class PropKind {
  Metric,
  KroneckerDelta,
  PartialDerivative,
  Derivative,
  GammaMatrix,
  SelfNonCommuting,
  TableauSymmetry,
  RiemannTensor,
  SatisfiesBianchi,
};

enum class PairRelation { commuting, anticommuting, noncommuting };

/// One algorithm invocation, as stored in PostDefaultRules.
struct AlgoCall {
  std::string name;
  int bangs = 1;                  // 1 = apply once, 2 = repeat to fixpoint
  std::optional<int> depth;       // the `!2` form
  std::vector<std::string> args;  // brace arguments such as {expand}
};

/// Per-head registry entry.
struct HeadEntry {
  std::set<PropKind> kinds;
  std::string gamma_metric;               // GammaMatrix(metric=...)
  std::optional<TableauSpec> tableau;     // explicit TableauSymmetry on the bare head
  std::optional<int> arity;               // fixed slot count once seen
  bool variadic = false;                  // declared with a # slot pattern
  int decl_order = -1;                    // first property-declaration index

  bool has(PropKind k) const { return kinds.count(k) != 0; }
};

/// Session registry of declared properties, index sets and post rules.
/// All rewrite algorithms consult this table; reads are pure.
class PropertyTable {
 public:
  PropertyTable();

  // --- index sets ---
  void declare_indices(const std::string& set_name, const std::vector<std::string>& members,
                       const std::vector<std::string>& families);
  void declare_integer_range(const std::vector<std::string>& names, int lo, int hi);

  bool any_sets_declared() const { return !sets_.empty(); }
  /// Resolves an index name to its set; auto-registers into the anonymous
  /// set when no sets are declared. Returns empty optional when sets exist
  /// but none contains the name.
  std::optional<std::string> resolve_index(const std::string& name);
  /// Lookup without the anonymous-set auto-registration side effect.
  std::optional<std::string> lookup_index(const std::string& name) const;

  std::optional<int> dimension_of(const std::string& set_name) const;
  /// Dimension of the set an index name belongs to.
  std::optional<int> dimension_of_name(const std::string& name) const;

  /// First name of `set_name` (declaration order, then generated family
  /// members) that does not occur in `used`.
  std::string fresh_name(const std::string& set_name, const std::vector<std::string>& used) const;

  /// Rank of an index name for canonical ordering: (set index, member index).
  std::pair<int, int> name_rank(const std::string& name) const;

  // --- head properties ---
  void declare_head_property(const std::string& head, PropKind kind, int arity, bool variadic);
  void declare_gamma(const std::string& head, const std::string& metric_head);
  void declare_tableau(const std::string& head, int arity, const TableauSpec& spec);
  /// TableauSymmetry or SatisfiesBianchi on a wrapped pattern like
  /// \nabla_{e}{R_{a b c d}}.
  void declare_wrapped_tableau(const std::string& wrapper_head, const std::string& inner_head,
                               int wrapper_arity, int inner_arity, const TableauSpec& spec);
  void declare_commuting(const std::vector<std::string>& heads, bool anti);

  void note_head_use(const std::string& head, int arity);  // arity consistency
  const HeadEntry* head_entry(const std::string& head) const;
  bool head_has(const std::string& head, PropKind k) const;
  bool is_derivative_head(const std::string& head) const;
  bool is_metric_head(const std::string& head) const;
  bool is_kronecker_head(const std::string& head) const;
  const std::string& gamma_metric(const std::string& head) const;
  /// The head carrying a GammaMatrix declaration, when one exists.
  std::optional<std::string> gamma_head() const;

  /// Pairwise commutation relation used by prodsort.
  PairRelation relation(const std::string& a, const std::string& b) const;

  /// Head rank for canonical product order: declared heads by declaration
  /// order, then undeclared alphabetically.
  std::tuple<int, int, std::string> head_rank(const std::string& head) const;

  /// Tableau governing a factor occurrence, if any: wrapped-pattern tableau,
  /// explicit head tableau, RiemannTensor expansion, Metric/KroneckerDelta
  /// symmetric pair, or GammaMatrix total antisymmetry.
  std::optional<TableauSpec> tableau_of(const TensorFactor& f) const;

  /// Tableau for Young projection: only explicitly declared symmetries
  /// (TableauSymmetry, RiemannTensor, SatisfiesBianchi patterns), not the
  /// implicit metric/delta/gamma ones.
  std::optional<TableauSpec> projection_tableau_of(const TensorFactor& f) const;
  bool has_wrapped_tableau_for(const std::string& inner_head) const;

  /// Monoterm generators of a declared head (spec operation). Throws
  /// NoSymmetry when the head carries no symmetry property.
  std::vector<SignedPermutation> monoterm_generators(const std::string& head) const;

  /// Generators for a concrete factor occurrence; empty when the factor has
  /// no declared symmetry. Positions index the combined slot vector.
  std::vector<SignedPermutation> factor_generators(const TensorFactor& f) const;

  /// True when a symmetric metric is declared for the set of this name
  /// (enables dummy-pair variance exchange in canonicalise).
  bool symmetric_metric_for(const std::string& set_name) const;

  // --- post rules ---
  void set_post_rules(std::vector<AlgoCall> rules) { post_rules_ = std::move(rules); }
  const std::vector<AlgoCall>& post_rules() const { return post_rules_; }

  /// Registry dump for the `show properties` command.
  std::string dump() const;

  const std::vector<IndexSet>& sets() const { return sets_; }

 private:
  HeadEntry& touch(const std::string& head);
  static std::pair<std::string, std::string> pair_key(const std::string& a,
                                                      const std::string& b);

  std::vector<IndexSet> sets_;
  std::map<std::string, int> set_index_;
  IndexSet anonymous_;

  std::map<std::string, HeadEntry> heads_;
  int next_decl_order_ = 0;
  std::map<std::pair<std::string, std::string>, PairRelation> relations_;
  // (wrapper head, inner head) -> tableau over combined slots
  std::map<std::pair<std::string, std::string>, TableauSpec> wrapped_tableaux_;
  // index set -> declared metric / kronecker head
  std::map<std::string, std::string> metric_of_set_;
  std::map<std::string, std::string> kronecker_of_set_;
  std::vector<AlgoCall> post_rules_;
};

/// Generators of a tableau: antisymmetry within each column and exchange of
/// equal-length columns. Positions refer to the tableau's slot_order values.
std::vector<SignedPermutation> tableau_generators(const TableauSpec& spec, std::size_t n_slots);

/// Closure of a generator set into a full signed permutation group.
/// Throws OrbitTooLarge beyond max_size; sets *contradiction when the same
/// permutation closes with both signs (head is identically zero).
std::vector<SignedPermutation> generate_group(const std::vector<SignedPermutation>& gens,
                                              std::size_t n_slots, std::size_t max_size,
                                              bool* contradiction);

}  // namespace tk
