#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tensorkernel/expr.hpp"
#include "tensorkernel/properties.hpp"

namespace tk {

/// Parsed content of one property declaration, applied by the session.
struct PropertyDeclData {
  std::string prop_name;
  std::vector<std::string> name_list;    // {A,B} / index name lists
  std::vector<std::string> family_list;  // names declared with a trailing #
  std::optional<TensorFactor> pattern;   // single-pattern declarations
  bool pattern_variadic = false;         // \gamma_{#}, \partial_{#}, \nabla{#}
  std::optional<TensorFactor> inner_pattern;  // \nabla_{e}{R_{a b c d}}
  std::string set_name;                  // Indices(vector)
  std::optional<std::pair<int, int>> range;   // Integer(0..3)
  std::string gamma_metric;              // GammaMatrix(metric=g)
  std::optional<TableauSpec> tableau;    // TableauSymmetry(...)
  std::vector<AlgoCall> post_rules;      // PostDefaultRules(...)
};

/// An algorithm invocation statement: @name!(target)(rule)(...){args}.
struct AlgorithmStmt {
  AlgoCall call;
  std::string target;                // "%", a register number, or a name
  std::optional<std::string> rule_ref;            // @(Gamma)
  std::optional<std::pair<Expr, Expr>> inline_rule;  // lhs -> rhs argument
};

/// One complete input statement. PropertyDecl statements end with '.',
/// everything else with ';'.
struct Statement {
  enum class Kind { empty, property, expr, assign, rule, algorithm, show_properties };
  Kind kind = Kind::empty;
  SourceSpan span;

  PropertyDeclData prop;
  std::string name;      // assignment target / rule name
  Expr expression;       // expr statements, assignments, rule lhs
  Expr rule_rhs;         // rule assignments
  AlgorithmStmt algo;
};

/// Parses one complete statement. Declarations are applied to `table`
/// immediately so that later statements in the same parse pass see them;
/// expression payloads are validated against the table (index sets, arity).
Statement parse_statement(const std::string& text, PropertyTable& table);

/// Parses a bare expression (no terminator required).
Expr parse_expression(const std::string& text, PropertyTable& table);

/// Splits source text into complete statements on depth-0 '.' or ';'
/// terminators. Lines whose first non-blank character is '#' are dropped
/// (script comments and golden annotations).
std::vector<std::string> split_statements(const std::string& text);

}  // namespace tk
