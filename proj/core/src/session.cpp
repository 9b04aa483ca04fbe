#include "tensorkernel/session.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tensorkernel/clifford.hpp"
#include "tensorkernel/printer.hpp"
#include "tensorkernel/symmetry.hpp"

namespace tk {

Session::Session(SessionOptions opts) : options_(opts) {}

std::string Session::display(const std::string& label, const Expr& e) const {
  return label + " := " + (options_.tex ? print_tex(e) : print_plain(e)) + ";";
}

void Session::apply_decl(const PropertyDeclData& d) {
  const std::string& p = d.prop_name;
  if (p == "PostDefaultRules") {
    table_.set_post_rules(d.post_rules);
    return;
  }
  if (p == "Indices") {
    table_.declare_indices(d.set_name, d.name_list, d.family_list);
    return;
  }
  if (p == "Integer") {
    if (!d.range) throw UnknownProperty("Integer requires a range");
    table_.declare_integer_range(d.name_list, d.range->first, d.range->second);
    return;
  }
  if (p == "Commuting" || p == "AntiCommuting") {
    table_.declare_commuting(d.name_list, p == "AntiCommuting");
    return;
  }
  if (p == "SelfNonCommuting") {
    for (const auto& h : d.name_list)
      table_.declare_head_property(h, PropKind::SelfNonCommuting, 0, false);
    if (d.pattern)
      table_.declare_head_property(d.pattern->head, PropKind::SelfNonCommuting, 0, false);
    return;
  }
  if (!d.pattern) throw UnknownProperty("property '" + p + "' requires a tensor pattern");
  const TensorFactor& pat = *d.pattern;
  int arity = static_cast<int>(pat.slots.size());

  if (p == "Metric" || p == "KroneckerDelta") {
    PropKind kind = (p == "Metric") ? PropKind::Metric : PropKind::KroneckerDelta;
    table_.declare_head_property(pat.head, kind, 2, false);
    return;
  }
  if (p == "PartialDerivative" || p == "Derivative") {
    PropKind kind = (p == "PartialDerivative") ? PropKind::PartialDerivative
                                               : PropKind::Derivative;
    table_.declare_head_property(pat.head, kind, arity, d.pattern_variadic);
    return;
  }
  if (p == "GammaMatrix") {
    if (d.gamma_metric.empty())
      throw MissingGammaMetric("GammaMatrix requires metric=<head>");
    table_.declare_gamma(pat.head, d.gamma_metric);
    return;
  }
  if (p == "TableauSymmetry") {
    if (!d.tableau) throw UnknownProperty("TableauSymmetry requires shape and indices");
    if (d.inner_pattern) {
      table_.declare_wrapped_tableau(pat.head, d.inner_pattern->head, arity,
                                     static_cast<int>(d.inner_pattern->slots.size()),
                                     *d.tableau);
    } else {
      table_.declare_tableau(pat.head, arity, *d.tableau);
    }
    return;
  }
  if (p == "RiemannTensor") {
    table_.declare_head_property(pat.head, PropKind::RiemannTensor, arity, false);
    return;
  }
  if (p == "SatisfiesBianchi") {
    if (!d.inner_pattern)
      throw UnknownProperty("SatisfiesBianchi applies to a derivative of a tensor");
    // nabla_e R_{abcd}: shape {3,2} over (deriv slot, tensor slots) with the
    // derivative index in the last cell of the first row.
    TableauSpec spec;
    spec.shape = {3, 2};
    spec.slot_order = {1, 3, 0, 2, 4};
    table_.declare_wrapped_tableau(pat.head, d.inner_pattern->head, arity,
                                   static_cast<int>(d.inner_pattern->slots.size()), spec);
    return;
  }
  throw UnknownProperty("unknown property '" + p + "'");
}

Expr Session::post(const Expr& e) {
  if (!options_.post_rules) return e;
  return apply_post_rules(e, table_, options_.max_orbit);
}

Expr Session::run_algorithm(const AlgorithmStmt& algo, const Expr& input) {
  const std::string& name = algo.call.name;
  bool repeat = algo.call.bangs >= 2;
  if (name == "prodsort") return prodsort(input, table_);
  if (name == "distribute") return distribute(input);
  if (name == "collect_terms") return collect_terms(input, table_);
  if (name == "canonicalise") return canonicalise(input, table_, options_.max_orbit);
  if (name == "eliminate_metric") return eliminate_metric(input, table_, repeat);
  if (name == "eliminate_kr") return eliminate_kr(input, table_);
  if (name == "join") {
    bool expand = std::find(algo.call.args.begin(), algo.call.args.end(), "expand") !=
                  algo.call.args.end();
    return join(input, table_, expand, repeat);
  }
  if (name == "young_project_tensor") return young_project_all(input, table_);
  if (name == "substitute") {
    SubstitutionRule rule;
    if (algo.rule_ref) {
      auto it = rules_.find(*algo.rule_ref);
      if (it == rules_.end()) throw Error("unknown rule '" + *algo.rule_ref + "'");
      rule = it->second;
    } else if (algo.inline_rule) {
      Expr lhs = flatten(algo.inline_rule->first);
      if (!lhs.is_factor())
        throw PatternArityMismatch("substitution pattern must be a single tensor factor");
      rule.lhs = lhs.factor_value();
      rule.rhs = algo.inline_rule->second;
    } else {
      throw Error("@substitute requires a rule argument");
    }
    return substitute(input, rule, table_, repeat);
  }
  throw Error("unknown algorithm '@" + name + "'");
}

std::vector<std::string> Session::execute(const Statement& st) {
  std::vector<std::string> out;
  try {
    switch (st.kind) {
      case Statement::Kind::empty:
        break;
      case Statement::Kind::property:
        apply_decl(st.prop);
        break;
      case Statement::Kind::show_properties: {
        std::istringstream is(table_.dump());
        std::string line;
        while (std::getline(is, line)) out.push_back(line);
        break;
      }
      case Statement::Kind::expr: {
        std::string label = std::to_string(next_number_++);
        Expr value = post(flatten(st.expression));
        registers_[label] = value;
        last_label_ = label;
        out.push_back(display(label, value));
        break;
      }
      case Statement::Kind::assign: {
        Expr value = post(flatten(st.expression));
        registers_[st.name] = value;
        last_label_ = st.name;
        out.push_back(display(st.name, value));
        break;
      }
      case Statement::Kind::rule: {
        Expr lhs = flatten(st.expression);
        if (!lhs.is_factor())
          throw PatternArityMismatch("substitution pattern must be a single tensor factor");
        SubstitutionRule rule{lhs.factor_value(), flatten(st.rule_rhs)};
        rules_[st.name] = rule;
        std::string text = (options_.tex ? print_tex(st.expression) : print_plain(st.expression)) +
                           " -> " +
                           (options_.tex ? print_tex(st.rule_rhs) : print_plain(st.rule_rhs));
        out.push_back(st.name + " := " + text + ";");
        break;
      }
      case Statement::Kind::algorithm: {
        std::string label = st.algo.target;
        if (label == "%") {
          if (last_label_.empty()) throw Error("no current expression");
          label = last_label_;
        }
        auto it = registers_.find(label);
        if (it == registers_.end()) throw Error("no register '" + label + "'");
        Expr result = post(run_algorithm(st.algo, it->second));
        it->second = result;
        last_label_ = label;
        out.push_back(display(label, result));
        break;
      }
    }
  } catch (const Error& err) {
    out.push_back(std::string("error: ") + err.what());
  }
  return out;
}

std::vector<std::string> Session::execute_text(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& stmt : split_statements(text)) {
    Statement st;
    try {
      st = parse_statement(stmt, table_);
    } catch (const Error& err) {
      out.push_back(std::string("error: ") + err.what());
      continue;
    }
    auto lines = execute(st);
    out.insert(out.end(), lines.begin(), lines.end());
  }
  return out;
}

const Expr* Session::find_register(const std::string& label) const {
  auto it = registers_.find(label);
  return it == registers_.end() ? nullptr : &it->second;
}

namespace {

struct ScriptEntry {
  std::string text;
  std::vector<std::string> expected;
  int line = 0;
};

std::vector<ScriptEntry> read_script(const std::string& text) {
  std::vector<ScriptEntry> entries;
  std::string pending;
  int pending_line = 0;
  int depth = 0;
  int lineno = 0;

  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t i = line.find_first_not_of(" \t");
    if (i != std::string::npos && line[i] == '#') {
      if (line.compare(i, 3, "#=>") == 0 && !entries.empty()) {
        std::string expected = line.substr(i + 3);
        if (!expected.empty() && expected.front() == ' ') expected.erase(0, 1);
        entries.back().expected.push_back(expected);
      }
      continue;
    }
    for (std::size_t k = 0; k < line.size(); ++k) {
      char c = line[k];
      if (c == '{' || c == '(') ++depth;
      if (c == '}' || c == ')') --depth;
      if (pending.empty()) pending_line = lineno;
      pending += c;
      bool dot_term = c == '.' && (k + 1 >= line.size() || line[k + 1] != '.') &&
                      (k == 0 || line[k - 1] != '.');
      if (depth == 0 && (c == ';' || dot_term)) {
        std::size_t b = pending.find_first_not_of(" \t\n");
        if (b != std::string::npos)
          entries.push_back({pending.substr(b), {}, pending_line});
        pending.clear();
      }
    }
    pending += '\n';
    if (pending.find_first_not_of(" \t\n") == std::string::npos) pending.clear();
  }
  std::size_t b = pending.find_first_not_of(" \t\n");
  if (b != std::string::npos) entries.push_back({pending.substr(b), {}, pending_line});
  return entries;
}

}  // namespace

ScriptReport run_script_text(const std::string& text, bool check, SessionOptions opts) {
  ScriptReport report;
  auto entries = read_script(text);

  // Whole-file parse pass before execution: declarations must be applied as
  // parsing proceeds so later statements see them.
  {
    Session probe(opts);
    for (const auto& entry : entries) parse_statement(entry.text, probe.table());
    // Parse errors throw out of run_script_text; execution below reparses
    // against the live session.
  }

  Session session(opts);
  for (const auto& entry : entries) {
    ++report.statements;
    auto lines = session.execute_text(entry.text);
    report.lines.insert(report.lines.end(), lines.begin(), lines.end());
    if (!check || entry.expected.empty()) continue;
    ++report.checked;
    bool match = lines.size() == entry.expected.size() &&
                 std::equal(lines.begin(), lines.end(), entry.expected.begin());
    if (!match) {
      ++report.mismatches;
      std::ostringstream diag;
      diag << "golden mismatch at line " << entry.line << ":";
      for (const auto& e : entry.expected) diag << "\n  expected: " << e;
      for (const auto& g : lines) diag << "\n  got:      " << g;
      report.diagnostics.push_back(diag.str());
    }
  }
  return report;
}

ScriptReport run_script(const std::string& path, bool check, SessionOptions opts) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open script '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_script_text(buf.str(), check, opts);
}

int repl_loop(std::istream& in, std::ostream& out, SessionOptions opts) {
  Session session(opts);
  std::string buffer;
  std::string line;
  int depth = 0;
  while (std::getline(in, line)) {
    if (line == "quit" || line == "exit") break;
    std::size_t i = line.find_first_not_of(" \t");
    if (i != std::string::npos && line[i] == '#') continue;
    for (std::size_t k = 0; k < line.size(); ++k) {
      char c = line[k];
      if (c == '{' || c == '(') ++depth;
      if (c == '}' || c == ')') --depth;
      buffer += c;
      bool dot_term = c == '.' && (k + 1 >= line.size() || line[k + 1] != '.') &&
                      (k == 0 || line[k - 1] != '.');
      if (depth == 0 && (c == ';' || dot_term)) {
        for (const auto& produced : session.execute_text(buffer)) out << produced << "\n";
        buffer.clear();
      }
    }
    if (buffer.find_first_not_of(" \t\n") == std::string::npos)
      buffer.clear();
    else
      buffer += '\n';
  }
  return 0;
}

}  // namespace tk
