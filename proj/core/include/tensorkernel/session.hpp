#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tensorkernel/parser.hpp"
#include "tensorkernel/properties.hpp"
#include "tensorkernel/rewrite.hpp"

namespace tk {

struct SessionOptions {
  bool tex = false;
  bool post_rules = true;
  std::size_t max_orbit = 1000000;
};

/// Interactive/batch session: property table, expression registers and the
/// transcript-style display. Register numbering is monotonically increasing
/// and `%` always denotes the most recently touched register.
class Session {
 public:
  explicit Session(SessionOptions opts = {});

  /// Executes one statement; returns the produced output lines (usually one
  /// `N := expr;` line). Errors are reported in-band as `error: ...` lines.
  std::vector<std::string> execute(const Statement& st);

  /// Parses and executes one statement's text.
  std::vector<std::string> execute_text(const std::string& text);

  const Expr* find_register(const std::string& label) const;
  PropertyTable& table() { return table_; }
  const SessionOptions& options() const { return options_; }

 private:
  std::string display(const std::string& label, const Expr& e) const;
  void apply_decl(const PropertyDeclData& d);
  Expr run_algorithm(const AlgorithmStmt& algo, const Expr& input);
  Expr post(const Expr& e);

  SessionOptions options_;
  PropertyTable table_;
  std::map<std::string, Expr> registers_;  // numbered labels and names
  std::map<std::string, SubstitutionRule> rules_;
  int next_number_ = 1;
  std::string last_label_;
};

struct ScriptReport {
  int statements = 0;
  int checked = 0;
  int mismatches = 0;
  std::vector<std::string> lines;  // produced output
  std::vector<std::string> diagnostics;
  bool ok() const { return mismatches == 0; }
};

/// Runs a script file. With `check`, lines annotated `#=> expected` after a
/// statement are compared against that statement's output.
ScriptReport run_script(const std::string& path, bool check, SessionOptions opts = {});
ScriptReport run_script_text(const std::string& text, bool check, SessionOptions opts = {});

/// Line-oriented REPL over arbitrary streams; prints transcript-style
/// `N := expr;` lines. Returns the process exit code.
int repl_loop(std::istream& in, std::ostream& out, SessionOptions opts = {});

}  // namespace tk
