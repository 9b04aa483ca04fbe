#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tensorkernel/clifford.hpp"
#include "tensorkernel/geometry.hpp"
#include "tensorkernel/session.hpp"

namespace {

tk::SessionOptions session_options(bool tex, bool no_post_rules, std::size_t max_orbit) {
  tk::SessionOptions opts;
  opts.tex = tex;
  opts.post_rules = !no_post_rules;
  opts.max_orbit = max_orbit;
  if (const char* env = std::getenv("TENSORKERNEL_MAX_ORBIT")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) opts.max_orbit = static_cast<std::size_t>(v);
  }
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensorkernel - symbolic tensor algebra kernel"};
  app.require_subcommand(1);

  bool tex = false;
  bool no_post_rules = false;
  std::size_t max_orbit = 1000000;
  app.add_flag("--tex", tex, "print expressions as TeX");
  app.add_flag("--no-post-rules", no_post_rules, "disable PostDefaultRules");
  app.add_option("--max-orbit", max_orbit, "canonicalisation orbit cap");

  auto* repl = app.add_subcommand("repl", "interactive session");

  auto* run = app.add_subcommand("run", "execute a script file");
  std::string script_path;
  bool check = false;
  run->add_option("file", script_path, "script file")->required();
  run->add_flag("--check", check, "compare output against #=> annotations");

  auto* chart_cmd = app.add_subcommand("chart", "coordinate chart utilities");
  auto* chart_show = chart_cmd->add_subcommand("show", "print metric and inverse");
  std::string chart_name;
  chart_show->add_option("name", chart_name, "chart name")->required();

  auto* chris = app.add_subcommand("christoffel", "print Christoffel symbols");
  std::string chris_name;
  chris->add_option("name", chris_name, "chart name")->required();

  auto* maxwell = app.add_subcommand("maxwell", "Maxwell residuals on a chart");
  std::string maxwell_name;
  std::string spec_path;
  maxwell->add_option("name", maxwell_name, "chart name")->required();
  maxwell->add_option("--spec", spec_path, "field spec file (tensorkernel-fields v1)");

  auto* spinor = app.add_subcommand("spinor-dim", "spinor space dimension");
  int spinor_n = 0;
  spinor->add_option("n", spinor_n, "vector space dimension")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (repl->parsed()) {
      return tk::repl_loop(std::cin, std::cout,
                           session_options(tex, no_post_rules, max_orbit));
    }
    if (run->parsed()) {
      tk::ScriptReport report =
          tk::run_script(script_path, check, session_options(tex, no_post_rules, max_orbit));
      for (const auto& line : report.lines) std::cout << line << "\n";
      if (check) {
        for (const auto& diag : report.diagnostics) std::cerr << diag << "\n";
        std::cerr << (report.checked - report.mismatches) << "/" << report.checked
                  << " golden lines matched\n";
        return report.ok() ? 0 : 1;
      }
      return 0;
    }
    if (chart_show->parsed()) {
      std::cout << tk::chart_report(tk::builtin_chart(chart_name), tex);
      return 0;
    }
    if (chris->parsed()) {
      std::cout << tk::christoffel_report(tk::builtin_chart(chris_name), tex);
      return 0;
    }
    if (maxwell->parsed()) {
      tk::Chart chart = tk::builtin_chart(maxwell_name);
      tk::MaxwellFields fields;
      if (spec_path.empty()) {
        fields = tk::default_maxwell_fields(chart);
      } else {
        std::ifstream in(spec_path);
        if (!in) throw tk::IoError("cannot open field spec '" + spec_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        fields = tk::parse_field_spec(buf.str(), chart);
      }
      std::cout << tk::maxwell_report(chart, fields, tex);
      return 0;
    }
    if (spinor->parsed()) {
      std::cout << tk::spinor_dimension(spinor_n) << "\n";
      return 0;
    }
  } catch (const tk::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
