// Command-line front end: validate models, evaluate formulas with the
// fixpoint engine or the configuration-graph oracle, trace counterpart
// trajectories.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cqtl/driver.hpp"

namespace {

bool color_enabled() {
  const char* env = std::getenv("CQTL_COLOR");
  if (!env) return false;
  return std::string(env) == "1";
}

void add_check_flags(CLI::App* cmd, cqtl::CheckOptions& opt) {
  cmd->add_option("model", opt.model_path, "model file")->required();
  cmd->add_option("-c,--context", opt.context_text,
                  "evaluation context, e.g. \"x:edge, N:Set(node)\"");
  cmd->add_option("-f,--formula", opt.formula_text, "formula to evaluate")->required();
  cmd->add_option("--world", [&opt](const std::vector<std::string>& v) {
        opt.world = v.at(0);
        return true;
      },
      "restrict output to one world");
  cmd->add_flag("--json", opt.json, "emit the canonical JSON result document");
  cmd->add_flag("--expand-eq", opt.expand_eq, "rewrite equality into its second-order form");
  cmd->add_flag("--require-sat", opt.require_sat,
                "exit 1 unless every reported world has a satisfying assignment");
  cmd->add_flag("--timing", opt.timing, "include elapsedMs in the JSON output");
  cmd->add_option("--max-so-carrier", opt.so_cap,
                  "carrier size limit for second-order enumeration (default 16, max 64)")
      ->check(CLI::Range(0, 64));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterpart-semantics model checker for quantified linear-time temporal logic"};
  app.require_subcommand(1);

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "parse and validate a model file");
  validate->add_option("model", validate_path, "model file")->required();

  cqtl::CheckOptions check_opt;
  CLI::App* check = app.add_subcommand("check", "evaluate a formula with the fixpoint engine");
  add_check_flags(check, check_opt);
  check->add_flag("--oracle", check_opt.use_oracle, "evaluate with the configuration-graph oracle");
  check->add_flag("--compare", check_opt.compare,
                  "run both engines and exit 3 if they disagree (with --oracle)");

  cqtl::CheckOptions oracle_opt;
  oracle_opt.use_oracle = true;
  CLI::App* oracle = app.add_subcommand("oracle", "evaluate a formula with the oracle engine");
  add_check_flags(oracle, oracle_opt);
  oracle->add_flag("--compare", oracle_opt.compare, "also run the fixpoint engine and compare");

  std::string trace_model, trace_start, trace_path;
  CLI::App* trace = app.add_subcommand("trace", "follow one element along a transition path");
  trace->add_option("model", trace_model, "model file")->required();
  trace->add_option("--start", trace_start, "start configuration, e.g. e0@w0")->required();
  trace->add_option("--path", trace_path, "comma-separated transition ids")->required();

  CLI11_PARSE(app, argc, argv);

  bool color = color_enabled();
  check_opt.color = color;
  oracle_opt.color = color;

  if (validate->parsed()) return cqtl::cmd_validate(validate_path, std::cout, std::cerr);
  if (check->parsed()) return cqtl::cmd_check(check_opt, std::cout, std::cerr);
  if (oracle->parsed()) return cqtl::cmd_check(oracle_opt, std::cout, std::cerr);
  if (trace->parsed()) return cqtl::cmd_trace(trace_model, trace_start, trace_path, std::cout, std::cerr);
  return 2;
}
