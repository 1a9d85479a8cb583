#pragma once

#include <chrono>
#include <optional>
#include <ostream>
#include <string>

#include "cqtl/macros.hpp"
#include "cqtl/model_format.hpp"
#include "cqtl/oracle.hpp"
#include "cqtl/parser.hpp"
#include "cqtl/result.hpp"
#include "cqtl/scope.hpp"

namespace cqtl {

// Command implementations shared by the cqtl binary and the tests.
// Exit codes: 0 ok, 1 --require-sat violated, 2 error, 3 engine
// disagreement under --oracle --compare.

struct CheckOptions {
  std::string model_path;
  std::string formula_text;
  std::string context_text;
  std::optional<std::string> world;
  bool json = false;
  bool use_oracle = false;
  bool compare = false;
  bool expand_eq = false;
  bool require_sat = false;
  bool timing = false;
  int so_cap = 16;
  bool color = false;
};

namespace detail {

inline const char* color_code(bool on, const char* code) { return on ? code : ""; }

inline FormulaPtr prepare_formula(const std::string& text, const Context& ctx, const Signature& sig,
                                  bool expand_eq) {
  FormulaPtr parsed = parse_formula(text, sig);
  FormulaPtr expanded = expand_macros(parsed, ctx, sig);
  FormulaInContext checked = scope_check({ctx, expanded}, sig);
  return desugar(checked.body, {expand_eq});
}

inline void print_human(std::ostream& out, const ResultDocument& doc, bool color,
                        const std::optional<std::string>& only_world) {
  const char* dim = color_code(color, "\033[2m");
  const char* bold = color_code(color, "\033[1m");
  const char* reset = color_code(color, "\033[0m");
  out << dim << "formula:" << reset << " " << doc.formula << "\n";
  if (!doc.context.empty()) out << dim << "context:" << reset << " " << doc.context << "\n";
  for (const auto& wr : doc.per_world) {
    if (only_world && wr.world != *only_world) continue;
    out << bold << wr.world << reset << ": ";
    if (wr.assignments.empty()) {
      out << "(empty)\n";
      continue;
    }
    for (size_t i = 0; i < wr.assignments.size(); ++i) {
      if (i) out << ", ";
      out << render_row(wr.assignments[i]);
    }
    out << "\n";
  }
  out << dim << "stats:" << reset << " fixpointRounds=" << doc.stats.fixpoint_rounds
      << " configCount=" << doc.stats.config_count << " elapsedMs=" << doc.elapsed_ms << "\n";
}

}  // namespace detail

inline int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    CounterpartModel m = load_model(path);
    out << "ok: " << m.worlds.size() << " worlds, " << m.transitions.size() << " transitions, "
        << m.sig.sorts.size() << " sorts, " << m.sig.functions.size() << " functions\n";
    return 0;
  } catch (const Error& e) {
    err << path << ": " << e.what() << "\n";
    return 2;
  }
}

inline int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    CounterpartModel m = load_model(opt.model_path);
    Context ctx = parse_context(opt.context_text, m.sig);
    FormulaPtr ready = detail::prepare_formula(opt.formula_text, ctx, m.sig, opt.expand_eq);
    EvalOptions eopts;
    eopts.so_cap = opt.so_cap;

    auto start = std::chrono::steady_clock::now();
    EvalStats stats;
    Attribute value{ctx, {}};
    if (opt.use_oracle && !opt.compare) {
      value = oracle_eval(ready, ctx, m, eopts);
      ConfigGraph g(m, ctx, eopts);
      stats.config_count = static_cast<uint64_t>(g.live_count());
    } else {
      Evaluator ev(m, eopts);
      value = ev.eval(ready, ctx);
      stats = ev.stats();
    }
    double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (opt.compare) {
      Attribute other = oracle_eval(ready, ctx, m, eopts);
      if (!(other == value)) {
        for (WorldIdx w = 0; w < static_cast<WorldIdx>(m.worlds.size()); ++w)
          if (value.per_world[w] != other.per_world[w])
            err << "engines disagree at world '" << m.worlds[w].id << "'\n";
        return 3;
      }
    }

    if (opt.world && m.find_world(*opt.world) < 0)
      fail(errc::unknown_world, "world '" + *opt.world + "' is not declared");

    ResultDocument doc = make_result(m, value, opt.formula_text, opt.context_text,
                                     opt.use_oracle ? "oracle" : "eval", stats, elapsed);
    if (opt.world) {
      std::erase_if(doc.per_world, [&](const auto& wr) { return wr.world != *opt.world; });
    }
    if (opt.json) out << emit_json(doc, opt.timing);
    else detail::print_human(out, doc, opt.color, opt.world);

    if (opt.require_sat)
      for (const auto& wr : doc.per_world)
        if (wr.assignments.empty()) return 1;
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }
}

inline int cmd_trace(const std::string& model_path, const std::string& start_text,
                     const std::string& path_text, std::ostream& out, std::ostream& err) {
  try {
    CounterpartModel m = load_model(model_path);
    size_t at = start_text.find('@');
    if (at == std::string::npos)
      fail(errc::parse_error, "start must be written element@world, e.g. e0@w0");
    std::string elem = start_text.substr(0, at);
    std::string world = start_text.substr(at + 1);
    WorldIdx w = m.world_index(world);
    SortIdx sort = -1;
    ElemIdx e = -1;
    for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s) {
      ElemIdx i = m.worlds[w].find_element(s, elem);
      if (i >= 0) {
        if (sort >= 0)
          fail(errc::parse_error, "element '" + elem + "' names both a " + m.sig.sorts[sort].name +
                                      " and a " + m.sig.sorts[s].name + " in " + world);
        sort = s;
        e = i;
      }
    }
    if (sort < 0) fail(errc::parse_error, "no element '" + elem + "' in world '" + world + "'");

    std::vector<int> path;
    size_t pos = 0;
    while (pos < path_text.size()) {
      size_t comma = path_text.find(',', pos);
      std::string id = path_text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      int t = m.find_transition(id);
      if (t < 0) fail(errc::non_composable_path, "transition '" + id + "' is not declared");
      path.push_back(t);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }

    Context ctx;
    ctx.fo.push_back({"x", sort});
    Config start{w, Assignment{{e}, {}}};
    auto steps = trajectory(m, ctx, start, path);
    for (size_t i = 0; i < steps.size(); ++i) {
      if (i) out << " -> ";
      if (!steps[i]) out << "Dead";
      else out << m.worlds[steps[i]->world].carriers[sort][steps[i]->a.fo[0]] << "@"
               << m.worlds[steps[i]->world].id;
    }
    out << "\n";
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  }
}

}  // namespace cqtl
