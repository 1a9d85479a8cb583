#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqtl/eval.hpp"

namespace cqtl {

// Serializable evaluation result.  Assignments are listed in canonical
// order (lexicographic by variable then element name) so identical
// inputs always produce identical bytes.
struct ResultDocument {
  struct Binding {
    std::string var;
    bool second_order = false;
    std::vector<std::string> values;  // one element name, or a sorted subset

    auto operator<=>(const Binding&) const = default;
  };
  struct Row {
    std::vector<Binding> bindings;  // sorted by variable name
    auto operator<=>(const Row&) const = default;
  };
  struct WorldRow {
    std::string world;
    std::vector<Row> assignments;
  };

  std::string formula;
  std::string context;
  std::string engine;  // "eval" or "oracle"
  std::vector<WorldRow> per_world;
  EvalStats stats;
  double elapsed_ms = 0.0;
};

inline ResultDocument make_result(const CounterpartModel& m, const Attribute& attr,
                                  std::string formula_text, std::string context_text,
                                  std::string engine, const EvalStats& stats, double elapsed_ms) {
  ResultDocument doc;
  doc.formula = std::move(formula_text);
  doc.context = std::move(context_text);
  doc.engine = std::move(engine);
  doc.stats = stats;
  doc.elapsed_ms = elapsed_ms;
  for (WorldIdx w = 0; w < static_cast<WorldIdx>(m.worlds.size()); ++w) {
    ResultDocument::WorldRow wr;
    wr.world = m.worlds[w].id;
    for (const Assignment& a : attr.per_world[w]) {
      ResultDocument::Row row;
      for (size_t i = 0; i < attr.ctx.fo.size(); ++i) {
        const TypedVar& v = attr.ctx.fo[i];
        row.bindings.push_back({v.name, false, {m.worlds[w].carriers[v.sort][a.fo[i]]}});
      }
      for (size_t i = 0; i < attr.ctx.so.size(); ++i) {
        const TypedVar& v = attr.ctx.so[i];
        std::vector<std::string> names;
        for (int e = 0; e < m.worlds[w].carrier_size(v.sort); ++e)
          if (a.so[i] >> e & 1) names.push_back(m.worlds[w].carriers[v.sort][e]);
        std::sort(names.begin(), names.end());
        row.bindings.push_back({v.name, true, std::move(names)});
      }
      std::sort(row.bindings.begin(), row.bindings.end());
      wr.assignments.push_back(std::move(row));
    }
    std::sort(wr.assignments.begin(), wr.assignments.end());
    doc.per_world.push_back(std::move(wr));
  }
  return doc;
}

// Canonical JSON: keys sorted (nlohmann's default object ordering), no
// insignificant whitespace, newline-terminated.  Timing is volatile
// and only serialized on request.
inline std::string emit_json(const ResultDocument& doc, bool include_timing = false) {
  nlohmann::json j;
  j["formula"] = doc.formula;
  j["context"] = doc.context;
  j["engine"] = doc.engine;
  j["perWorld"] = nlohmann::json::array();
  for (const auto& wr : doc.per_world) {
    nlohmann::json jw;
    jw["world"] = wr.world;
    jw["assignments"] = nlohmann::json::array();
    for (const auto& row : wr.assignments) {
      nlohmann::json ja = nlohmann::json::object();
      for (const auto& b : row.bindings) {
        if (b.second_order) ja[b.var] = b.values;
        else ja[b.var] = b.values.at(0);
      }
      jw["assignments"].push_back(std::move(ja));
    }
    j["perWorld"].push_back(std::move(jw));
  }
  j["stats"]["fixpointRounds"] = doc.stats.fixpoint_rounds;
  j["stats"]["configCount"] = doc.stats.config_count;
  if (include_timing) j["stats"]["elapsedMs"] = doc.elapsed_ms;
  return j.dump() + "\n";
}

inline std::string render_row(const ResultDocument::Row& row) {
  if (row.bindings.empty()) return "{}";
  std::string out = "{";
  for (size_t i = 0; i < row.bindings.size(); ++i) {
    if (i) out += ", ";
    const auto& b = row.bindings[i];
    out += b.var + "=";
    if (b.second_order) {
      out += "{";
      for (size_t k = 0; k < b.values.size(); ++k) {
        if (k) out += ",";
        out += b.values[k];
      }
      out += "}";
    } else {
      out += b.values.at(0);
    }
  }
  return out + "}";
}

}  // namespace cqtl
