#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "cqtl/eval.hpp"
#include "cqtl/model_format.hpp"

namespace cqtl_test {

inline std::string fixture_path(const std::string& name) {
  return std::string(CQTL_FIXTURE_DIR) + "/" + name;
}

inline cqtl::CounterpartModel running_model() { return cqtl::load_model(fixture_path("running.cm")); }
inline cqtl::CounterpartModel twostate_model() { return cqtl::load_model(fixture_path("twostate.cm")); }
inline cqtl::CounterpartModel ltl_chain_model() { return cqtl::load_model(fixture_path("ltl_chain.cm")); }

// One world, one sort, an identity self-loop transition.
inline cqtl::CounterpartModel tiny_loop_model(int carrier = 3) {
  cqtl::CounterpartModel m;
  m.sig.sorts = {{"item"}};
  cqtl::WorldAlgebra w;
  w.id = "w";
  w.carriers.resize(1);
  for (int i = 0; i < carrier; ++i) w.carriers[0].push_back("a" + std::to_string(i));
  w.tables = {};
  m.worlds.push_back(w);
  cqtl::Transition t;
  t.id = "id";
  t.source = t.target = 0;
  t.maps.resize(1);
  for (int i = 0; i < carrier; ++i) t.maps[0].push_back(i);
  m.transitions.push_back(t);
  return cqtl::validate_model(m), m;
}

// Helpers to read attribute values as element-name sets.
inline std::set<std::string> names_at(const cqtl::CounterpartModel& m, const cqtl::Attribute& a,
                                      const std::string& world) {
  cqtl::WorldIdx w = m.world_index(world);
  std::set<std::string> out;
  for (const cqtl::Assignment& s : a.per_world[w]) {
    if (s.fo.size() != 1 || !s.so.empty())
      throw std::runtime_error("names_at expects a single first-order variable");
    out.insert(m.worlds[w].carriers[a.ctx.fo[0].sort][s.fo[0]]);
  }
  return out;
}

inline bool closed_holds(const cqtl::CounterpartModel& m, const cqtl::Attribute& a,
                         const std::string& world) {
  return !a.per_world[m.world_index(world)].empty();
}

}  // namespace cqtl_test
