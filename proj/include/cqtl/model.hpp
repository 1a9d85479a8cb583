#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cqtl/sigterm.hpp"

namespace cqtl {

using WorldIdx = int;
using ElemIdx = int;

// A world's algebra.  Carriers hold element names (unique per sort,
// local to the world); each function table is stored flat in row-major
// order over the argument carriers and must be total after validation.
struct WorldAlgebra {
  std::string id;
  std::vector<std::vector<std::string>> carriers;  // indexed by sort
  std::vector<std::vector<ElemIdx>> tables;        // indexed by function

  bool operator==(const WorldAlgebra&) const = default;

  int carrier_size(SortIdx s) const { return static_cast<int>(carriers[s].size()); }

  ElemIdx find_element(SortIdx s, std::string_view name) const {
    const auto& c = carriers[s];
    for (ElemIdx i = 0; i < static_cast<ElemIdx>(c.size()); ++i)
      if (c[i] == name) return i;
    return -1;
  }
};

inline size_t table_size(const WorldAlgebra& w, const FunctionSymbol& f) {
  size_t n = 1;
  for (SortIdx s : f.arg_sorts) n *= static_cast<size_t>(w.carrier_size(s));
  return n;
}

inline size_t table_index(const WorldAlgebra& w, const FunctionSymbol& f,
                          const std::vector<ElemIdx>& args) {
  size_t idx = 0;
  for (size_t i = 0; i < f.arg_sorts.size(); ++i)
    idx = idx * static_cast<size_t>(w.carrier_size(f.arg_sorts[i])) + static_cast<size_t>(args[i]);
  return idx;
}

// One atomic step: per-sort partial maps from the source carrier into
// the target carrier (-1 marks elements outside the domain).
struct Transition {
  std::string id;
  WorldIdx source = -1;
  WorldIdx target = -1;
  std::vector<std::vector<ElemIdx>> maps;  // indexed by sort, then source element

  bool operator==(const Transition&) const = default;

  ElemIdx apply(SortIdx sort, ElemIdx elem) const { return maps[sort][elem]; }
};

// Finite counterpart model.  The temporal structure is exactly the
// declared transitions; paths range over sequences of them.
struct CounterpartModel {
  Signature sig;
  std::vector<WorldAlgebra> worlds;
  std::vector<Transition> transitions;

  bool operator==(const CounterpartModel&) const = default;

  WorldIdx find_world(std::string_view id) const {
    for (WorldIdx i = 0; i < static_cast<WorldIdx>(worlds.size()); ++i)
      if (worlds[i].id == id) return i;
    return -1;
  }

  WorldIdx world_index(std::string_view id) const {
    WorldIdx w = find_world(id);
    if (w < 0) fail(errc::unknown_world, "world '" + std::string(id) + "' is not declared");
    return w;
  }

  int find_transition(std::string_view id) const {
    for (int i = 0; i < static_cast<int>(transitions.size()); ++i)
      if (transitions[i].id == id) return i;
    return -1;
  }
};

// Exactly the declared transitions with the given source world.
inline std::vector<int> outgoing(const CounterpartModel& m, WorldIdx w) {
  if (w < 0 || w >= static_cast<WorldIdx>(m.worlds.size()))
    fail(errc::unknown_world, "world index out of range");
  std::vector<int> out;
  for (int t = 0; t < static_cast<int>(m.transitions.size()); ++t)
    if (m.transitions[t].source == w) out.push_back(t);
  return out;
}

namespace detail {

inline void validate_world(const CounterpartModel& m, const WorldAlgebra& w) {
  if (w.carriers.size() != m.sig.sorts.size())
    fail(errc::validation_error, "world '" + w.id + "' carrier count does not match the signature");
  for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s) {
    std::set<std::string> seen;
    for (const std::string& e : w.carriers[s])
      if (!seen.insert(e).second)
        fail(errc::validation_error,
             "element '" + e + "' declared twice in " + w.id + "/" + m.sig.sorts[s].name);
  }
  if (w.tables.size() != m.sig.functions.size())
    fail(errc::validation_error, "world '" + w.id + "' table count does not match the signature");
  for (size_t f = 0; f < m.sig.functions.size(); ++f) {
    const FunctionSymbol& fs = m.sig.functions[f];
    size_t need = table_size(w, fs);
    if (w.tables[f].size() != need)
      fail(errc::partial_table_entry, "table for '" + fs.name + "' in world '" + w.id +
                                          "' has " + std::to_string(w.tables[f].size()) +
                                          " entries, expected " + std::to_string(need));
    int result_size = w.carrier_size(fs.result_sort);
    for (ElemIdx v : w.tables[f])
      if (v < 0 || v >= result_size)
        fail(errc::partial_table_entry,
             "table for '" + fs.name + "' in world '" + w.id + "' has a missing or ill-sorted entry");
  }
}

// Enumerates argument tuples of fs over the source carrier and checks
// the partial-homomorphism condition: a tuple wholly inside the map's
// domain forces the result to be mapped, compatibly.
inline void validate_homomorphism(const CounterpartModel& m, const Transition& t) {
  const WorldAlgebra& src = m.worlds[t.source];
  const WorldAlgebra& tgt = m.worlds[t.target];
  for (size_t f = 0; f < m.sig.functions.size(); ++f) {
    const FunctionSymbol& fs = m.sig.functions[f];
    std::vector<ElemIdx> tuple(fs.arg_sorts.size(), 0);
    size_t total = table_size(src, fs);
    for (size_t flat = 0; flat < total; ++flat) {
      size_t rest = flat;
      for (size_t i = fs.arg_sorts.size(); i-- > 0;) {
        int size = src.carrier_size(fs.arg_sorts[i]);
        tuple[i] = static_cast<ElemIdx>(rest % static_cast<size_t>(size));
        rest /= static_cast<size_t>(size);
      }
      bool all_mapped = true;
      std::vector<ElemIdx> mapped(tuple.size());
      for (size_t i = 0; i < tuple.size(); ++i) {
        ElemIdx v = t.maps[fs.arg_sorts[i]][tuple[i]];
        if (v < 0) {
          all_mapped = false;
          break;
        }
        mapped[i] = v;
      }
      if (!all_mapped) continue;
      ElemIdx src_result = src.tables[f][table_index(src, fs, tuple)];
      ElemIdx stepped = t.maps[fs.result_sort][src_result];
      ElemIdx tgt_result = tgt.tables[f][table_index(tgt, fs, mapped)];
      if (stepped < 0 || stepped != tgt_result) {
        std::string tup = "(";
        for (size_t i = 0; i < tuple.size(); ++i) {
          if (i) tup += ", ";
          tup += src.carriers[fs.arg_sorts[i]][tuple[i]];
        }
        tup += ")";
        fail(errc::homomorphism_violation,
             "transition '" + t.id + "': '" + fs.name + "' applied to " + tup +
                 (stepped < 0 ? " is mapped while its result is not"
                              : " does not commute with the counterpart maps"));
      }
    }
  }
}

}  // namespace detail

// Returns m iff every algebra table is total and well sorted and every
// transition is a partial homomorphism with well-formed endpoints.
inline const CounterpartModel& validate_model(const CounterpartModel& m) {
  validate_signature(m.sig);
  std::set<std::string> world_ids;
  for (const WorldAlgebra& w : m.worlds) {
    if (!world_ids.insert(w.id).second)
      fail(errc::validation_error, "world '" + w.id + "' declared twice");
    detail::validate_world(m, w);
  }
  std::set<std::string> transition_ids;
  int n_worlds = static_cast<int>(m.worlds.size());
  for (const Transition& t : m.transitions) {
    if (!transition_ids.insert(t.id).second)
      fail(errc::validation_error, "transition '" + t.id + "' declared twice");
    if (t.source < 0 || t.source >= n_worlds || t.target < 0 || t.target >= n_worlds)
      fail(errc::dangling_world_ref, "transition '" + t.id + "' references an unknown world");
    if (t.maps.size() != m.sig.sorts.size())
      fail(errc::validation_error, "transition '" + t.id + "' map count does not match the signature");
    for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s) {
      if (static_cast<int>(t.maps[s].size()) != m.worlds[t.source].carrier_size(s))
        fail(errc::validation_error, "transition '" + t.id + "' map for sort '" +
                                         m.sig.sorts[s].name + "' does not cover the source carrier");
      int tgt_size = m.worlds[t.target].carrier_size(s);
      for (ElemIdx v : t.maps[s])
        if (v < -1 || v >= tgt_size)
          fail(errc::validation_error, "transition '" + t.id + "' maps outside the target carrier");
    }
    detail::validate_homomorphism(m, t);
  }
  return m;
}

}  // namespace cqtl
