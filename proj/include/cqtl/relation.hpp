#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "cqtl/model.hpp"

namespace cqtl {

// Relation between two carriers, stored as (future, present) pairs.
// Step relations of valid transitions have a converse that is a
// partial function; the type itself supports arbitrary relations so
// the lifting machinery can be exercised on them.
struct StepRelation {
  int present_size = 0;
  int future_size = 0;
  std::set<std::pair<ElemIdx, ElemIdx>> pairs;  // (future, present)

  bool operator==(const StepRelation&) const = default;

  bool converse_is_partial_function() const {
    std::set<ElemIdx> seen;
    for (const auto& [future, present] : pairs)
      if (!seen.insert(present).second) return false;
    return true;
  }
};

inline StepRelation identity_relation(int n) {
  StepRelation r{n, n, {}};
  for (ElemIdx i = 0; i < n; ++i) r.pairs.insert({i, i});
  return r;
}

// Pairs (z, s) with z the counterpart of s under t at the given sort.
inline StepRelation step_relation(const CounterpartModel& m, int transition, SortIdx sort) {
  const Transition& t = m.transitions[transition];
  StepRelation r;
  r.present_size = m.worlds[t.source].carrier_size(sort);
  r.future_size = m.worlds[t.target].carrier_size(sort);
  for (ElemIdx s = 0; s < r.present_size; ++s) {
    ElemIdx z = t.maps[sort][s];
    if (z >= 0) r.pairs.insert({z, s});
  }
  return r;
}

// second after first: both relations oriented (future, present).
inline StepRelation relation_compose(const StepRelation& second, const StepRelation& first) {
  if (first.future_size != second.present_size)
    fail(errc::non_composable_path, "relation carriers do not line up");
  StepRelation out{first.present_size, second.future_size, {}};
  for (const auto& [mid2, present] : first.pairs)
    for (const auto& [future, mid1] : second.pairs)
      if (mid1 == mid2) out.pairs.insert({future, present});
  return out;
}

namespace detail {
inline void check_mask_width(int n, const char* what) {
  if (n > 64)
    fail(errc::state_space_cap,
         std::string(what) + ": carrier has " + std::to_string(n) + " elements, subsets are limited to 64");
}
}  // namespace detail

// Functional lifting of a relation to power sets: each present subset
// is sent to its image through the (future, present) pairs.
struct PowersetStep {
  int present_size = 0;
  int future_size = 0;
  std::vector<uint64_t> element_image;  // per present element, mask of futures

  uint64_t apply(uint64_t present_mask) const {
    uint64_t out = 0;
    for (int i = 0; i < present_size; ++i)
      if (present_mask >> i & 1) out |= element_image[i];
    return out;
  }

  // All (futureSet, presentSet) pairs; 2^present_size of them.
  std::vector<std::pair<uint64_t, uint64_t>> pairs() const {
    detail::check_mask_width(present_size, "powerset enumeration");
    if (present_size > 24) fail(errc::state_space_cap, "powerset enumeration would materialize 2^" +
                                                           std::to_string(present_size) + " pairs");
    std::vector<std::pair<uint64_t, uint64_t>> out;
    out.reserve(size_t{1} << present_size);
    for (uint64_t s = 0; s < (uint64_t{1} << present_size); ++s) out.push_back({apply(s), s});
    return out;
  }
};

inline PowersetStep lift_powerset(const StepRelation& r) {
  detail::check_mask_width(r.present_size, "powerset lifting");
  detail::check_mask_width(r.future_size, "powerset lifting");
  PowersetStep p{r.present_size, r.future_size, std::vector<uint64_t>(r.present_size, 0)};
  for (const auto& [future, present] : r.pairs) p.element_image[present] |= uint64_t{1} << future;
  return p;
}

// The rejected symmetric lifting: relates (F, P) when every future
// element of F covers some present element of P and vice versa.  Kept
// only so tests can probe its (non-)functoriality.
inline std::set<std::pair<uint64_t, uint64_t>> lift_powerset_lax(const StepRelation& r) {
  detail::check_mask_width(r.present_size, "lax lifting");
  detail::check_mask_width(r.future_size, "lax lifting");
  if (r.present_size > 16 || r.future_size > 16)
    fail(errc::state_space_cap, "lax lifting enumeration limited to carriers of 16");
  std::set<std::pair<uint64_t, uint64_t>> out;
  for (uint64_t fset = 0; fset < (uint64_t{1} << r.future_size); ++fset) {
    for (uint64_t pset = 0; pset < (uint64_t{1} << r.present_size); ++pset) {
      bool ok = true;
      for (int a = 0; ok && a < r.future_size; ++a) {
        if (!(fset >> a & 1)) continue;
        bool hit = false;
        for (int b = 0; !hit && b < r.present_size; ++b)
          hit = (pset >> b & 1) && r.pairs.count({a, b});
        ok = hit;
      }
      for (int b = 0; ok && b < r.present_size; ++b) {
        if (!(pset >> b & 1)) continue;
        bool hit = false;
        for (int a = 0; !hit && a < r.future_size; ++a)
          hit = (fset >> a & 1) && r.pairs.count({a, b});
        ok = hit;
      }
      if (ok) out.insert({fset, pset});
    }
  }
  return out;
}

// Membership pair: an element together with a subset containing it.
struct MembershipPair {
  ElemIdx elem = -1;
  uint64_t set = 0;
  auto operator<=>(const MembershipPair&) const = default;
};

// Evolution of membership pairs along a transition: the element steps
// through the counterpart map and the subset through the power-set
// lifting.  Every resulting target pair again satisfies membership.
inline std::set<std::pair<MembershipPair, MembershipPair>> epsilon_step(const CounterpartModel& m,
                                                                        int transition, SortIdx sort) {
  StepRelation rel = step_relation(m, transition, sort);
  PowersetStep lift = lift_powerset(rel);
  detail::check_mask_width(rel.present_size, "membership enumeration");
  if (rel.present_size > 20)
    fail(errc::state_space_cap, "membership enumeration limited to carriers of 20");
  std::set<std::pair<MembershipPair, MembershipPair>> out;
  for (const auto& [future, present] : rel.pairs) {
    for (uint64_t pset = 0; pset < (uint64_t{1} << rel.present_size); ++pset) {
      if (!(pset >> present & 1)) continue;
      uint64_t fset = lift.apply(pset);
      if (!(fset >> future & 1))
        fail(errc::validation_error, "membership not preserved by the power-set lifting");
      out.insert({MembershipPair{future, fset}, MembershipPair{present, pset}});
    }
  }
  return out;
}

// Composite of the partial maps along a path of transitions; the empty
// path is the identity on the start world.
inline std::vector<std::vector<ElemIdx>> compose_path(const CounterpartModel& m, WorldIdx start,
                                                      std::span<const int> path) {
  if (start < 0 || start >= static_cast<WorldIdx>(m.worlds.size()))
    fail(errc::unknown_world, "path start world out of range");
  std::vector<std::vector<ElemIdx>> acc(m.sig.sorts.size());
  for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s) {
    acc[s].resize(m.worlds[start].carrier_size(s));
    for (ElemIdx i = 0; i < static_cast<ElemIdx>(acc[s].size()); ++i) acc[s][i] = i;
  }
  WorldIdx at = start;
  for (int ti : path) {
    if (ti < 0 || ti >= static_cast<int>(m.transitions.size()))
      fail(errc::non_composable_path, "path uses an unknown transition");
    const Transition& t = m.transitions[ti];
    if (t.source != at)
      fail(errc::non_composable_path,
           "transition '" + t.id + "' does not start at world '" + m.worlds[at].id + "'");
    for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s)
      for (ElemIdx i = 0; i < static_cast<ElemIdx>(acc[s].size()); ++i)
        if (acc[s][i] >= 0) acc[s][i] = t.maps[s][acc[s][i]];
    at = t.target;
  }
  return acc;
}

// Presheaf-on-generators presentation of a model: carriers and tables
// per world, one step relation per sort per declared transition.
struct RelationalView {
  Signature sig;
  struct WorldPart {
    std::string id;
    std::vector<std::vector<std::string>> carriers;
    std::vector<std::vector<ElemIdx>> tables;
  };
  struct StepPart {
    std::string id;
    WorldIdx source = -1;
    WorldIdx target = -1;
    std::vector<StepRelation> per_sort;
  };
  std::vector<WorldPart> worlds;
  std::vector<StepPart> steps;
};

inline RelationalView to_relational_view(const CounterpartModel& m) {
  RelationalView v;
  v.sig = m.sig;
  for (const WorldAlgebra& w : m.worlds) v.worlds.push_back({w.id, w.carriers, w.tables});
  for (int t = 0; t < static_cast<int>(m.transitions.size()); ++t) {
    RelationalView::StepPart sp;
    sp.id = m.transitions[t].id;
    sp.source = m.transitions[t].source;
    sp.target = m.transitions[t].target;
    for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s)
      sp.per_sort.push_back(step_relation(m, t, s));
    v.steps.push_back(std::move(sp));
  }
  return v;
}

// Rebuilds a counterpart model by taking the converse of every step
// relation; requires the converses to be partial functions.
inline CounterpartModel from_relational_view(const RelationalView& v) {
  CounterpartModel m;
  m.sig = v.sig;
  for (const auto& w : v.worlds) m.worlds.push_back({w.id, w.carriers, w.tables});
  for (const auto& sp : v.steps) {
    Transition t;
    t.id = sp.id;
    t.source = sp.source;
    t.target = sp.target;
    t.maps.resize(v.sig.sorts.size());
    for (SortIdx s = 0; s < static_cast<SortIdx>(v.sig.sorts.size()); ++s) {
      const StepRelation& r = sp.per_sort[s];
      if (!r.converse_is_partial_function())
        fail(errc::validation_error,
             "step relation of '" + sp.id + "' has a non-functional converse");
      t.maps[s].assign(r.present_size, -1);
      for (const auto& [future, present] : r.pairs) t.maps[s][present] = future;
    }
    m.transitions.push_back(std::move(t));
  }
  return validate_model(m), m;
}

inline CounterpartModel roundtrip_relational_view(const CounterpartModel& m) {
  return from_relational_view(to_relational_view(m));
}

}  // namespace cqtl
