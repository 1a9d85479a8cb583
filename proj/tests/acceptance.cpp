// Acceptance suite: each test case checks one numbered criterion and
// prints a single PASS/FAIL line.  Criterion 7's second half asserts
// the existence of a strict-composition failure for the symmetric
// power-set lifting; no such failure exists (the lifting composes
// strictly, see tests/test_relation.cpp), so that assertion fails and
// is expected to stay red.

#include <catch_amalgamated.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cqtl/driver.hpp"
#include "cqtl/oracle.hpp"
#include "cqtl/relation.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cqtl;
using cqtl_test::names_at;
using Names = std::set<std::string>;

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void report(int criterion, const char* label, bool ok, const std::string& detail = "") {
  std::cout << "[criterion " << criterion << "] " << (ok ? "PASS" : "FAIL") << " - " << label;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
}

Attribute run_text(const CounterpartModel& m, const std::string& ctx_text, const std::string& formula,
                   bool expand_eq = false) {
  Context ctx = parse_context(ctx_text, m.sig);
  FormulaPtr ready = detail::prepare_formula(formula, ctx, m.sig, expand_eq);
  Evaluator ev(m);
  return ev.eval(ready, ctx);
}

// The shared randomized corpus: 200 valid models, each with at most 4
// worlds, 4 elements per sort and 6 transitions, at least one deadlock
// world and at least one cycle.
const std::vector<CounterpartModel>& corpus() {
  static std::vector<CounterpartModel> models = [] {
    cqtl_test::Rng rng(424242);
    std::vector<CounterpartModel> out;
    out.reserve(200);
    for (int i = 0; i < 200; ++i) out.push_back(cqtl_test::random_model(rng, i));
    return out;
  }();
  return models;
}

}  // namespace

TEST_CASE("criterion 1: node merging on the running example") {
  CounterpartModel m = cqtl_test::running_model();
  auto start = std::chrono::steady_clock::now();
  Attribute a = run_text(m, "y:node", "exists x:node. (x != y & X[x = y])");
  double elapsed = ms_since(start);
  bool ok = names_at(m, a, "w0") == Names{"n0", "n2"} && names_at(m, a, "w1") == Names{"n3", "n4"} &&
            names_at(m, a, "w2") == Names{} && elapsed < 1000.0;
  report(1, "node merging yields {n0,n2} / {n3,n4} / {} in under 1s", ok,
         std::to_string(elapsed) + " ms");
  REQUIRE(ok);
}

TEST_CASE("criterion 2: next-step survival of edges") {
  CounterpartModel m = cqtl_test::running_model();
  auto start = std::chrono::steady_clock::now();
  Attribute a = run_text(m, "x:edge", "nextStepPreserved(x)");
  double elapsed = ms_since(start);
  bool ok = names_at(m, a, "w0") == Names{"e0", "e1"} && names_at(m, a, "w1") == Names{} &&
            names_at(m, a, "w2") == Names{"e5"} && elapsed < 1000.0;
  report(2, "nextStepPreserved yields {e0,e1} / {} / {e5} in under 1s", ok,
         std::to_string(elapsed) + " ms");
  REQUIRE(ok);
}

TEST_CASE("criterion 3: next-step deallocation of edges") {
  CounterpartModel m = cqtl_test::running_model();
  auto start = std::chrono::steady_clock::now();
  Attribute a = run_text(m, "x:edge", "nextStepDeallocated(x)");
  double elapsed = ms_since(start);
  bool values_ok = names_at(m, a, "w0") == Names{"e2"} && names_at(m, a, "w1") == Names{} &&
                   names_at(m, a, "w2") == Names{};

  // regression for the strict-next reading: present(x) & X[not present(x)]
  // in positive form must be empty at w0
  Attribute literal = run_text(m, "x:edge", "present(x) & X[forall y:edge. x != y]");
  bool literal_ok = names_at(m, literal, "w0") == Names{} && names_at(m, literal, "w1") == Names{} &&
                    names_at(m, literal, "w2") == Names{};
  bool ok = values_ok && literal_ok && ms_since(start) < 2000.0;
  report(3, "nextStepDeallocated yields {e2} / {} / {} and the strict-next reading is empty", ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 4: two-state toy model") {
  CounterpartModel m = cqtl_test::twostate_model();
  auto start = std::chrono::steady_clock::now();
  Attribute a = run_text(m, "x:item", "present(x) & X[X[present(x)]]");
  double elapsed = ms_since(start);
  bool ok = names_at(m, a, "s0") == Names{} && names_at(m, a, "s1") == Names{} && elapsed < 1000.0;
  report(4, "present(x) & X[X[present(x)]] is empty at s0 in under 1s", ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 5: oracle equivalence over the randomized corpus") {
  auto start = std::chrono::steady_clock::now();
  cqtl_test::Rng rng(171717);
  long disagreements = 0;
  long evaluated = 0;
  std::string first_failure;
  for (size_t mi = 0; mi < corpus().size(); ++mi) {
    const CounterpartModel& m = corpus()[mi];
    for (int fi = 0; fi < 50; ++fi) {
      Context ctx = cqtl_test::random_context(rng, m.sig, 2, 1);
      FormulaPtr f = cqtl_test::random_formula(rng, m.sig, ctx, 5);
      FormulaPtr ready = desugar(scope_check({ctx, f}, m.sig).body);
      Evaluator ev(m);
      Attribute lhs = ev.eval(ready, ctx);
      Attribute rhs = oracle_eval(ready, ctx, m);
      ++evaluated;
      if (!(lhs == rhs)) {
        ++disagreements;
        if (first_failure.empty())
          first_failure = "model " + std::to_string(mi) + ": " + print_formula(*f, m.sig);
      }
    }
  }
  double elapsed = ms_since(start);
  bool ok = disagreements == 0 && evaluated == 10000 && elapsed < 300000.0;
  report(5, "eval = oracle_eval on 200 models x 50 formulas", ok,
         std::to_string(evaluated) + " checks, " + std::to_string(disagreements) + " disagreements, " +
             std::to_string(elapsed / 1000.0) + " s" +
             (first_failure.empty() ? "" : ", first: " + first_failure));
  REQUIRE(ok);
}

TEST_CASE("criterion 6: fixpoint laws over the corpus") {
  cqtl_test::Rng rng(555);
  long violations = 0;
  for (size_t mi = 0; mi < corpus().size(); ++mi) {
    const CounterpartModel& m = corpus()[mi];
    Context ctx = cqtl_test::random_context(rng, m.sig, 2, 0);
    Evaluator ev(m);
    auto random_attr = [&]() {
      Attribute a{ctx, std::vector<AssignmentSet>(m.worlds.size())};
      for (WorldIdx w = 0; w < static_cast<WorldIdx>(m.worlds.size()); ++w)
        for_each_assignment(m, ctx, w, {}, [&](const Assignment& s) {
          if (rng.chance(0.5)) a.per_world[w].insert(s);
        });
      return a;
    };
    for (int trial = 0; trial < 3; ++trial) {
      Attribute a = random_attr();
      Attribute b = random_attr();
      Attribute u = ev.until_op(a, b);
      Attribute w = ev.wuntil_op(a, b);
      if (!(u == ev.attr_or(b, ev.attr_and(a, ev.next_op(u))))) ++violations;
      if (!(w == ev.attr_or(b, ev.attr_and(a, ev.next_op(w))))) ++violations;
      if (!ev.attr_leq(u, w)) ++violations;
      if (!(ev.next_op(ev.attr_and(a, b)) == ev.attr_and(ev.next_op(a), ev.next_op(b)))) ++violations;
      if (!(ev.wnext_op(ev.attr_and(a, b)) == ev.attr_and(ev.wnext_op(a), ev.wnext_op(b))))
        ++violations;
      Attribute a2 = ev.attr_or(a, random_attr());
      Attribute b2 = ev.attr_or(b, random_attr());
      if (!ev.attr_leq(u, ev.until_op(a2, b2))) ++violations;
      if (!ev.attr_leq(w, ev.wuntil_op(a2, b2))) ++violations;
      // the sugared operators are the stated fixpoints
      if (!(ev.until_op(ev.top(ctx), a) ==
            ev.attr_or(a, ev.attr_and(ev.top(ctx), ev.next_op(ev.until_op(ev.top(ctx), a))))))
        ++violations;
      if (!(ev.wuntil_op(a, ev.bottom(ctx)) ==
            ev.attr_and(a, ev.next_op(ev.wuntil_op(a, ev.bottom(ctx))))))
        ++violations;
    }
  }
  // definitional identities of the derived operators, formula-level
  cqtl_test::Rng rng2(556);
  for (size_t mi = 0; mi < corpus().size(); mi += 10) {
    const CounterpartModel& m = corpus()[mi];
    Context ctx = cqtl_test::random_context(rng2, m.sig, 1, 1);
    FormulaPtr body = cqtl_test::random_formula(rng2, m.sig, ctx, 3);
    FormulaPtr checked = scope_check({ctx, body}, m.sig).body;
    Evaluator ev(m);
    Attribute body_val = ev.eval(desugar(checked), ctx);
    Attribute diamond = ev.eval(desugar(f_eventually(checked)), ctx);
    Attribute box = ev.eval(desugar(f_always(checked)), ctx);
    if (!(diamond == ev.until_op(ev.top(ctx), body_val))) ++violations;
    if (!(box == ev.wuntil_op(body_val, ev.bottom(ctx)))) ++violations;
  }
  bool ok = violations == 0;
  report(6, "expansion, definitional, monotonicity and distribution laws", ok,
         std::to_string(violations) + " violations");
  REQUIRE(ok);
}

TEST_CASE("criterion 7: functor laws for the power-set lifting") {
  long checked_pairs = 0;
  long violations = 0;
  for (const CounterpartModel& m : corpus()) {
    // identities per world
    for (const WorldAlgebra& w : m.worlds)
      for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s) {
        int n = w.carrier_size(s);
        PowersetStep id = lift_powerset(identity_relation(n));
        for (uint64_t set = 0; set < (uint64_t{1} << n); ++set)
          if (id.apply(set) != set) ++violations;
      }
    // composition on every composable transition pair
    for (int t1 = 0; t1 < static_cast<int>(m.transitions.size()); ++t1)
      for (int t2 = 0; t2 < static_cast<int>(m.transitions.size()); ++t2) {
        if (m.transitions[t1].target != m.transitions[t2].source) continue;
        ++checked_pairs;
        std::vector<int> path = {t1, t2};
        auto composed = compose_path(m, m.transitions[t1].source, path);
        for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s) {
          StepRelation composite{
              m.worlds[m.transitions[t1].source].carrier_size(s),
              m.worlds[m.transitions[t2].target].carrier_size(s),
              {}};
          for (ElemIdx i = 0; i < static_cast<ElemIdx>(composed[s].size()); ++i)
            if (composed[s][i] >= 0) composite.pairs.insert({composed[s][i], i});
          PowersetStep lift_composite = lift_powerset(composite);
          PowersetStep l1 = lift_powerset(step_relation(m, t1, s));
          PowersetStep l2 = lift_powerset(step_relation(m, t2, s));
          for (uint64_t set = 0; set < (uint64_t{1} << composite.present_size); ++set)
            if (lift_composite.apply(set) != l2.apply(l1.apply(set))) ++violations;
        }
      }
  }
  bool functor_ok = violations == 0 && checked_pairs > 0;
  report(7, "power-set lifting preserves identities and composition", functor_ok,
         std::to_string(checked_pairs) + " composable pairs");
  REQUIRE(functor_ok);

  // The symmetric ("both directions") lifting must exhibit a strict
  // composition failure on a 3-world witness.  The search below is
  // exhaustive over all relation pairs with carriers up to 3 between
  // three worlds; the assertion is expected to fail, because this
  // lifting provably composes strictly (see tests/test_relation.cpp
  // and the project notes).
  auto compose_lax = [](const std::set<std::pair<uint64_t, uint64_t>>& second,
                        const std::set<std::pair<uint64_t, uint64_t>>& first) {
    std::set<std::pair<uint64_t, uint64_t>> out;
    for (auto [mid2, present] : first)
      for (auto [future, mid1] : second)
        if (mid1 == mid2) out.insert({future, present});
    return out;
  };
  bool found_failure = false;
  std::string witness;
  for (int na = 1; na <= 3 && !found_failure; ++na)
    for (int nb = 1; nb <= 3 && !found_failure; ++nb)
      for (int nc = 1; nc <= 3 && !found_failure; ++nc) {
        uint32_t r_count = uint32_t{1} << (na * nb);
        uint32_t s_count = uint32_t{1} << (nb * nc);
        if (static_cast<uint64_t>(r_count) * s_count > (uint64_t{1} << 20)) continue;
        for (uint32_t rbits = 0; rbits < r_count && !found_failure; ++rbits)
          for (uint32_t sbits = 0; sbits < s_count && !found_failure; ++sbits) {
            StepRelation r{na, nb, {}}, s{nb, nc, {}};
            for (int f = 0; f < nb; ++f)
              for (int p = 0; p < na; ++p)
                if (rbits >> (f * na + p) & 1) r.pairs.insert({f, p});
            for (int f = 0; f < nc; ++f)
              for (int p = 0; p < nb; ++p)
                if (sbits >> (f * nb + p) & 1) s.pairs.insert({f, p});
            if (lift_powerset_lax(relation_compose(s, r)) !=
                compose_lax(lift_powerset_lax(s), lift_powerset_lax(r))) {
              found_failure = true;
              witness = "|A|=" + std::to_string(na) + " |B|=" + std::to_string(nb) +
                        " |C|=" + std::to_string(nc);
            }
          }
      }
  report(7, "symmetric lifting exhibits a strict-composition failure", found_failure,
         found_failure ? witness : "exhaustive search found none; the lifting composes strictly");
  REQUIRE(found_failure);
}

TEST_CASE("criterion 8: equality agrees with its second-order expansion") {
  cqtl_test::Rng rng(888);
  long checked = 0;
  long mismatches = 0;
  for (const CounterpartModel& m : corpus()) {
    for (int tries = 0; tries < 6; ++tries) {
      Context ctx = cqtl_test::random_context(rng, m.sig, 2, 0);
      FormulaPtr f = cqtl_test::random_formula(rng, m.sig, ctx, 3);
      FormulaPtr checked_f = scope_check({ctx, f}, m.sig).body;
      Evaluator ev1(m), ev2(m);
      Attribute primitive = ev1.eval(desugar(checked_f, {false}), ctx);
      Attribute expanded = ev2.eval(desugar(checked_f, {true}), ctx);
      ++checked;
      if (!(primitive == expanded)) ++mismatches;
    }
  }
  bool ok = mismatches == 0 && checked == 1200;
  report(8, "primitive equality = second-order expansion on the corpus", ok,
         std::to_string(checked) + " formulas");
  REQUIRE(ok);
}

TEST_CASE("criterion 9: round trips are identities on the corpus") {
  long text_failures = 0;
  long view_failures = 0;
  for (const CounterpartModel& m : corpus()) {
    if (!(parse_model(print_model(m)) == m)) ++text_failures;
    if (!(roundtrip_relational_view(m) == m)) ++view_failures;
  }
  for (const char* fixture : {"running.cm", "twostate.cm", "ltl_chain.cm"}) {
    CounterpartModel m = load_model(cqtl_test::fixture_path(fixture));
    if (!(parse_model(print_model(m)) == m)) ++text_failures;
    if (!(roundtrip_relational_view(m) == m)) ++view_failures;
  }
  bool ok = text_failures == 0 && view_failures == 0;
  report(9, "text-format and relational-view round trips", ok);
  REQUIRE(ok);
}

TEST_CASE("criterion 10: standard linear-time semantics on the five-world chain") {
  CounterpartModel m = cqtl_test::ltl_chain_model();
  std::ifstream rows(cqtl_test::fixture_path("ltl_chain_expected.tsv"));
  REQUIRE(rows.good());

  long row_count = 0;
  long mismatches = 0;
  std::string line;
  std::vector<std::string> worlds = {"k0", "k1", "k2", "k3", "k4"};
  while (std::getline(rows, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cells(line);
    std::string formula;
    std::getline(cells, formula, '\t');
    Attribute a = run_text(m, "", formula);
    for (const std::string& world : worlds) {
      std::string cell;
      std::getline(cells, cell, '\t');
      bool expected = cell == "1";
      bool got = !a.per_world[m.world_index(world)].empty();
      if (expected != got) ++mismatches;
    }
    ++row_count;
  }

  // the chain also satisfies the expansion laws checked in criterion 6
  Context empty_ctx;
  Evaluator ev(m);
  Attribute p = ev.eval(detail::prepare_formula("exists x:p. present(x)", empty_ctx, m.sig, false),
                        empty_ctx);
  Attribute q = ev.eval(detail::prepare_formula("exists x:q. present(x)", empty_ctx, m.sig, false),
                        empty_ctx);
  Attribute u = ev.until_op(p, q);
  Attribute w = ev.wuntil_op(p, q);
  bool laws_ok = u == ev.attr_or(q, ev.attr_and(p, ev.next_op(u))) &&
                 w == ev.attr_or(q, ev.attr_and(p, ev.next_op(w))) && ev.attr_leq(u, w);

  bool ok = mismatches == 0 && row_count >= 19 && laws_ok;
  report(10, "hand-enumerated suffix semantics reproduced on the chain", ok,
         std::to_string(row_count) + " rows, " + std::to_string(mismatches) + " mismatches");
  REQUIRE(ok);
}
