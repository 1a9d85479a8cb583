#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cqtl/eval.hpp"

namespace cqtl {

// One live point of the flattened product: a world together with an
// assignment over it.  Counterpart nonexistence is the absorbing Dead
// marker, represented below as the pseudo-node id `dead`.
struct Config {
  WorldIdx world = -1;
  Assignment a;
  auto operator<=>(const Config&) const = default;
};

// Product of the model with the assignment spaces of one context.  A
// live node has one edge per outgoing transition of its world, going
// to the stepped configuration or to Dead when the step is undefined.
class ConfigGraph {
 public:
  static constexpr int dead = -1;

  ConfigGraph(const CounterpartModel& m, Context ctx, const EvalOptions& opts)
      : m_(&m), ctx_(std::move(ctx)) {
    for (WorldIdx w = 0; w < static_cast<WorldIdx>(m.worlds.size()); ++w) {
      world_nodes_.emplace_back();
      for_each_assignment(m, ctx_, w, opts, [&](const Assignment& a) {
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(Config{w, a});
        index_[nodes_.back()] = id;
        world_nodes_[w].push_back(id);
      });
    }
    succ_.resize(nodes_.size());
    pred_.resize(nodes_.size());
    for (int n = 0; n < static_cast<int>(nodes_.size()); ++n) {
      for (int t : outgoing(m, nodes_[n].world)) {
        std::optional<Assignment> stepped = step_assignment(m, t, ctx_, nodes_[n].a);
        int target = dead;
        if (stepped) target = find(Config{m.transitions[t].target, *stepped});
        succ_[n].push_back({t, target});
        if (target != dead) pred_[target].push_back(n);
      }
    }
  }

  const Context& ctx() const { return ctx_; }
  int live_count() const { return static_cast<int>(nodes_.size()); }
  const Config& node(int id) const { return nodes_[id]; }
  const std::vector<int>& nodes_of_world(WorldIdx w) const { return world_nodes_[w]; }
  // (transition, target id or dead), one entry per outgoing transition
  const std::vector<std::pair<int, int>>& successors(int id) const { return succ_[id]; }
  const std::vector<int>& predecessors(int id) const { return pred_[id]; }

  int find(const Config& c) const {
    auto it = index_.find(c);
    return it == index_.end() ? dead : it->second;
  }

  Attribute to_attribute(const std::vector<char>& in) const {
    Attribute out{ctx_, std::vector<AssignmentSet>(m_->worlds.size())};
    for (int n = 0; n < live_count(); ++n)
      if (in[n]) out.per_world[nodes_[n].world].insert(nodes_[n].a);
    return out;
  }

 private:
  const CounterpartModel* m_;
  Context ctx_;
  std::vector<Config> nodes_;
  std::vector<std::vector<int>> world_nodes_;
  std::vector<std::vector<std::pair<int, int>>> succ_;
  std::vector<std::vector<int>> pred_;
  std::map<Config, int> index_;
};

namespace detail {

// Backward strong-until on the configuration graph: the least set Z
// with Z = B ∪ (A ∩ AX Z), computed by counter-based propagation.
// Dead satisfies nothing, so an edge into Dead permanently blocks AX;
// live nodes without successors satisfy AX vacuously.
inline std::vector<char> backward_au(const ConfigGraph& g, const std::vector<char>& a,
                                     const std::vector<char>& b) {
  int n = g.live_count();
  std::vector<char> in_z(n, 0);
  std::vector<int> pending(n, 0);
  std::deque<int> work;
  for (int i = 0; i < n; ++i) {
    int live_succ = 0;
    for (auto [t, target] : g.successors(i))
      if (target != ConfigGraph::dead) ++live_succ;
    // edges into Dead can never be discharged
    int dead_succ = static_cast<int>(g.successors(i).size()) - live_succ;
    pending[i] = live_succ + (dead_succ > 0 ? n + 1 : 0);
    if (b[i] || (a[i] && pending[i] == 0)) {
      in_z[i] = 1;
      work.push_back(i);
    }
  }
  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    for (int p : g.predecessors(u)) {
      if (--pending[p] == 0 && a[p] && !in_z[p]) {
        in_z[p] = 1;
        work.push_back(p);
      }
    }
  }
  return in_z;
}

// Greatest set Z with Z = B ∪ (A ∩ AX Z), computed by deleting
// violating nodes until none remain.
inline std::vector<char> backward_aw(const ConfigGraph& g, const std::vector<char>& a,
                                     const std::vector<char>& b) {
  int n = g.live_count();
  std::vector<char> in_z(n, 1);
  auto violates = [&](int i) {
    if (b[i]) return false;
    if (!a[i]) return true;
    for (auto [t, target] : g.successors(i))
      if (target == ConfigGraph::dead || !in_z[target]) return true;
    return false;
  };
  std::deque<int> work;
  for (int i = 0; i < n; ++i)
    if (violates(i)) work.push_back(i);
  while (!work.empty()) {
    int u = work.front();
    work.pop_front();
    if (!in_z[u]) continue;
    if (!violates(u)) continue;
    in_z[u] = 0;
    for (int p : g.predecessors(u))
      if (in_z[p] && violates(p)) work.push_back(p);
  }
  return in_z;
}

// Second evaluator, deliberately independent of the attribute-lattice
// Kleene iteration: truth values live on configuration-graph nodes and
// the temporal operators are classical backward graph algorithms.
class OracleEngine {
 public:
  OracleEngine(const CounterpartModel& m, EvalOptions opts) : m_(m), opts_(opts) {}

  Attribute run(const FormulaPtr& f, const Context& ctx) {
    const ConfigGraph& g = graph(ctx);
    return g.to_attribute(sat(f, ctx));
  }

  const ConfigGraph& graph(const Context& ctx) {
    auto it = graphs_.find(ctx);
    if (it == graphs_.end())
      it = graphs_.emplace(ctx, ConfigGraph(m_, ctx, opts_)).first;
    return it->second;
  }

 private:
  std::vector<char> sat(const FormulaPtr& f, const Context& ctx) {
    const ConfigGraph& g = graph(ctx);
    int n = g.live_count();
    switch (f->kind) {
      case FormulaKind::truth:
        return std::vector<char>(n, 1);
      case FormulaKind::falsity:
        return std::vector<char>(n, 0);
      case FormulaKind::membership: {
        int slot = -1;
        for (size_t i = ctx.so.size(); i-- > 0;)
          if (ctx.so[i].name == f->var) {
            slot = static_cast<int>(i);
            break;
          }
        if (slot < 0)
          fail(errc::context_mismatch, "'" + f->var + "' is not a second-order context variable");
        std::vector<char> out(n, 0);
        for (int i = 0; i < n; ++i) {
          const Config& c = g.node(i);
          ElemIdx v = eval_term(m_, f->lhs_term, c.world, c.a, ctx);
          out[i] = (c.a.so[slot] >> v & 1) != 0;
        }
        return out;
      }
      case FormulaKind::equal: {
        std::vector<char> out(n, 0);
        for (int i = 0; i < n; ++i) {
          const Config& c = g.node(i);
          out[i] = eval_term(m_, f->lhs_term, c.world, c.a, ctx) ==
                   eval_term(m_, f->rhs_term, c.world, c.a, ctx);
        }
        return out;
      }
      case FormulaKind::negation: {
        std::vector<char> out = sat(f->child, ctx);
        for (char& v : out) v = !v;
        return out;
      }
      case FormulaKind::conjunction:
      case FormulaKind::disjunction: {
        std::vector<char> l = sat(f->child, ctx);
        std::vector<char> r = sat(f->child2, ctx);
        for (int i = 0; i < n; ++i)
          l[i] = f->kind == FormulaKind::conjunction ? (l[i] && r[i]) : (l[i] || r[i]);
        return l;
      }
      case FormulaKind::exists_fo:
      case FormulaKind::forall_fo: {
        Context inner = ctx;
        inner.fo.push_back({f->var, f->sort});
        std::vector<char> body = sat(f->child, inner);
        const ConfigGraph& gi = graph(inner);
        bool universal = f->kind == FormulaKind::forall_fo;
        std::vector<char> out(n, 0);
        for (int i = 0; i < n; ++i) {
          const Config& c = g.node(i);
          int card = m_.worlds[c.world].carrier_size(f->sort);
          bool acc = universal;
          for (ElemIdx b = 0; b < card; ++b) {
            Config ext{c.world, c.a};
            ext.a.fo.push_back(b);
            int id = gi.find(ext);
            bool v = id != ConfigGraph::dead && body[id];
            if (universal) acc = acc && v;
            else acc = acc || v;
            if (acc != universal) break;
          }
          out[i] = acc;
        }
        return out;
      }
      case FormulaKind::exists_so:
      case FormulaKind::forall_so: {
        Context inner = ctx;
        inner.so.push_back({f->var, f->sort});
        std::vector<char> body = sat(f->child, inner);
        const ConfigGraph& gi = graph(inner);
        bool universal = f->kind == FormulaKind::forall_so;
        std::vector<char> out(n, 0);
        for (int i = 0; i < n; ++i) {
          const Config& c = g.node(i);
          int card = m_.worlds[c.world].carrier_size(f->sort);
          check_so_carrier(m_, f->sort, c.world, opts_.so_cap);
          bool acc = universal;
          for (uint64_t s = 0; s < (uint64_t{1} << card); ++s) {
            Config ext{c.world, c.a};
            ext.a.so.push_back(s);
            int id = gi.find(ext);
            bool v = id != ConfigGraph::dead && body[id];
            if (universal) acc = acc && v;
            else acc = acc || v;
            if (acc != universal) break;
          }
          out[i] = acc;
        }
        return out;
      }
      case FormulaKind::next:
      case FormulaKind::weak_next: {
        std::vector<char> body = sat(f->child, ctx);
        bool weak = f->kind == FormulaKind::weak_next;
        std::vector<char> out(n, 0);
        for (int i = 0; i < n; ++i) {
          bool ok = true;
          for (auto [t, target] : g.successors(i)) {
            if (target == ConfigGraph::dead) {
              if (!weak) ok = false;
            } else if (!body[target]) {
              ok = false;
            }
            if (!ok) break;
          }
          out[i] = ok;
        }
        return out;
      }
      case FormulaKind::until:
        return backward_au(g, sat(f->child, ctx), sat(f->child2, ctx));
      case FormulaKind::weak_until:
        return backward_aw(g, sat(f->child, ctx), sat(f->child2, ctx));
      case FormulaKind::eventually:
      case FormulaKind::always:
      case FormulaKind::not_equal:
      case FormulaKind::macro_call:
        fail(errc::validation_error, "the oracle expects a desugared formula");
    }
    fail(errc::validation_error, "unreachable formula kind");
  }

  const CounterpartModel& m_;
  EvalOptions opts_;
  std::map<Context, ConfigGraph> graphs_;
};

}  // namespace detail

inline ConfigGraph build_config_graph(const CounterpartModel& m, const Context& ctx,
                                      EvalOptions opts = {}) {
  return ConfigGraph(m, ctx, opts);
}

// Independent evaluation of a scope-checked, desugared formula via the
// configuration graph; agrees with Evaluator::eval on every input.
inline Attribute oracle_eval(const FormulaPtr& f, const Context& ctx, const CounterpartModel& m,
                             EvalOptions opts = {}) {
  detail::OracleEngine engine(m, opts);
  return engine.run(f, ctx);
}

// Stepwise application of the assignment relation along a path; Dead
// (nullopt) is absorbing.  The path must chain world-to-world from the
// start configuration's world.
inline std::vector<std::optional<Config>> trajectory(const CounterpartModel& m, const Context& ctx,
                                                     const Config& start, std::span<const int> path) {
  if (start.world < 0 || start.world >= static_cast<WorldIdx>(m.worlds.size()))
    fail(errc::unknown_world, "trajectory start world out of range");
  std::vector<std::optional<Config>> out;
  out.push_back(start);
  WorldIdx at = start.world;
  std::optional<Config> cur = start;
  for (int ti : path) {
    if (ti < 0 || ti >= static_cast<int>(m.transitions.size()))
      fail(errc::non_composable_path, "path uses an unknown transition");
    const Transition& t = m.transitions[ti];
    if (t.source != at)
      fail(errc::non_composable_path,
           "transition '" + t.id + "' does not start at world '" + m.worlds[at].id + "'");
    if (cur) {
      std::optional<Assignment> stepped = step_assignment(m, ti, ctx, cur->a);
      if (stepped) cur = Config{t.target, *stepped};
      else cur = std::nullopt;
    }
    out.push_back(cur);
    at = t.target;
  }
  return out;
}

}  // namespace cqtl
