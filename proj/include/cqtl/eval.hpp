#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cqtl/formula.hpp"
#include "cqtl/model.hpp"

namespace cqtl {

// An environment over one world's carriers: fo slots hold elements of
// the context's first-order sorts, so slots hold subsets (bit masks).
struct Assignment {
  std::vector<ElemIdx> fo;
  std::vector<uint64_t> so;
  auto operator<=>(const Assignment&) const = default;
};

using AssignmentSet = std::set<Assignment>;

// World-indexed family of assignment sets: the value of a formula in
// context.  Attributes of distinct contexts are never combined.
struct Attribute {
  Context ctx;
  std::vector<AssignmentSet> per_world;

  bool operator==(const Attribute&) const = default;
};

struct EvalOptions {
  // Carriers larger than this cannot be quantified over at second
  // order (subset enumeration would not terminate in useful time).
  int so_cap = 16;
  // Upper bound on one world's assignment space.
  uint64_t max_states = uint64_t{1} << 26;
};

struct EvalStats {
  long fixpoint_rounds = 0;
  uint64_t config_count = 0;
};

// --- assignment-space plumbing shared by the evaluator and the oracle ----

inline void check_so_carrier(const CounterpartModel& m, SortIdx sort, WorldIdx w, int cap) {
  int card = m.worlds[w].carrier_size(sort);
  if (card > cap)
    fail(errc::state_space_cap,
         "second-order enumeration over sort '" + m.sig.sorts[sort].name + "' at world '" +
             m.worlds[w].id + "': carrier size " + std::to_string(card) + " exceeds the cap " +
             std::to_string(cap) + " (see --max-so-carrier)");
}

inline uint64_t assignment_space_size(const CounterpartModel& m, const Context& ctx, WorldIdx w,
                                      const EvalOptions& opts) {
  auto too_big = [&]() {
    fail(errc::state_space_cap,
         "assignment space at world '" + m.worlds[w].id + "' exceeds " + std::to_string(opts.max_states));
  };
  uint64_t n = 1;
  for (const TypedVar& v : ctx.fo) {
    uint64_t c = static_cast<uint64_t>(m.worlds[w].carrier_size(v.sort));
    if (c == 0) return 0;
    if (n > opts.max_states / c) too_big();
    n *= c;
  }
  for (const TypedVar& v : ctx.so) {
    int card = m.worlds[w].carrier_size(v.sort);
    check_so_carrier(m, v.sort, w, opts.so_cap);
    if (card >= 64 || n > (opts.max_states >> card)) too_big();
    n <<= card;
  }
  return n;
}

template <typename Fn>
void for_each_assignment(const CounterpartModel& m, const Context& ctx, WorldIdx w,
                         const EvalOptions& opts, Fn&& fn) {
  if (assignment_space_size(m, ctx, w, opts) == 0) return;
  std::vector<int> fo_card, so_card;
  for (const TypedVar& v : ctx.fo) fo_card.push_back(m.worlds[w].carrier_size(v.sort));
  for (const TypedVar& v : ctx.so) so_card.push_back(m.worlds[w].carrier_size(v.sort));
  Assignment a;
  a.fo.assign(fo_card.size(), 0);
  a.so.assign(so_card.size(), 0);
  for (;;) {
    fn(a);
    size_t i = a.so.size();
    while (i > 0) {
      --i;
      if (++a.so[i] < (uint64_t{1} << so_card[i])) goto next;
      a.so[i] = 0;
    }
    i = a.fo.size();
    while (i > 0) {
      --i;
      if (++a.fo[i] < fo_card[i]) goto next;
      a.fo[i] = 0;
    }
    return;
  next:;
  }
}

inline uint64_t image_mask(const CounterpartModel& m, int transition, SortIdx sort, uint64_t mask) {
  const std::vector<ElemIdx>& map = m.transitions[transition].maps[sort];
  uint64_t out = 0;
  for (size_t i = 0; i < map.size(); ++i)
    if ((mask >> i & 1) && map[i] >= 0) out |= uint64_t{1} << map[i];
  return out;
}

// The product relation on assignments induced by a transition: defined
// when every first-order value has a counterpart; subsets evolve
// through the power-set lifting (always defined).
inline std::optional<Assignment> step_assignment(const CounterpartModel& m, int transition,
                                                 const Context& ctx, const Assignment& a) {
  const Transition& t = m.transitions[transition];
  Assignment out;
  out.fo.reserve(a.fo.size());
  for (size_t i = 0; i < a.fo.size(); ++i) {
    ElemIdx v = t.maps[ctx.fo[i].sort][a.fo[i]];
    if (v < 0) return std::nullopt;
    out.fo.push_back(v);
  }
  out.so.reserve(a.so.size());
  for (size_t i = 0; i < a.so.size(); ++i)
    out.so.push_back(image_mask(m, transition, ctx.so[i].sort, a.so[i]));
  return out;
}

inline ElemIdx eval_term(const CounterpartModel& m, const Term& t, WorldIdx w, const Assignment& a,
                         const Context& ctx) {
  if (t.kind == Term::Kind::variable) {
    for (size_t i = ctx.fo.size(); i-- > 0;)  // innermost binding wins
      if (ctx.fo[i].name == t.head) return a.fo[i];
    fail(errc::context_mismatch, "variable '" + t.head + "' is not in the evaluation context");
  }
  int f = m.sig.find_function(t.head);
  if (f < 0) fail(errc::context_mismatch, "function '" + t.head + "' is not in the signature");
  const FunctionSymbol& fs = m.sig.functions[f];
  std::vector<ElemIdx> args(t.args.size());
  for (size_t i = 0; i < t.args.size(); ++i) args[i] = eval_term(m, t.args[i], w, a, ctx);
  return m.worlds[w].tables[f][table_index(m.worlds[w], fs, args)];
}

// --- the fixpoint engine --------------------------------------------------

class Evaluator {
 public:
  explicit Evaluator(const CounterpartModel& m, EvalOptions opts = {}) : m_(m), opts_(opts) {}

  const EvalStats& stats() const { return stats_; }
  const CounterpartModel& model() const { return m_; }
  const EvalOptions& options() const { return opts_; }

  Attribute top(const Context& ctx) const {
    Attribute a{ctx, std::vector<AssignmentSet>(m_.worlds.size())};
    for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w)
      for_each_assignment(m_, ctx, w, opts_, [&](const Assignment& s) { a.per_world[w].insert(s); });
    return a;
  }

  Attribute bottom(const Context& ctx) const {
    return Attribute{ctx, std::vector<AssignmentSet>(m_.worlds.size())};
  }

  // s is in the result iff under every outgoing transition the stepped
  // assignment exists and satisfies A.  Vacuously everything at worlds
  // with no outgoing transitions.
  Attribute next_op(const Attribute& A) const {
    Attribute out = bottom(A.ctx);
    for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w) {
      std::vector<int> outs = outgoing(m_, w);
      for_each_assignment(m_, A.ctx, w, opts_, [&](const Assignment& s) {
        for (int t : outs) {
          std::optional<Assignment> stepped = step_assignment(m_, t, A.ctx, s);
          if (!stepped || !A.per_world[m_.transitions[t].target].count(*stepped)) return;
        }
        out.per_world[w].insert(s);
      });
    }
    return out;
  }

  // Weak variant: transitions where the assignment dies are ignored.
  Attribute wnext_op(const Attribute& A) const {
    Attribute out = bottom(A.ctx);
    for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w) {
      std::vector<int> outs = outgoing(m_, w);
      for_each_assignment(m_, A.ctx, w, opts_, [&](const Assignment& s) {
        for (int t : outs) {
          std::optional<Assignment> stepped = step_assignment(m_, t, A.ctx, s);
          if (stepped && !A.per_world[m_.transitions[t].target].count(*stepped)) return;
        }
        out.per_world[w].insert(s);
      });
    }
    return out;
  }

  // Least fixed point of C ↦ B ∪ (A ∩ O C), iterated from the bottom
  // attribute; terminates on the finite lattice.
  Attribute until_op(const Attribute& A, const Attribute& B) {
    require_same_context(A, B);
    Attribute c = bottom(A.ctx);
    for (;;) {
      ++stats_.fixpoint_rounds;
      Attribute next = attr_or(B, attr_and(A, next_op(c)));
      if (next == c) return c;
      c = std::move(next);
    }
  }

  // Greatest fixed point of the same function, iterated from the top.
  Attribute wuntil_op(const Attribute& A, const Attribute& B) {
    require_same_context(A, B);
    Attribute c = top(A.ctx);
    for (;;) {
      ++stats_.fixpoint_rounds;
      Attribute next = attr_or(B, attr_and(A, next_op(c)));
      if (next == c) return c;
      c = std::move(next);
    }
  }

  Attribute attr_and(const Attribute& a, const Attribute& b) const {
    require_same_context(a, b);
    Attribute out = bottom(a.ctx);
    for (size_t w = 0; w < out.per_world.size(); ++w)
      for (const Assignment& s : a.per_world[w])
        if (b.per_world[w].count(s)) out.per_world[w].insert(s);
    return out;
  }

  Attribute attr_or(const Attribute& a, const Attribute& b) const {
    require_same_context(a, b);
    Attribute out = a;
    for (size_t w = 0; w < out.per_world.size(); ++w)
      out.per_world[w].insert(b.per_world[w].begin(), b.per_world[w].end());
    return out;
  }

  Attribute attr_complement(const Attribute& a) const {
    Attribute out = bottom(a.ctx);
    for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w)
      for_each_assignment(m_, a.ctx, w, opts_, [&](const Assignment& s) {
        if (!a.per_world[w].count(s)) out.per_world[w].insert(s);
      });
    return out;
  }

  bool attr_leq(const Attribute& a, const Attribute& b) const {
    require_same_context(a, b);
    for (size_t w = 0; w < a.per_world.size(); ++w)
      for (const Assignment& s : a.per_world[w])
        if (!b.per_world[w].count(s)) return false;
    return true;
  }

  // Interprets a scope-checked, desugared formula in context.
  Attribute eval(const FormulaPtr& f, const Context& ctx) {
    stats_.config_count = 0;
    for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w)
      stats_.config_count += assignment_space_size(m_, ctx, w, opts_);
    return eval_rec(f, ctx);
  }

 private:
  Attribute eval_rec(const FormulaPtr& f, const Context& ctx) {
    MemoKey key{f, ctx};  // the key owns the node, so addresses stay unique
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Attribute result = eval_uncached(f, ctx);
    memo_.emplace(std::move(key), result);
    return result;
  }

  Attribute eval_uncached(const FormulaPtr& f, const Context& ctx) {
    switch (f->kind) {
      case FormulaKind::truth:
        return top(ctx);
      case FormulaKind::falsity:
        return bottom(ctx);
      case FormulaKind::membership: {
        int slot = -1;
        for (size_t i = ctx.so.size(); i-- > 0;)
          if (ctx.so[i].name == f->var) {
            slot = static_cast<int>(i);
            break;
          }
        if (slot < 0)
          fail(errc::context_mismatch, "'" + f->var + "' is not a second-order context variable");
        Attribute out = bottom(ctx);
        for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w)
          for_each_assignment(m_, ctx, w, opts_, [&](const Assignment& a) {
            ElemIdx v = eval_term(m_, f->lhs_term, w, a, ctx);
            if (a.so[slot] >> v & 1) out.per_world[w].insert(a);
          });
        return out;
      }
      case FormulaKind::negation:
        return attr_complement(eval_rec(f->child, ctx));
      case FormulaKind::conjunction:
        return attr_and(eval_rec(f->child, ctx), eval_rec(f->child2, ctx));
      case FormulaKind::disjunction:
        return attr_or(eval_rec(f->child, ctx), eval_rec(f->child2, ctx));
      case FormulaKind::equal: {
        Attribute out = bottom(ctx);
        for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w)
          for_each_assignment(m_, ctx, w, opts_, [&](const Assignment& a) {
            if (eval_term(m_, f->lhs_term, w, a, ctx) == eval_term(m_, f->rhs_term, w, a, ctx))
              out.per_world[w].insert(a);
          });
        return out;
      }
      case FormulaKind::exists_fo:
      case FormulaKind::forall_fo: {
        Context inner = ctx;
        inner.fo.push_back({f->var, f->sort});
        Attribute body = eval_rec(f->child, inner);
        return project_fo(body, ctx, f->sort, f->kind == FormulaKind::forall_fo);
      }
      case FormulaKind::exists_so:
      case FormulaKind::forall_so: {
        Context inner = ctx;
        inner.so.push_back({f->var, f->sort});
        Attribute body = eval_rec(f->child, inner);
        return project_so(body, ctx, f->sort, f->kind == FormulaKind::forall_so);
      }
      case FormulaKind::next:
        return next_op(eval_rec(f->child, ctx));
      case FormulaKind::weak_next:
        return wnext_op(eval_rec(f->child, ctx));
      case FormulaKind::until:
        return until_op(eval_rec(f->child, ctx), eval_rec(f->child2, ctx));
      case FormulaKind::weak_until:
        return wuntil_op(eval_rec(f->child, ctx), eval_rec(f->child2, ctx));
      case FormulaKind::eventually:
      case FormulaKind::always:
      case FormulaKind::not_equal:
      case FormulaKind::macro_call:
        fail(errc::validation_error, "evaluation expects a desugared formula");
    }
    fail(errc::validation_error, "unreachable formula kind");
  }

  // Drop the innermost first-order slot.  Universal projection demands
  // every carrier extension; an empty carrier is vacuously universal.
  Attribute project_fo(const Attribute& body, const Context& outer, SortIdx sort, bool universal) {
    Attribute out = bottom(outer);
    for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w) {
      int card = m_.worlds[w].carrier_size(sort);
      if (!universal) {
        for (const Assignment& a : body.per_world[w]) {
          Assignment p = a;
          p.fo.pop_back();
          out.per_world[w].insert(std::move(p));
        }
      } else if (card == 0) {
        for_each_assignment(m_, outer, w, opts_, [&](const Assignment& a) { out.per_world[w].insert(a); });
      } else {
        std::map<Assignment, int> hits;
        for (const Assignment& a : body.per_world[w]) {
          Assignment p = a;
          p.fo.pop_back();
          ++hits[std::move(p)];
        }
        for (auto& [p, n] : hits)
          if (n == card) out.per_world[w].insert(p);
      }
    }
    return out;
  }

  Attribute project_so(const Attribute& body, const Context& outer, SortIdx sort, bool universal) {
    Attribute out = bottom(outer);
    for (WorldIdx w = 0; w < static_cast<WorldIdx>(m_.worlds.size()); ++w) {
      int card = m_.worlds[w].carrier_size(sort);
      check_so_carrier(m_, sort, w, opts_.so_cap);
      uint64_t subsets = uint64_t{1} << card;
      if (!universal) {
        for (const Assignment& a : body.per_world[w]) {
          Assignment p = a;
          p.so.pop_back();
          out.per_world[w].insert(std::move(p));
        }
      } else {
        std::map<Assignment, uint64_t> hits;
        for (const Assignment& a : body.per_world[w]) {
          Assignment p = a;
          p.so.pop_back();
          ++hits[std::move(p)];
        }
        for (auto& [p, n] : hits)
          if (n == subsets) out.per_world[w].insert(p);
      }
    }
    return out;
  }

  void require_same_context(const Attribute& a, const Attribute& b) const {
    if (!(a.ctx == b.ctx))
      fail(errc::context_mismatch, "attributes over different contexts cannot be combined");
  }

  struct MemoKey {
    FormulaPtr node;
    Context ctx;
    bool operator<(const MemoKey& o) const {
      if (node.get() != o.node.get()) return node.get() < o.node.get();
      return ctx < o.ctx;
    }
  };

  const CounterpartModel& m_;
  EvalOptions opts_;
  EvalStats stats_;
  std::map<MemoKey, Attribute> memo_;
};

}  // namespace cqtl
