#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cqtl/formula.hpp"

namespace cqtl {

struct MacroDef {
  std::string name;
  int arity = 1;
  bool available = true;
};

namespace detail {

// loop(x) needs the graph shape: two unary symbols s and t over the
// same argument sort with a common result sort.
struct LoopShape {
  SortIdx arg_sort;
  int fn_s;
  int fn_t;
};

inline std::optional<LoopShape> loop_shape(const Signature& sig) {
  int s = sig.find_function("s");
  int t = sig.find_function("t");
  if (s < 0 || t < 0) return std::nullopt;
  const FunctionSymbol& fs = sig.functions[s];
  const FunctionSymbol& ft = sig.functions[t];
  if (fs.arg_sorts.size() != 1 || ft.arg_sorts.size() != 1) return std::nullopt;
  if (fs.arg_sorts[0] != ft.arg_sorts[0] || fs.result_sort != ft.result_sort) return std::nullopt;
  return LoopShape{fs.arg_sorts[0], s, t};
}

}  // namespace detail

// The derived predicates that expand before scope checking.
inline std::vector<MacroDef> builtin_predicates(const Signature& sig) {
  return {
      {"present", 1, true},
      {"loop", 1, detail::loop_shape(sig).has_value()},
      {"nextStepPreserved", 1, true},
      {"nextStepDeallocated", 1, true},
  };
}

namespace detail {

class MacroExpander {
 public:
  MacroExpander(const Signature& sig, const Context& ctx, std::set<std::string> used)
      : sig_(sig), fresh_(std::move(used)) {
    env_ = ctx.fo;
  }

  FormulaPtr walk(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::macro_call:
        return expand(*f);
      case FormulaKind::exists_fo:
      case FormulaKind::forall_fo: {
        env_.push_back({f->var, f->sort});
        FormulaPtr body = walk(f->child);
        env_.pop_back();
        return f_quant(f->kind, f->var, f->sort, body);
      }
      case FormulaKind::exists_so:
      case FormulaKind::forall_so:
        return f_quant(f->kind, f->var, f->sort, walk(f->child));
      default: {
        if (!f->child && !f->child2) return f;
        Formula out = *f;
        if (f->child) out.child = walk(f->child);
        if (f->child2) out.child2 = walk(f->child2);
        return f_node(std::move(out));
      }
    }
  }

 private:
  FormulaPtr expand(const Formula& m) {
    auto want_arity = [&](int n) {
      if (static_cast<int>(m.macro_args.size()) != n)
        fail(errc::macro_arity_mismatch, "macro '" + m.var + "' expects " + std::to_string(n) +
                                             " argument(s), got " + std::to_string(m.macro_args.size()));
    };
    if (m.var == "present") {
      want_arity(1);
      return present_of(m.macro_args[0]);
    }
    if (m.var == "loop") {
      want_arity(1);
      auto shape = loop_shape(sig_);
      if (!shape)
        fail(errc::unknown_macro, "loop is only available for signatures with unary s,t over one sort");
      SortIdx got = typecheck_term(m.macro_args[0], env_, sig_);
      if (got != shape->arg_sort)
        fail(errc::sort_mismatch, "loop expects a term of sort '" + sig_.sorts[shape->arg_sort].name + "'");
      const Term& a = m.macro_args[0];
      return f_eq(Term::app(sig_.functions[shape->fn_s].name, {a}),
                  Term::app(sig_.functions[shape->fn_t].name, {a}), sig_.functions[shape->fn_s].result_sort);
    }
    if (m.var == "nextStepPreserved") {
      want_arity(1);
      FormulaPtr now = present_of(m.macro_args[0]);
      FormulaPtr later = present_of(m.macro_args[0]);
      return f_and(now, f_next(later));
    }
    if (m.var == "nextStepDeallocated") {
      want_arity(1);
      return f_and(present_of(m.macro_args[0]), f_wnext(f_false()));
    }
    fail(errc::unknown_macro, "unknown predicate '" + m.var + "'");
  }

  // present(t) at sort τ is: exists y:τ. t = y
  FormulaPtr present_of(const Term& t) {
    SortIdx sort = typecheck_term(t, env_, sig_);
    std::string y = fresh_.make("y");
    return f_quant(FormulaKind::exists_fo, y, sort, f_eq(t, Term::var(y), sort));
  }

  const Signature& sig_;
  FoContext env_;
  FreshNames fresh_;
};

}  // namespace detail

// Replaces every derived-predicate application, typechecking its
// argument in the enclosing first-order context.
inline FormulaPtr expand_macros(const FormulaPtr& f, const Context& ctx, const Signature& sig) {
  std::set<std::string> used;
  detail::collect_identifiers(*f, used);
  for (const TypedVar& v : ctx.fo) used.insert(v.name);
  for (const TypedVar& v : ctx.so) used.insert(v.name);
  detail::MacroExpander exp(sig, ctx, std::move(used));
  return exp.walk(f);
}

}  // namespace cqtl
