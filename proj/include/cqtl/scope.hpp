#pragma once

#include <string>
#include <vector>

#include "cqtl/formula.hpp"

namespace cqtl {

struct FormulaInContext {
  Context ctx;
  FormulaPtr body;
};

namespace detail {

// Scope resolution with α-renaming: a binder that shadows an enclosing
// name is renamed to a fresh one (inner binding wins), so downstream
// code only ever sees a path of distinct names.
class ScopeChecker {
 public:
  ScopeChecker(const Signature& sig, const Context& ctx, std::set<std::string> used)
      : sig_(sig), fresh_(std::move(used)) {
    for (const TypedVar& v : ctx.fo) env_.push_back({v.name, v.name, v.sort, false});
    for (const TypedVar& v : ctx.so) env_.push_back({v.name, v.name, v.sort, true});
  }

  FormulaPtr walk(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::truth:
      case FormulaKind::falsity:
        return f;
      case FormulaKind::membership: {
        auto [term, term_sort] = resolve_term(f->lhs_term);
        const Entry& var = resolve_so(f->var);
        if (var.sort != term_sort)
          fail(errc::sort_mismatch, "'" + print_term(f->lhs_term) + "' has sort '" +
                                        sig_.sorts[term_sort].name + "' but '" + f->var +
                                        "' ranges over subsets of '" + sig_.sorts[var.sort].name + "'");
        return f_mem(term, var.effective);
      }
      case FormulaKind::equal:
      case FormulaKind::not_equal: {
        auto [lhs, lsort] = resolve_term(f->lhs_term);
        auto [rhs, rsort] = resolve_term(f->rhs_term);
        if (lsort != rsort)
          fail(errc::sort_mismatch, "cannot compare '" + print_term(f->lhs_term) + "' of sort '" +
                                        sig_.sorts[lsort].name + "' with '" + print_term(f->rhs_term) +
                                        "' of sort '" + sig_.sorts[rsort].name + "'");
        return f->kind == FormulaKind::equal ? f_eq(lhs, rhs, lsort) : f_neq(lhs, rhs, lsort);
      }
      case FormulaKind::negation:
        return f_not(walk(f->child));
      case FormulaKind::exists_fo:
      case FormulaKind::forall_fo:
      case FormulaKind::exists_so:
      case FormulaKind::forall_so: {
        bool second_order =
            f->kind == FormulaKind::exists_so || f->kind == FormulaKind::forall_so;
        std::string effective = shadowed(f->var) ? fresh_.make(f->var) : f->var;
        env_.push_back({f->var, effective, f->sort, second_order});
        FormulaPtr body = walk(f->child);
        env_.pop_back();
        return f_quant(f->kind, effective, f->sort, body);
      }
      case FormulaKind::macro_call:
        fail(errc::unknown_macro, "predicate '" + f->var + "' was not expanded");
      default: {
        Formula out = *f;
        if (f->child) out.child = walk(f->child);
        if (f->child2) out.child2 = walk(f->child2);
        return f_node(std::move(out));
      }
    }
  }

 private:
  struct Entry {
    std::string source;
    std::string effective;
    SortIdx sort;
    bool second_order;
  };

  bool shadowed(const std::string& name) const {
    for (const Entry& e : env_)
      if (e.source == name) return true;
    return false;
  }

  const Entry& resolve(const std::string& name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->source == name) return *it;
    fail(errc::unbound_variable, "variable '" + name + "' is not in scope");
  }

  const Entry& resolve_so(const std::string& name) const {
    const Entry& e = resolve(name);
    if (!e.second_order)
      fail(errc::unbound_variable, "'" + name + "' is first-order; membership needs a Set(...) variable");
    return e;
  }

  // Rebuilds the term with effective names and returns its sort.
  std::pair<Term, SortIdx> resolve_term(const Term& t) const {
    if (t.kind == Term::Kind::variable) {
      const Entry& e = resolve(t.head);
      if (e.second_order)
        fail(errc::unbound_variable, "'" + t.head + "' is second-order and cannot occur in a term");
      return {Term::var(e.effective), e.sort};
    }
    int f = sig_.find_function(t.head);
    if (f < 0) fail(errc::unbound_variable, "function '" + t.head + "' is not in the signature");
    const FunctionSymbol& fs = sig_.functions[f];
    if (fs.arg_sorts.size() != t.args.size())
      fail(errc::arity_mismatch, "'" + t.head + "' expects " + std::to_string(fs.arg_sorts.size()) +
                                     " arguments, got " + std::to_string(t.args.size()));
    Term out = Term::app(t.head);
    for (size_t i = 0; i < t.args.size(); ++i) {
      auto [arg, sort] = resolve_term(t.args[i]);
      if (sort != fs.arg_sorts[i])
        fail(errc::sort_mismatch, "argument " + std::to_string(i + 1) + " of '" + t.head +
                                      "' has sort '" + sig_.sorts[sort].name + "', expected '" +
                                      sig_.sorts[fs.arg_sorts[i]].name + "'");
      out.args.push_back(std::move(arg));
    }
    return {out, fs.result_sort};
  }

  const Signature& sig_;
  std::vector<Entry> env_;
  FreshNames fresh_;
};

}  // namespace detail

// Verifies binding and sorting and returns the annotated formula:
// equality nodes carry their sort, shadowing binders are renamed.
inline FormulaInContext scope_check(const FormulaInContext& fc, const Signature& sig) {
  validate_context(fc.ctx, sig);
  std::set<std::string> used;
  detail::collect_identifiers(*fc.body, used);
  for (const TypedVar& v : fc.ctx.fo) used.insert(v.name);
  for (const TypedVar& v : fc.ctx.so) used.insert(v.name);
  detail::ScopeChecker checker(sig, fc.ctx, std::move(used));
  return {fc.ctx, checker.walk(fc.body)};
}

}  // namespace cqtl
