#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cqtl/sigterm.hpp"

namespace cqtl {

// Positive-form syntax: negation is confined to the atom layer
// (truth, falsity, membership and nested negations); the composite
// layer adds connectives, both kinds of quantifier and the temporal
// operators.  eventually/always and the equality tests are sugar.
enum class FormulaKind {
  truth,
  falsity,
  membership,  // term in so-variable
  negation,    // atom layer only
  disjunction,
  conjunction,
  exists_fo,
  forall_fo,
  exists_so,
  forall_so,
  next,
  weak_next,
  until,
  weak_until,
  eventually,
  always,
  equal,
  not_equal,
  macro_call,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind = FormulaKind::truth;
  Term lhs_term;              // membership/equal/not_equal
  Term rhs_term;              // equal/not_equal
  std::string var;            // membership variable, binder, or macro name
  SortIdx sort = -1;          // binder sort; resolved sort of equal/not_equal
  FormulaPtr child;           // unary child or left operand
  FormulaPtr child2;          // right operand
  std::vector<Term> macro_args;
};

inline bool is_atom(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::truth:
    case FormulaKind::falsity:
    case FormulaKind::membership:
    case FormulaKind::negation:
      return true;
    default:
      return false;
  }
}

inline FormulaPtr f_node(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
inline FormulaPtr f_true() { return f_node({FormulaKind::truth}); }
inline FormulaPtr f_false() { return f_node({FormulaKind::falsity}); }
inline FormulaPtr f_mem(Term t, std::string so_var) {
  Formula f{FormulaKind::membership};
  f.lhs_term = std::move(t);
  f.var = std::move(so_var);
  return f_node(std::move(f));
}
inline FormulaPtr f_not(FormulaPtr a) {
  if (!is_atom(*a))
    fail(errc::negation_below_temporal,
         "negation is only allowed on atoms; use the dual operators (WX, W, !=) instead");
  Formula f{FormulaKind::negation};
  f.child = std::move(a);
  return f_node(std::move(f));
}
inline FormulaPtr f_binary(FormulaKind k, FormulaPtr a, FormulaPtr b) {
  Formula f{k};
  f.child = std::move(a);
  f.child2 = std::move(b);
  return f_node(std::move(f));
}
inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return f_binary(FormulaKind::conjunction, a, b); }
inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return f_binary(FormulaKind::disjunction, a, b); }
inline FormulaPtr f_until(FormulaPtr a, FormulaPtr b) { return f_binary(FormulaKind::until, a, b); }
inline FormulaPtr f_wuntil(FormulaPtr a, FormulaPtr b) { return f_binary(FormulaKind::weak_until, a, b); }
inline FormulaPtr f_unary(FormulaKind k, FormulaPtr a) {
  Formula f{k};
  f.child = std::move(a);
  return f_node(std::move(f));
}
inline FormulaPtr f_next(FormulaPtr a) { return f_unary(FormulaKind::next, a); }
inline FormulaPtr f_wnext(FormulaPtr a) { return f_unary(FormulaKind::weak_next, a); }
inline FormulaPtr f_eventually(FormulaPtr a) { return f_unary(FormulaKind::eventually, a); }
inline FormulaPtr f_always(FormulaPtr a) { return f_unary(FormulaKind::always, a); }
inline FormulaPtr f_quant(FormulaKind k, std::string var, SortIdx sort, FormulaPtr body) {
  Formula f{k};
  f.var = std::move(var);
  f.sort = sort;
  f.child = std::move(body);
  return f_node(std::move(f));
}
inline FormulaPtr f_eq(Term a, Term b, SortIdx sort = -1) {
  Formula f{FormulaKind::equal};
  f.lhs_term = std::move(a);
  f.rhs_term = std::move(b);
  f.sort = sort;
  return f_node(std::move(f));
}
inline FormulaPtr f_neq(Term a, Term b, SortIdx sort = -1) {
  Formula f{FormulaKind::not_equal};
  f.lhs_term = std::move(a);
  f.rhs_term = std::move(b);
  f.sort = sort;
  return f_node(std::move(f));
}
inline FormulaPtr f_macro(std::string name, std::vector<Term> args) {
  Formula f{FormulaKind::macro_call};
  f.var = std::move(name);
  f.macro_args = std::move(args);
  return f_node(std::move(f));
}

inline bool formulas_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.var != b.var || a.sort != b.sort) return false;
  if (a.lhs_term != b.lhs_term || a.rhs_term != b.rhs_term) return false;
  if (a.macro_args != b.macro_args) return false;
  auto eq_child = [](const FormulaPtr& x, const FormulaPtr& y) {
    if (!x != !y) return false;
    return !x || formulas_equal(*x, *y);
  };
  return eq_child(a.child, b.child) && eq_child(a.child2, b.child2);
}

namespace detail {

// Binding strength; quantifiers are weakest, unary operators tightest.
inline int precedence(FormulaKind k) {
  switch (k) {
    case FormulaKind::exists_fo:
    case FormulaKind::forall_fo:
    case FormulaKind::exists_so:
    case FormulaKind::forall_so:
      return 1;
    case FormulaKind::disjunction:
      return 2;
    case FormulaKind::conjunction:
      return 3;
    case FormulaKind::until:
    case FormulaKind::weak_until:
      return 4;
    default:
      return 5;
  }
}

inline void print_formula_rec(const Formula& f, const Signature& sig, int min_prec, std::string& out) {
  int prec = precedence(f.kind);
  bool parens = prec < min_prec;
  if (parens) out += "(";
  switch (f.kind) {
    case FormulaKind::truth: out += "true"; break;
    case FormulaKind::falsity: out += "false"; break;
    case FormulaKind::membership:
      out += print_term(f.lhs_term) + " in " + f.var;
      break;
    case FormulaKind::negation: {
      out += "not ";
      // atoms only; parenthesize everything but the constants for clarity
      if (f.child->kind == FormulaKind::truth || f.child->kind == FormulaKind::falsity) {
        print_formula_rec(*f.child, sig, 0, out);
      } else {
        out += "(";
        print_formula_rec(*f.child, sig, 0, out);
        out += ")";
      }
      break;
    }
    case FormulaKind::equal:
      out += print_term(f.lhs_term) + " = " + print_term(f.rhs_term);
      break;
    case FormulaKind::not_equal:
      out += print_term(f.lhs_term) + " != " + print_term(f.rhs_term);
      break;
    case FormulaKind::disjunction:
    case FormulaKind::conjunction: {
      const char* op = f.kind == FormulaKind::conjunction ? " & " : " | ";
      print_formula_rec(*f.child, sig, prec, out);
      out += op;
      print_formula_rec(*f.child2, sig, prec + 1, out);
      break;
    }
    case FormulaKind::until:
    case FormulaKind::weak_until: {
      print_formula_rec(*f.child, sig, prec + 1, out);
      out += f.kind == FormulaKind::until ? " U " : " W ";
      print_formula_rec(*f.child2, sig, prec, out);  // right-associative
      break;
    }
    case FormulaKind::next:
    case FormulaKind::weak_next:
      out += f.kind == FormulaKind::next ? "X[" : "WX[";
      print_formula_rec(*f.child, sig, 0, out);
      out += "]";
      break;
    case FormulaKind::eventually:
    case FormulaKind::always:
      out += f.kind == FormulaKind::eventually ? "<> " : "[] ";
      print_formula_rec(*f.child, sig, prec, out);
      break;
    case FormulaKind::exists_fo:
    case FormulaKind::forall_fo:
    case FormulaKind::exists_so:
    case FormulaKind::forall_so: {
      switch (f.kind) {
        case FormulaKind::exists_fo: out += "exists "; break;
        case FormulaKind::forall_fo: out += "forall "; break;
        case FormulaKind::exists_so: out += "existsS "; break;
        default: out += "forallS "; break;
      }
      out += f.var + ":" + (f.sort >= 0 ? sig.sorts[f.sort].name : "?") + ". ";
      print_formula_rec(*f.child, sig, prec, out);
      break;
    }
    case FormulaKind::macro_call: {
      out += f.var + "(";
      for (size_t i = 0; i < f.macro_args.size(); ++i) {
        if (i) out += ", ";
        out += print_term(f.macro_args[i]);
      }
      out += ")";
      break;
    }
  }
  if (parens) out += ")";
}

inline void collect_term_identifiers(const Term& t, std::set<std::string>& out) {
  out.insert(t.head);
  for (const Term& a : t.args) collect_term_identifiers(a, out);
}

inline void collect_identifiers(const Formula& f, std::set<std::string>& out) {
  if (!f.var.empty()) out.insert(f.var);
  if (!f.lhs_term.head.empty()) collect_term_identifiers(f.lhs_term, out);
  if (!f.rhs_term.head.empty()) collect_term_identifiers(f.rhs_term, out);
  for (const Term& a : f.macro_args) collect_term_identifiers(a, out);
  if (f.child) collect_identifiers(*f.child, out);
  if (f.child2) collect_identifiers(*f.child2, out);
}

class FreshNames {
 public:
  explicit FreshNames(std::set<std::string> used) : used_(std::move(used)) {}

  std::string make(const std::string& base) {
    if (used_.insert(base).second) return base;
    for (int i = 0;; ++i) {
      std::string candidate = base + std::to_string(i);
      if (used_.insert(candidate).second) return candidate;
    }
  }

 private:
  std::set<std::string> used_;
};

}  // namespace detail

inline std::string print_formula(const Formula& f, const Signature& sig) {
  std::string out;
  detail::print_formula_rec(f, sig, 0, out);
  return out;
}

struct DesugarOptions {
  // When set, the equality test is rewritten into its second-order
  // characterization as well; by default it stays primitive since the
  // expansion enumerates subsets.
  bool expand_equality = false;
};

namespace detail {

inline FormulaPtr desugar_rec(const FormulaPtr& f, const DesugarOptions& opt, FreshNames& fresh) {
  switch (f->kind) {
    case FormulaKind::truth:
    case FormulaKind::falsity:
    case FormulaKind::membership:
    case FormulaKind::negation:
      return f;
    case FormulaKind::eventually:
      return f_until(f_true(), desugar_rec(f->child, opt, fresh));
    case FormulaKind::always:
      return f_wuntil(desugar_rec(f->child, opt, fresh), f_false());
    case FormulaKind::not_equal: {
      // t1 != t2  ~>  existsS chi. t1 in chi & not (t2 in chi)
      std::string chi = fresh.make("chi");
      return f_quant(FormulaKind::exists_so, chi, f->sort,
                     f_and(f_mem(f->lhs_term, chi), f_not(f_mem(f->rhs_term, chi))));
    }
    case FormulaKind::equal: {
      if (!opt.expand_equality) return f;
      // t1 = t2  ~>  forallS chi. (t1 in chi & t2 in chi) | (not t1 in chi & not t2 in chi)
      std::string chi = fresh.make("chi");
      FormulaPtr both = f_and(f_mem(f->lhs_term, chi), f_mem(f->rhs_term, chi));
      FormulaPtr neither = f_and(f_not(f_mem(f->lhs_term, chi)), f_not(f_mem(f->rhs_term, chi)));
      return f_quant(FormulaKind::forall_so, chi, f->sort, f_or(both, neither));
    }
    case FormulaKind::macro_call:
      fail(errc::unknown_macro, "macro '" + f->var + "' must be expanded before desugaring");
    default: {
      Formula out = *f;
      if (f->child) out.child = desugar_rec(f->child, opt, fresh);
      if (f->child2) out.child2 = desugar_rec(f->child2, opt, fresh);
      return f_node(std::move(out));
    }
  }
}

}  // namespace detail

// Removes eventually/always/!= (and = in expansion mode).  Idempotent;
// the output keeps negation on atoms only.
inline FormulaPtr desugar(const FormulaPtr& f, DesugarOptions opt = {}) {
  std::set<std::string> used;
  detail::collect_identifiers(*f, used);
  detail::FreshNames fresh(std::move(used));
  return detail::desugar_rec(f, opt, fresh);
}

}  // namespace cqtl
