#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cqtl/errors.hpp"

namespace cqtl {

using SortIdx = int;

struct Sort {
  std::string name;
  bool operator==(const Sort&) const = default;
};

struct FunctionSymbol {
  std::string name;
  std::vector<SortIdx> arg_sorts;
  SortIdx result_sort = -1;
  bool operator==(const FunctionSymbol&) const = default;
};

struct Signature {
  std::vector<Sort> sorts;
  std::vector<FunctionSymbol> functions;

  bool operator==(const Signature&) const = default;

  SortIdx find_sort(std::string_view name) const {
    for (SortIdx i = 0; i < static_cast<SortIdx>(sorts.size()); ++i)
      if (sorts[i].name == name) return i;
    return -1;
  }

  SortIdx sort_index(std::string_view name) const {
    SortIdx i = find_sort(name);
    if (i < 0) fail(errc::unknown_sort_reference, "sort '" + std::string(name) + "' is not declared");
    return i;
  }

  int find_function(std::string_view name) const {
    for (int i = 0; i < static_cast<int>(functions.size()); ++i)
      if (functions[i].name == name) return i;
    return -1;
  }
};

// Checks name uniqueness and sort closure; returns its argument.
inline const Signature& validate_signature(const Signature& sig) {
  std::set<std::string> seen;
  for (const Sort& s : sig.sorts) {
    if (s.name.empty()) fail(errc::unknown_sort_reference, "empty sort name");
    if (!seen.insert(s.name).second)
      fail(errc::duplicate_sort, "sort '" + s.name + "' declared twice");
  }
  std::set<std::string> fn_seen;
  for (const FunctionSymbol& f : sig.functions) {
    if (!fn_seen.insert(f.name).second)
      fail(errc::duplicate_function, "function '" + f.name + "' declared twice");
    auto in_range = [&](SortIdx i) { return i >= 0 && i < static_cast<SortIdx>(sig.sorts.size()); };
    for (SortIdx a : f.arg_sorts)
      if (!in_range(a))
        fail(errc::unknown_sort_reference, "function '" + f.name + "' uses an undeclared argument sort");
    if (!in_range(f.result_sort))
      fail(errc::unknown_sort_reference, "function '" + f.name + "' uses an undeclared result sort");
  }
  return sig;
}

// Terms are variables or applications of signature symbols; there are
// no binders, so substitution never captures.
struct Term {
  enum class Kind { variable, application };
  Kind kind = Kind::variable;
  std::string head;
  std::vector<Term> args;

  bool operator==(const Term&) const = default;

  static Term var(std::string name) { return Term{Kind::variable, std::move(name), {}}; }
  static Term app(std::string fn, std::vector<Term> args = {}) {
    return Term{Kind::application, std::move(fn), std::move(args)};
  }
};

inline std::string print_term(const Term& t) {
  if (t.kind == Term::Kind::variable) return t.head;
  std::string out = t.head + "(";
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    out += print_term(t.args[i]);
  }
  return out + ")";
}

struct TypedVar {
  std::string name;
  SortIdx sort = -1;
  bool operator==(const TypedVar&) const = default;
  auto operator<=>(const TypedVar&) const = default;
};

// First-order context: ordered (variable, sort) pairs, names distinct.
using FoContext = std::vector<TypedVar>;
// Second-order context: each variable ranges over subsets of its sort.
using SoContext = std::vector<TypedVar>;

struct Context {
  FoContext fo;
  SoContext so;
  bool operator==(const Context&) const = default;
  auto operator<=>(const Context&) const = default;
};

inline int context_find(const std::vector<TypedVar>& ctx, std::string_view name) {
  for (int i = 0; i < static_cast<int>(ctx.size()); ++i)
    if (ctx[i].name == name) return i;
  return -1;
}

// Contexts whose objects the theory identifies up to renaming are
// compared positionally by their sort lists.
inline bool contexts_alpha_equivalent(const Context& a, const Context& b) {
  auto sorts = [](const std::vector<TypedVar>& v) {
    std::vector<SortIdx> out;
    out.reserve(v.size());
    for (const TypedVar& tv : v) out.push_back(tv.sort);
    return out;
  };
  return sorts(a.fo) == sorts(b.fo) && sorts(a.so) == sorts(b.so);
}

inline void validate_context(const Context& ctx, const Signature& sig) {
  std::set<std::string> names;
  auto check = [&](const std::vector<TypedVar>& vars, const char* kind) {
    for (const TypedVar& v : vars) {
      if (v.sort < 0 || v.sort >= static_cast<SortIdx>(sig.sorts.size()))
        fail(errc::unknown_sort_reference, std::string(kind) + " variable '" + v.name + "' has an undeclared sort");
      if (!names.insert(v.name).second)
        fail(errc::duplicate_binder, "variable '" + v.name + "' declared twice in the context");
    }
  };
  check(ctx.fo, "first-order");
  check(ctx.so, "second-order");
}

// Returns the unique sort derivable for t in ctx.
inline SortIdx typecheck_term(const Term& t, const FoContext& ctx, const Signature& sig) {
  if (t.kind == Term::Kind::variable) {
    int i = context_find(ctx, t.head);
    if (i < 0) fail(errc::unbound_variable, "variable '" + t.head + "' is not in the context");
    return ctx[i].sort;
  }
  int f = sig.find_function(t.head);
  if (f < 0) fail(errc::unbound_variable, "function '" + t.head + "' is not in the signature");
  const FunctionSymbol& fs = sig.functions[f];
  if (fs.arg_sorts.size() != t.args.size())
    fail(errc::arity_mismatch, "'" + t.head + "' expects " + std::to_string(fs.arg_sorts.size()) +
                                   " arguments, got " + std::to_string(t.args.size()));
  for (size_t i = 0; i < t.args.size(); ++i) {
    SortIdx got = typecheck_term(t.args[i], ctx, sig);
    if (got != fs.arg_sorts[i])
      fail(errc::sort_mismatch, "argument " + std::to_string(i + 1) + " of '" + t.head + "' has sort '" +
                                    sig.sorts[got].name + "', expected '" +
                                    sig.sorts[fs.arg_sorts[i]].name + "'");
  }
  return fs.result_sort;
}

// Replaces every variable of t by its image under subst.  Each
// replacement must typecheck in target_ctx at the variable's expected
// sort, which makes the result well-sorted by construction.
inline Term substitute(const Term& t, const std::map<std::string, Term>& subst,
                       const FoContext& target_ctx, const Signature& sig) {
  if (t.kind == Term::Kind::variable) {
    auto it = subst.find(t.head);
    if (it == subst.end())
      fail(errc::missing_binding, "no binding for variable '" + t.head + "'");
    typecheck_term(it->second, target_ctx, sig);
    return it->second;
  }
  Term out = Term::app(t.head);
  out.args.reserve(t.args.size());
  for (const Term& a : t.args) out.args.push_back(substitute(a, subst, target_ctx, sig));
  int f = sig.find_function(t.head);
  if (f >= 0) {
    const FunctionSymbol& fs = sig.functions[f];
    for (size_t i = 0; i < out.args.size() && i < fs.arg_sorts.size(); ++i) {
      SortIdx got = typecheck_term(out.args[i], target_ctx, sig);
      if (got != fs.arg_sorts[i])
        fail(errc::sort_mismatch, "substitution produced ill-sorted argument for '" + t.head + "'");
    }
  }
  return out;
}

}  // namespace cqtl
