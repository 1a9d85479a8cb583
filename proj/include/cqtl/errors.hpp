#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqtl {

enum class errc {
  duplicate_sort,
  duplicate_function,
  unknown_sort_reference,
  unbound_variable,
  arity_mismatch,
  sort_mismatch,
  missing_binding,
  partial_table_entry,
  homomorphism_violation,
  dangling_world_ref,
  unknown_world,
  non_composable_path,
  syntax_error,
  negation_below_temporal,
  duplicate_binder,
  macro_arity_mismatch,
  unknown_macro,
  context_mismatch,
  state_space_cap,
  parse_error,
  validation_error,
  io_error,
};

inline std::string_view errc_name(errc c) {
  switch (c) {
    case errc::duplicate_sort: return "DuplicateSort";
    case errc::duplicate_function: return "DuplicateFunction";
    case errc::unknown_sort_reference: return "UnknownSortReference";
    case errc::unbound_variable: return "UnboundVariable";
    case errc::arity_mismatch: return "ArityMismatch";
    case errc::sort_mismatch: return "SortMismatch";
    case errc::missing_binding: return "MissingBinding";
    case errc::partial_table_entry: return "PartialTableEntry";
    case errc::homomorphism_violation: return "HomomorphismViolation";
    case errc::dangling_world_ref: return "DanglingWorldRef";
    case errc::unknown_world: return "UnknownWorld";
    case errc::non_composable_path: return "NonComposablePath";
    case errc::syntax_error: return "SyntaxError";
    case errc::negation_below_temporal: return "NegationBelowTemporal";
    case errc::duplicate_binder: return "DuplicateBinder";
    case errc::macro_arity_mismatch: return "MacroArityMismatch";
    case errc::unknown_macro: return "UnknownMacro";
    case errc::context_mismatch: return "ContextMismatch";
    case errc::state_space_cap: return "StateSpaceCap";
    case errc::parse_error: return "ParseError";
    case errc::validation_error: return "ValidationError";
    case errc::io_error: return "IoError";
  }
  return "Error";
}

// All library failures are reported through this type.  line/col are
// 1-based and present only for errors that originate from source text.
class Error : public std::runtime_error {
 public:
  Error(errc code, std::string message, int line = -1, int col = -1)
      : std::runtime_error(format(code, message, line, col)),
        code_(code),
        line_(line),
        col_(col) {}

  errc code() const { return code_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  static std::string format(errc code, const std::string& message, int line, int col) {
    std::string out(errc_name(code));
    if (line >= 0) {
      out += " at " + std::to_string(line) + ":" + std::to_string(col);
    }
    out += ": ";
    out += message;
    return out;
  }

  errc code_;
  int line_;
  int col_;
};

[[noreturn]] inline void fail(errc code, std::string message, int line = -1, int col = -1) {
  throw Error(code, std::move(message), line, col);
}

}  // namespace cqtl
