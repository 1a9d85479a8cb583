#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "cqtl/formula.hpp"

namespace cqtl {
namespace detail {

enum class Tok {
  ident,
  kw_true,
  kw_false,
  kw_not,
  kw_exists,
  kw_forall,
  kw_exists_so,
  kw_forall_so,
  kw_in,
  kw_until,
  kw_weak_until,
  lparen,
  rparen,
  lbrack,
  rbrack,
  diamond,
  box,
  amp,
  pipe,
  dot,
  colon,
  comma,
  equal,
  not_equal,
  arrow,
  semicolon,
  lbrace,
  rbrace,
  end,
};

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int line = 1;
  int col = 1;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Shared by the formula and model-file grammars.  '#' starts a comment
// running to the end of the line.
class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { next(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    next();
    return t;
  }

  [[noreturn]] void error(const std::string& msg, const Token& at) const {
    fail(errc::syntax_error, msg, at.line, at.col);
  }

 private:
  void next() {
    skip_trivia();
    tok_.line = line_;
    tok_.col = col_;
    tok_.text.clear();
    if (pos_ >= text_.size()) {
      tok_.kind = Tok::end;
      return;
    }
    char c = text_[pos_];
    if (ident_start(c)) {
      size_t start = pos_;
      while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
      tok_.text = std::string(text_.substr(start, pos_ - start));
      if (tok_.text == "true") tok_.kind = Tok::kw_true;
      else if (tok_.text == "false") tok_.kind = Tok::kw_false;
      else if (tok_.text == "not") tok_.kind = Tok::kw_not;
      else if (tok_.text == "exists") tok_.kind = Tok::kw_exists;
      else if (tok_.text == "forall") tok_.kind = Tok::kw_forall;
      else if (tok_.text == "existsS") tok_.kind = Tok::kw_exists_so;
      else if (tok_.text == "forallS") tok_.kind = Tok::kw_forall_so;
      else if (tok_.text == "in") tok_.kind = Tok::kw_in;
      else if (tok_.text == "U") tok_.kind = Tok::kw_until;
      else if (tok_.text == "W") tok_.kind = Tok::kw_weak_until;
      else tok_.kind = Tok::ident;
      return;
    }
    advance();
    switch (c) {
      case '(': tok_.kind = Tok::lparen; return;
      case ')': tok_.kind = Tok::rparen; return;
      case ']': tok_.kind = Tok::rbrack; return;
      case '&': tok_.kind = Tok::amp; return;
      case '|': tok_.kind = Tok::pipe; return;
      case '.': tok_.kind = Tok::dot; return;
      case ':': tok_.kind = Tok::colon; return;
      case ',': tok_.kind = Tok::comma; return;
      case ';': tok_.kind = Tok::semicolon; return;
      case '{': tok_.kind = Tok::lbrace; return;
      case '}': tok_.kind = Tok::rbrace; return;
      case '=': tok_.kind = Tok::equal; return;
      case '[':
        if (pos_ < text_.size() && text_[pos_] == ']') {
          advance();
          tok_.kind = Tok::box;
        } else {
          tok_.kind = Tok::lbrack;
        }
        return;
      case '<':
        if (pos_ < text_.size() && text_[pos_] == '>') {
          advance();
          tok_.kind = Tok::diamond;
          return;
        }
        fail(errc::syntax_error, "stray '<'", tok_.line, tok_.col);
      case '!':
        if (pos_ < text_.size() && text_[pos_] == '=') {
          advance();
          tok_.kind = Tok::not_equal;
          return;
        }
        fail(errc::syntax_error, "stray '!' (negation is written 'not')", tok_.line, tok_.col);
      case '-':
        if (pos_ < text_.size() && text_[pos_] == '>') {
          advance();
          tok_.kind = Tok::arrow;
          return;
        }
        fail(errc::syntax_error, "stray '-'", tok_.line, tok_.col);
      default:
        fail(errc::syntax_error, std::string("unexpected character '") + c + "'", tok_.line, tok_.col);
    }
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Signature& sig) : lex_(text), sig_(sig) {}

  FormulaPtr parse() {
    FormulaPtr f = parse_formula();
    if (lex_.peek().kind != Tok::end)
      lex_.error("unexpected trailing input", lex_.peek());
    return f;
  }

 private:
  bool at_quantifier() const {
    Tok k = lex_.peek().kind;
    return k == Tok::kw_exists || k == Tok::kw_forall || k == Tok::kw_exists_so ||
           k == Tok::kw_forall_so;
  }

  FormulaPtr parse_formula() {
    if (at_quantifier()) return parse_quantified();
    return parse_disjunction();
  }

  FormulaPtr parse_quantified() {
    Token q = lex_.take();
    Token name = expect(Tok::ident, "expected a variable name after the quantifier");
    expect(Tok::colon, "expected ':' after the bound variable");
    Token sort_tok = expect(Tok::ident, "expected a sort name");
    SortIdx sort = sig_.find_sort(sort_tok.text);
    if (sort < 0)
      fail(errc::unknown_sort_reference, "sort '" + sort_tok.text + "' is not declared",
           sort_tok.line, sort_tok.col);
    expect(Tok::dot, "expected '.' after the binder");
    FormulaPtr body = parse_formula();
    FormulaKind k = q.kind == Tok::kw_exists      ? FormulaKind::exists_fo
                    : q.kind == Tok::kw_forall    ? FormulaKind::forall_fo
                    : q.kind == Tok::kw_exists_so ? FormulaKind::exists_so
                                                  : FormulaKind::forall_so;
    return f_quant(k, name.text, sort, body);
  }

  FormulaPtr parse_disjunction() {
    FormulaPtr f = parse_conjunction();
    while (lex_.peek().kind == Tok::pipe) {
      lex_.take();
      f = f_or(f, parse_conjunction());
    }
    return f;
  }

  FormulaPtr parse_conjunction() {
    FormulaPtr f = parse_until();
    while (lex_.peek().kind == Tok::amp) {
      lex_.take();
      f = f_and(f, parse_until());
    }
    return f;
  }

  FormulaPtr parse_until() {
    FormulaPtr f = parse_unary();
    if (lex_.peek().kind == Tok::kw_until) {
      lex_.take();
      return f_until(f, parse_until());
    }
    if (lex_.peek().kind == Tok::kw_weak_until) {
      lex_.take();
      return f_wuntil(f, parse_until());
    }
    return f;
  }

  FormulaPtr parse_unary() {
    const Token& t = lex_.peek();
    if (at_quantifier()) return parse_quantified();
    switch (t.kind) {
      case Tok::diamond:
        lex_.take();
        return f_eventually(parse_unary());
      case Tok::box:
        lex_.take();
        return f_always(parse_unary());
      case Tok::kw_not: {
        Token nt = lex_.take();
        FormulaPtr inner = parse_unary();
        if (!is_atom(*inner))
          fail(errc::negation_below_temporal,
               "'not' applies to atoms only; use WX/W/!= for the duals", nt.line, nt.col);
        return f_not(inner);
      }
      case Tok::ident:
        if (t.text == "X" || t.text == "WX") {
          // contextual: a next operator only when immediately bracketed
          Token op = lex_.take();
          if (lex_.peek().kind == Tok::lbrack) {
            lex_.take();
            FormulaPtr body = parse_formula();
            expect(Tok::rbrack, "expected ']' closing the next operator");
            return op.text == "X" ? f_next(body) : f_wnext(body);
          }
          return parse_term_atom(op);
        }
        return parse_term_atom(lex_.take());
      default:
        return parse_atom();
    }
  }

  FormulaPtr parse_atom() {
    Token t = lex_.take();
    switch (t.kind) {
      case Tok::kw_true: return f_true();
      case Tok::kw_false: return f_false();
      case Tok::lparen: {
        FormulaPtr f = parse_formula();
        expect(Tok::rparen, "expected ')'");
        return f;
      }
      case Tok::ident: return parse_term_atom(t);
      default:
        lex_.error("expected a formula", t);
    }
  }

  // An identifier begins either a term followed by a relational symbol
  // or a macro application standing alone as an atom.
  FormulaPtr parse_term_atom(Token head) {
    bool applied = false;
    std::vector<Term> args;
    if (lex_.peek().kind == Tok::lparen) {
      applied = true;
      lex_.take();
      if (lex_.peek().kind != Tok::rparen) {
        args.push_back(parse_term());
        while (lex_.peek().kind == Tok::comma) {
          lex_.take();
          args.push_back(parse_term());
        }
      }
      expect(Tok::rparen, "expected ')' closing the argument list");
    }
    Term lhs = applied ? Term::app(head.text, args) : Term::var(head.text);
    switch (lex_.peek().kind) {
      case Tok::kw_in: {
        lex_.take();
        Token var = expect(Tok::ident, "expected a second-order variable after 'in'");
        return f_mem(lhs, var.text);
      }
      case Tok::equal:
        lex_.take();
        return f_eq(lhs, parse_term());
      case Tok::not_equal:
        lex_.take();
        return f_neq(lhs, parse_term());
      default:
        if (applied && sig_.find_function(head.text) < 0)
          return f_macro(head.text, std::move(args));
        lex_.error("expected 'in', '=' or '!=' after the term", lex_.peek());
    }
  }

  Term parse_term() {
    Token head = expect(Tok::ident, "expected a term");
    if (lex_.peek().kind != Tok::lparen) return Term::var(head.text);
    lex_.take();
    std::vector<Term> args;
    if (lex_.peek().kind != Tok::rparen) {
      args.push_back(parse_term());
      while (lex_.peek().kind == Tok::comma) {
        lex_.take();
        args.push_back(parse_term());
      }
    }
    expect(Tok::rparen, "expected ')' closing the argument list");
    return Term::app(head.text, std::move(args));
  }

  Token expect(Tok kind, const std::string& msg) {
    if (lex_.peek().kind != kind) lex_.error(msg, lex_.peek());
    return lex_.take();
  }

  Lexer lex_;
  const Signature& sig_;
};

}  // namespace detail

inline FormulaPtr parse_formula(std::string_view text, const Signature& sig) {
  return detail::FormulaParser(text, sig).parse();
}

// Context syntax: "x: edge, N: Set(node)" — Set(...) marks a variable
// ranging over subsets.  Declaration order is preserved per kind.
inline Context parse_context(std::string_view text, const Signature& sig) {
  detail::Lexer lex(text);
  Context ctx;
  if (lex.peek().kind == detail::Tok::end) return ctx;
  for (;;) {
    detail::Token name = lex.take();
    if (name.kind != detail::Tok::ident) lex.error("expected a variable name", name);
    detail::Token colon = lex.take();
    if (colon.kind != detail::Tok::colon) lex.error("expected ':' after the variable name", colon);
    detail::Token sort_tok = lex.take();
    if (sort_tok.kind != detail::Tok::ident) lex.error("expected a sort name", sort_tok);
    bool second_order = false;
    if (sort_tok.text == "Set" && lex.peek().kind == detail::Tok::lparen) {
      second_order = true;
      lex.take();
      sort_tok = lex.take();
      if (sort_tok.kind != detail::Tok::ident) lex.error("expected a sort name inside Set(...)", sort_tok);
      detail::Token close = lex.take();
      if (close.kind != detail::Tok::rparen) lex.error("expected ')' closing Set(...)", close);
    }
    SortIdx sort = sig.find_sort(sort_tok.text);
    if (sort < 0)
      fail(errc::unknown_sort_reference, "sort '" + sort_tok.text + "' is not declared",
           sort_tok.line, sort_tok.col);
    if (second_order)
      ctx.so.push_back({name.text, sort});
    else
      ctx.fo.push_back({name.text, sort});
    if (lex.peek().kind == detail::Tok::end) break;
    detail::Token comma = lex.take();
    if (comma.kind != detail::Tok::comma) lex.error("expected ',' between context entries", comma);
  }
  validate_context(ctx, sig);
  return ctx;
}

inline std::string print_context(const Context& ctx, const Signature& sig) {
  std::string out;
  bool first = true;
  for (const TypedVar& v : ctx.fo) {
    if (!first) out += ", ";
    first = false;
    out += v.name + ":" + sig.sorts[v.sort].name;
  }
  for (const TypedVar& v : ctx.so) {
    if (!first) out += ", ";
    first = false;
    out += v.name + ":Set(" + sig.sorts[v.sort].name + ")";
  }
  return out;
}

}  // namespace cqtl
