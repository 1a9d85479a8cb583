#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cqtl/model.hpp"
#include "cqtl/parser.hpp"

namespace cqtl {
namespace detail {

// Text format: one signature block, then world and transition blocks.
// Elements are bare names scoped to their world; a transition line
// lists only the mapped elements, everything else is outside the
// partial map's domain.
class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : lex_(text) {}

  CounterpartModel parse() {
    Token t = expect_ident("expected 'signature'");
    if (t.text != "signature") lex_.error("the file must start with a signature block", t);
    parse_signature();
    while (lex_.peek().kind != Tok::end) {
      Token kw = expect_ident("expected 'world' or 'transition'");
      if (kw.text == "world") parse_world();
      else if (kw.text == "transition") parse_transition();
      else lex_.error("expected 'world' or 'transition'", kw);
    }
    validate_model(m_);
    return std::move(m_);
  }

 private:
  void parse_signature() {
    expect(Tok::lbrace, "expected '{'");
    while (lex_.peek().kind != Tok::rbrace) {
      Token kw = expect_ident("expected 'sort' or 'fn'");
      if (kw.text == "sort") {
        Token name = expect_ident("expected a sort name");
        if (m_.sig.find_sort(name.text) >= 0)
          fail(errc::duplicate_sort, "sort '" + name.text + "' declared twice", name.line, name.col);
        m_.sig.sorts.push_back({name.text});
      } else if (kw.text == "fn") {
        Token name = expect_ident("expected a function name");
        expect(Tok::colon, "expected ':'");
        FunctionSymbol fs;
        fs.name = name.text;
        if (lex_.peek().kind == Tok::ident) {
          fs.arg_sorts.push_back(sort_of(lex_.take()));
          while (lex_.peek().kind == Tok::comma) {
            lex_.take();
            fs.arg_sorts.push_back(sort_of(expect_ident("expected a sort name")));
          }
        }
        expect(Tok::arrow, "expected '->'");
        fs.result_sort = sort_of(expect_ident("expected a result sort"));
        if (m_.sig.find_function(fs.name) >= 0)
          fail(errc::duplicate_function, "function '" + fs.name + "' declared twice", name.line, name.col);
        m_.sig.functions.push_back(std::move(fs));
      } else {
        lex_.error("expected 'sort' or 'fn'", kw);
      }
      expect(Tok::semicolon, "expected ';'");
    }
    lex_.take();
    validate_signature(m_.sig);
  }

  void parse_world() {
    Token name = expect_ident("expected a world name");
    if (m_.find_world(name.text) >= 0)
      fail(errc::validation_error, "world '" + name.text + "' declared twice", name.line, name.col);
    WorldAlgebra w;
    w.id = name.text;
    w.carriers.resize(m_.sig.sorts.size());
    expect(Tok::lbrace, "expected '{'");
    struct TableLine {
      Token fn;
      std::vector<Token> args;
      Token result;
    };
    std::vector<TableLine> entries;
    std::vector<bool> carrier_seen(m_.sig.sorts.size(), false);
    while (lex_.peek().kind != Tok::rbrace) {
      Token head = expect_ident("expected a sort or function line");
      if (lex_.peek().kind == Tok::colon) {
        lex_.take();
        SortIdx s = sort_of(head);
        if (carrier_seen[s])
          fail(errc::parse_error, "carrier of '" + head.text + "' listed twice", head.line, head.col);
        carrier_seen[s] = true;
        while (lex_.peek().kind == Tok::ident) {
          w.carriers[s].push_back(lex_.take().text);
          if (lex_.peek().kind != Tok::comma) break;
          lex_.take();
        }
      } else if (lex_.peek().kind == Tok::lparen) {
        lex_.take();
        TableLine line;
        line.fn = head;
        if (lex_.peek().kind == Tok::ident) {
          line.args.push_back(lex_.take());
          while (lex_.peek().kind == Tok::comma) {
            lex_.take();
            line.args.push_back(expect_ident("expected an element name"));
          }
        }
        expect(Tok::rparen, "expected ')'");
        expect(Tok::equal, "expected '='");
        line.result = expect_ident("expected an element name");
        entries.push_back(std::move(line));
      } else {
        lex_.error("expected ':' (carrier) or '(' (table entry)", lex_.peek());
      }
      expect(Tok::semicolon, "expected ';'");
    }
    lex_.take();
    // carriers are complete; size the tables and fill them in
    w.tables.resize(m_.sig.functions.size());
    for (size_t f = 0; f < m_.sig.functions.size(); ++f)
      w.tables[f].assign(table_size(w, m_.sig.functions[f]), -1);
    for (const TableLine& line : entries) {
      int f = m_.sig.find_function(line.fn.text);
      if (f < 0)
        fail(errc::unknown_sort_reference, "function '" + line.fn.text + "' is not declared",
             line.fn.line, line.fn.col);
      const FunctionSymbol& fs = m_.sig.functions[f];
      if (line.args.size() != fs.arg_sorts.size())
        fail(errc::arity_mismatch, "'" + fs.name + "' expects " + std::to_string(fs.arg_sorts.size()) +
                                       " arguments", line.fn.line, line.fn.col);
      std::vector<ElemIdx> args(line.args.size());
      for (size_t i = 0; i < line.args.size(); ++i)
        args[i] = element_of(w, fs.arg_sorts[i], line.args[i]);
      ElemIdx result = element_of(w, fs.result_sort, line.result);
      ElemIdx& cell = w.tables[f][table_index(w, fs, args)];
      if (cell >= 0)
        fail(errc::parse_error, "table entry for '" + fs.name + "' given twice", line.fn.line, line.fn.col);
      cell = result;
    }
    m_.worlds.push_back(std::move(w));
  }

  void parse_transition() {
    Token name = expect_ident("expected a transition name");
    if (m_.find_transition(name.text) >= 0)
      fail(errc::validation_error, "transition '" + name.text + "' declared twice", name.line, name.col);
    expect(Tok::colon, "expected ':'");
    Token src = expect_ident("expected the source world");
    expect(Tok::arrow, "expected '->'");
    Token tgt = expect_ident("expected the target world");
    Transition t;
    t.id = name.text;
    t.source = world_of(src);
    t.target = world_of(tgt);
    const WorldAlgebra& sw = m_.worlds[t.source];
    const WorldAlgebra& tw = m_.worlds[t.target];
    t.maps.resize(m_.sig.sorts.size());
    for (SortIdx s = 0; s < static_cast<SortIdx>(m_.sig.sorts.size()); ++s)
      t.maps[s].assign(sw.carriers[s].size(), -1);
    expect(Tok::lbrace, "expected '{'");
    while (lex_.peek().kind != Tok::rbrace) {
      Token sort_tok = expect_ident("expected a sort name");
      SortIdx s = sort_of(sort_tok);
      expect(Tok::colon, "expected ':'");
      while (lex_.peek().kind == Tok::ident) {
        Token from = lex_.take();
        expect(Tok::arrow, "expected '->'");
        Token to = expect_ident("expected an element name");
        ElemIdx fi = element_of(sw, s, from);
        ElemIdx ti = element_of(tw, s, to);
        if (t.maps[s][fi] >= 0)
          fail(errc::parse_error, "element '" + from.text + "' mapped twice", from.line, from.col);
        t.maps[s][fi] = ti;
        if (lex_.peek().kind != Tok::comma) break;
        lex_.take();
      }
      expect(Tok::semicolon, "expected ';'");
    }
    lex_.take();
    m_.transitions.push_back(std::move(t));
  }

  SortIdx sort_of(const Token& t) {
    SortIdx s = m_.sig.find_sort(t.text);
    if (s < 0) fail(errc::unknown_sort_reference, "sort '" + t.text + "' is not declared", t.line, t.col);
    return s;
  }

  WorldIdx world_of(const Token& t) {
    WorldIdx w = m_.find_world(t.text);
    if (w < 0) fail(errc::dangling_world_ref, "world '" + t.text + "' is not declared", t.line, t.col);
    return w;
  }

  ElemIdx element_of(const WorldAlgebra& w, SortIdx s, const Token& t) {
    ElemIdx e = w.find_element(s, t.text);
    if (e < 0)
      fail(errc::parse_error, "element '" + t.text + "' is not in " + w.id + "/" + m_.sig.sorts[s].name,
           t.line, t.col);
    return e;
  }

  Token expect(Tok kind, const std::string& msg) {
    if (lex_.peek().kind != kind) lex_.error(msg, lex_.peek());
    return lex_.take();
  }

  Token expect_ident(const std::string& msg) { return expect(Tok::ident, msg); }

  Lexer lex_;
  CounterpartModel m_;
};

}  // namespace detail

inline CounterpartModel parse_model(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
    fail(errc::parse_error, "empty model file");
  try {
    return detail::ModelParser(text).parse();
  } catch (const Error& e) {
    if (e.code() == errc::syntax_error) throw Error(errc::parse_error, e.what());
    throw;
  }
}

inline CounterpartModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

inline std::string print_model(const CounterpartModel& m) {
  std::string out = "signature {\n";
  for (const Sort& s : m.sig.sorts) out += "  sort " + s.name + ";\n";
  for (const FunctionSymbol& f : m.sig.functions) {
    out += "  fn " + f.name + " : ";
    for (size_t i = 0; i < f.arg_sorts.size(); ++i) {
      if (i) out += ", ";
      out += m.sig.sorts[f.arg_sorts[i]].name;
    }
    out += f.arg_sorts.empty() ? "-> " : " -> ";
    out += m.sig.sorts[f.result_sort].name + ";\n";
  }
  out += "}\n";
  for (const WorldAlgebra& w : m.worlds) {
    out += "\nworld " + w.id + " {\n";
    for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s) {
      if (w.carriers[s].empty()) continue;
      out += "  " + m.sig.sorts[s].name + ": ";
      for (size_t i = 0; i < w.carriers[s].size(); ++i) {
        if (i) out += ", ";
        out += w.carriers[s][i];
      }
      out += ";\n";
    }
    for (size_t f = 0; f < m.sig.functions.size(); ++f) {
      const FunctionSymbol& fs = m.sig.functions[f];
      std::vector<ElemIdx> tuple(fs.arg_sorts.size(), 0);
      size_t total = w.tables[f].size();
      for (size_t flat = 0; flat < total; ++flat) {
        size_t rest = flat;
        for (size_t i = fs.arg_sorts.size(); i-- > 0;) {
          int size = w.carrier_size(fs.arg_sorts[i]);
          tuple[i] = static_cast<ElemIdx>(rest % static_cast<size_t>(size));
          rest /= static_cast<size_t>(size);
        }
        out += "  " + fs.name + "(";
        for (size_t i = 0; i < tuple.size(); ++i) {
          if (i) out += ", ";
          out += w.carriers[fs.arg_sorts[i]][tuple[i]];
        }
        out += ") = " + w.carriers[fs.result_sort][w.tables[f][flat]] + ";\n";
      }
    }
    out += "}\n";
  }
  for (const Transition& t : m.transitions) {
    out += "\ntransition " + t.id + " : " + m.worlds[t.source].id + " -> " + m.worlds[t.target].id +
           " {\n";
    for (SortIdx s = 0; s < static_cast<SortIdx>(m.sig.sorts.size()); ++s) {
      bool any = false;
      for (ElemIdx v : t.maps[s]) any = any || v >= 0;
      if (!any) continue;
      out += "  " + m.sig.sorts[s].name + ": ";
      bool first = true;
      for (ElemIdx i = 0; i < static_cast<ElemIdx>(t.maps[s].size()); ++i) {
        if (t.maps[s][i] < 0) continue;
        if (!first) out += ", ";
        first = false;
        out += m.worlds[t.source].carriers[s][i] + " -> " + m.worlds[t.target].carriers[s][t.maps[s][i]];
      }
      out += ";\n";
    }
    out += "}\n";
  }
  return out;
}

}  // namespace cqtl
