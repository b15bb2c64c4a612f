#include "topmil/problem_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "topmil/learners.hpp"

namespace topmil {

ParseError::ParseError(std::size_t line, std::size_t column, std::set<std::string> expected,
                       const std::string& message)
    : std::runtime_error([&] {
        std::string s = "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
        if (!expected.empty()) {
          s += " (expected";
          bool first = true;
          for (const std::string& e : expected) {
            s += (first ? " " : ", ") + e;
            first = false;
          }
          s += ")";
        }
        return s;
      }()),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { Atom, Var, Int, LParen, RParen, LBrack, RBrack, Comma, Bar, End, Neck, Colon, Slash, Eof };

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Atom: return "atom";
    case Tok::Var: return "variable";
    case Tok::Int: return "integer";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::Comma: return "','";
    case Tok::Bar: return "'|'";
    case Tok::End: return "'.'";
    case Tok::Neck: return "':-'";
    case Tok::Colon: return "':'";
    case Tok::Slash: return "'/'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  bool quoted = false;
  std::size_t line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto is_ident = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };
    auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident(src_[pos_])) advance();
      t.text = std::string(src_.substr(start, pos_ - start));
      t.kind = (std::isupper(uc) || c == '_') ? Tok::Var : Tok::Atom;
      return t;
    }
    if (std::isdigit(uc) || (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t start = pos_;
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      t.text = std::string(src_.substr(start, pos_ - start));
      t.kind = Tok::Int;
      return t;
    }
    if (c == '\'') {
      advance();
      while (true) {
        if (pos_ >= src_.size()) throw ParseError(t.line, t.column, {}, "unterminated quoted atom");
        char d = src_[pos_];
        if (d == '\\') {
          advance();
          if (pos_ >= src_.size()) throw ParseError(t.line, t.column, {}, "unterminated quoted atom");
          t.text += src_[pos_];
          advance();
        } else if (d == '\'') {
          advance();
          if (pos_ < src_.size() && src_[pos_] == '\'') {
            t.text += '\'';
            advance();
          } else {
            break;
          }
        } else if (d == '\n') {
          throw ParseError(t.line, t.column, {}, "newline in quoted atom");
        } else {
          t.text += d;
          advance();
        }
      }
      if (t.text.empty()) throw ParseError(t.line, t.column, {}, "empty quoted atom");
      t.kind = Tok::Atom;
      t.quoted = true;
      return t;
    }
    advance();
    switch (c) {
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      case '[': t.kind = Tok::LBrack; return t;
      case ']': t.kind = Tok::RBrack; return t;
      case ',': t.kind = Tok::Comma; return t;
      case '|': t.kind = Tok::Bar; return t;
      case '.': t.kind = Tok::End; return t;
      case '/': t.kind = Tok::Slash; return t;
      case ':':
        if (pos_ < src_.size() && src_[pos_] == '-') {
          advance();
          t.kind = Tok::Neck;
        } else {
          t.kind = Tok::Colon;
        }
        return t;
      default:
        break;
    }
    std::string shown = std::isprint(uc) ? std::string(1, c) : "byte " + std::to_string(uc);
    throw ParseError(t.line, t.column, {}, "unexpected character " + shown);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

constexpr int kMaxNesting = 500;

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  bool at(Tok k) const { return tok_.kind == k; }
  const Token& peek() const { return tok_; }

  Token take() {
    Token t = std::move(tok_);
    tok_ = lex_.next();
    return t;
  }

  [[noreturn]] void fail(std::set<std::string> expected, const std::string& message = "") const {
    std::string msg = message.empty() ? "unexpected " + std::string(tok_name(tok_.kind)) +
                                            (tok_.text.empty() ? "" : " '" + tok_.text + "'")
                                      : message;
    throw ParseError(tok_.line, tok_.column, std::move(expected), msg);
  }

  Token expect(Tok k) {
    if (!at(k)) fail({tok_name(k)});
    return take();
  }

  void new_clause() {
    anon_ = 0;
  }

  // In metarule mode every identifier is a symbol and predicates may be
  // written with capitals.
  Term term(bool meta, int depth = 0) {
    Term t = primary(meta, depth);
    while (at(Tok::Slash)) {
      take();
      Term r = primary(meta, depth);
      t = Term::compound("/", {t, r});
    }
    return t;
  }

  Literal literal(bool meta) {
    if (!at(Tok::Atom) && !(meta && at(Tok::Var))) fail({meta ? "predicate" : "atom"});
    Token name = take();
    std::vector<Term> args;
    if (at(Tok::LParen)) {
      take();
      args = arguments(meta, 0);
      expect(Tok::RParen);
    }
    return Literal(Symbol(name.text), std::move(args));
  }

  Clause clause(bool meta) {
    new_clause();
    Clause c(literal(meta));
    if (at(Tok::Neck)) {
      take();
      c.body.push_back(literal(meta));
      while (at(Tok::Comma)) {
        take();
        c.body.push_back(literal(meta));
      }
    }
    return c;
  }

  void end_statement(std::set<std::string> expected) {
    if (!at(Tok::End)) {
      expected.insert("'.'");
      fail(std::move(expected));
    }
    take();
  }

 private:
  std::vector<Term> arguments(bool meta, int depth) {
    std::vector<Term> args;
    args.push_back(term(meta, depth + 1));
    while (at(Tok::Comma)) {
      take();
      args.push_back(term(meta, depth + 1));
    }
    if (!at(Tok::RParen)) fail({"','", "')'", "'/'"});
    return args;
  }

  Term primary(bool meta, int depth) {
    if (depth > kMaxNesting) fail({}, "term nested too deeply");
    switch (tok_.kind) {
      case Tok::Var: {
        Token t = take();
        if (t.text == "_" && !meta) return Term::var("_G" + std::to_string(anon_++));
        return Term::var(t.text);
      }
      case Tok::Int: {
        Token t = take();
        if (meta) throw ParseError(t.line, t.column, {}, "constant in metarule");
        long long v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec == std::errc() && p == t.text.data() + t.text.size()) return Term::integer(v);
        return Term::constant(t.text);
      }
      case Tok::Atom: {
        Token t = take();
        if (at(Tok::LParen)) {
          take();
          std::vector<Term> args = arguments(meta, depth);
          expect(Tok::RParen);
          return Term::compound(Symbol(t.text), std::move(args));
        }
        if (meta) return Term::var(t.text);
        return Term::constant(t.text);
      }
      case Tok::LBrack: {
        take();
        if (at(Tok::RBrack)) {
          take();
          return Term::constant(nil_symbol());
        }
        std::vector<Term> items{term(meta, depth + 1)};
        while (at(Tok::Comma)) {
          take();
          items.push_back(term(meta, depth + 1));
        }
        std::optional<Term> tail;
        if (at(Tok::Bar)) {
          take();
          tail = term(meta, depth + 1);
        }
        if (!at(Tok::RBrack)) fail({"','", "'|'", "']'", "'/'"});
        take();
        return make_list(items, tail);
      }
      case Tok::LParen: {
        take();
        Term t = term(meta, depth + 1);
        expect(Tok::RParen);
        return t;
      }
      default:
        fail({"term"});
    }
  }

  Lexer lex_;
  Token tok_;
  int anon_ = 0;
};

void collect_pattern_symbols(const Term& t, std::vector<Symbol>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  for (const Term& a : t.args()) collect_pattern_symbols(a, out);
}

// After the `metarule` keyword.
Metarule metarule_body(Parser& p, std::size_t line, std::size_t column) {
  Metarule m;
  if (!p.at(Tok::Atom)) p.fail({"metarule name"});
  m.name = Symbol(p.take().text);
  p.expect(Tok::Colon);
  p.expect(Tok::LParen);
  Clause c = p.clause(true);
  if (!p.at(Tok::RParen)) p.fail({"','", "':-'", "')'"});
  p.take();
  std::vector<Symbol> exists;
  if (p.at(Tok::Atom) && p.peek().text == "exists") {
    p.take();
    p.expect(Tok::LBrack);
    if (!p.at(Tok::RBrack)) {
      while (true) {
        if (!p.at(Tok::Atom) && !p.at(Tok::Var)) p.fail({"identifier"});
        exists.emplace_back(p.take().text);
        if (p.at(Tok::RBrack)) break;
        if (!p.at(Tok::Comma)) p.fail({"','", "']'"});
        p.take();
      }
    }
    p.take();
  }
  m.head = c.head;
  m.body = c.body;
  auto add_so = [&](Symbol s) {
    if (std::find(m.second_order.begin(), m.second_order.end(), s) == m.second_order.end()) {
      m.second_order.push_back(s);
    }
  };
  add_so(m.head.predicate);
  for (const Literal& l : m.body) add_so(l.predicate);
  std::vector<Symbol> args;
  for (const Term& t : m.head.args) collect_pattern_symbols(t, args);
  for (const Literal& l : m.body) {
    for (const Term& t : l.args) collect_pattern_symbols(t, args);
  }
  for (Symbol s : exists) {
    bool is_so = std::find(m.second_order.begin(), m.second_order.end(), s) != m.second_order.end();
    bool is_arg = std::find(args.begin(), args.end(), s) != args.end();
    if (!is_so && !is_arg) throw ParseError(line, column, {}, "existential " + s.str() + " does not occur");
    if (is_arg && std::find(m.first_order.begin(), m.first_order.end(), s) == m.first_order.end()) {
      m.first_order.push_back(s);
    }
  }
  for (Symbol s : args) {
    if (std::find(m.first_order.begin(), m.first_order.end(), s) == m.first_order.end()) m.universal.push_back(s);
  }
  try {
    validate(m);
  } catch (const MetaruleError& e) {
    throw ParseError(line, column, {}, e.what());
  }
  return m;
}

enum class Section { None, Pos, Neg, Bk, Support, Builtins, Metarules };

Literal ground_example(const Clause& c, const Token& at) {
  if (!c.body.empty()) throw ParseError(at.line, at.column, {}, "examples must be atoms");
  if (!c.head.ground()) throw ParseError(at.line, at.column, {}, "examples must be ground");
  return c.head;
}

}  // namespace

MILProblem parse_problem(std::string_view text) {
  static const std::vector<std::pair<std::string, Section>> names = {
      {"pos", Section::Pos},         {"neg", Section::Neg},           {"bk", Section::Bk},
      {"support", Section::Support}, {"builtins", Section::Builtins}, {"metarules", Section::Metarules}};
  Parser p(text);
  MILProblem out;
  Section section = Section::None;
  std::set<Section> seen;
  while (!p.at(Tok::Eof)) {
    Token start = p.peek();
    if (p.at(Tok::Neck)) {
      p.take();
      if (!p.at(Tok::Atom)) p.fail({"section name"});
      Token name = p.take();
      auto it = std::find_if(names.begin(), names.end(), [&](const auto& n) { return n.first == name.text; });
      if (it == names.end()) {
        throw ParseError(name.line, name.column, {"pos", "neg", "bk", "support", "builtins", "metarules"},
                         "unknown section '" + name.text + "'");
      }
      if (!seen.insert(it->second).second) {
        throw ParseError(name.line, name.column, {}, "duplicate section '" + name.text + "'");
      }
      section = it->second;
      p.end_statement({});
      continue;
    }
    switch (section) {
      case Section::None:
        p.fail({"':-'"}, "item outside any section");
      case Section::Pos:
      case Section::Neg: {
        Clause c = p.clause(false);
        p.end_statement({"','", "':-'"});
        (section == Section::Pos ? out.positive : out.negative).push_back(ground_example(c, start));
        break;
      }
      case Section::Bk:
      case Section::Support: {
        Clause c = p.clause(false);
        p.end_statement({"','", "':-'"});
        (section == Section::Bk ? out.background : out.support).push_back(std::move(c));
        break;
      }
      case Section::Builtins: {
        Term t = p.term(false);
        p.end_statement({"'/'"});
        long long arity = 0;
        if (!t.is_compound() || t.name().str() != "/" || !t.args()[0].is_constant() ||
            !t.args()[1].integer_value(arity) || arity < 0) {
          throw ParseError(start.line, start.column, {"name/arity"}, "malformed built-in");
        }
        PredicateKey key{t.args()[0].name(), static_cast<std::uint32_t>(arity)};
        if (!BuiltinSet::is_known(key)) {
          throw ParseError(start.line, start.column, {}, "unknown built-in " + to_string(t));
        }
        out.builtins.enable(key);
        break;
      }
      case Section::Metarules: {
        if (!p.at(Tok::Atom)) p.fail({"metarule", "catalog name"});
        Token name = p.take();
        if (name.text == "metarule" && !name.quoted && p.at(Tok::Atom)) {
          out.metarules.push_back(metarule_body(p, name.line, name.column));
          p.end_statement({"exists"});
        } else {
          p.end_statement({});
          const Metarule* m = find_catalog(name.text);
          if (!m) throw ParseError(name.line, name.column, {}, "unknown catalog metarule '" + name.text + "'");
          out.metarules.push_back(*m);
        }
        break;
      }
    }
  }
  return out;
}

MILProblem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

Program parse_program(std::string_view text) {
  Parser p(text);
  Program out;
  while (!p.at(Tok::Eof)) {
    out.push_back(p.clause(false));
    p.end_statement({"','", "':-'"});
  }
  return out;
}

Clause parse_clause(std::string_view text) {
  Parser p(text);
  Clause c = p.clause(false);
  if (p.at(Tok::End)) p.take();
  if (!p.at(Tok::Eof)) p.fail({"end of input"});
  return c;
}

Literal parse_literal(std::string_view text) {
  Parser p(text);
  Literal l = p.literal(false);
  if (p.at(Tok::End)) p.take();
  if (!p.at(Tok::Eof)) p.fail({"end of input"});
  return l;
}

Metarule parse_metarule(std::string_view text) {
  Parser p(text);
  if (p.at(Tok::Atom) && p.peek().text == "metarule") {
    Token kw = p.take();
    Metarule m = metarule_body(p, kw.line, kw.column);
    if (p.at(Tok::End)) p.take();
    if (!p.at(Tok::Eof)) p.fail({"end of input"});
    return m;
  }
  if (!p.at(Tok::Atom)) p.fail({"metarule", "catalog name"});
  Token name = p.take();
  const Metarule* m = find_catalog(name.text);
  if (!m) throw ParseError(name.line, name.column, {}, "unknown catalog metarule '" + name.text + "'");
  return *m;
}

namespace {

void write_pattern_term(const Term& t, std::string& out) {
  if (t.is_var()) {
    out += t.name().str();
    return;
  }
  if (t.is_compound() && t.name().str() == "/" && t.arity() == 2) {
    write_pattern_term(t.args()[0], out);
    out += '/';
    bool paren = t.args()[1].is_compound() && t.args()[1].name().str() == "/";
    if (paren) out += '(';
    write_pattern_term(t.args()[1], out);
    if (paren) out += ')';
    return;
  }
  out += quote_atom_if_needed(t.name().str());
  if (t.is_compound()) {
    out += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
      if (i) out += ',';
      write_pattern_term(t.args()[i], out);
    }
    out += ')';
  }
}

void write_pattern(const Literal& l, std::string& out) {
  out += l.predicate.str();
  if (l.args.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < l.args.size(); ++i) {
    if (i) out += ',';
    write_pattern_term(l.args[i], out);
  }
  out += ')';
}

void write_clauses(const Program& p, std::string& out) {
  for (const Clause& c : p) out += to_string(display_rename(c)) + "\n";
}

}  // namespace

std::string serialize_metarule(const Metarule& m) {
  if (const Metarule* known = find_catalog(m.name.str()); known && same_metarule(*known, m) &&
      known->second_order == m.second_order && known->first_order == m.first_order &&
      known->universal == m.universal && known->head == m.head && known->body == m.body) {
    return m.name.str() + ".";
  }
  std::string out = "metarule " + quote_atom_if_needed(m.name.str()) + ": (";
  write_pattern(m.head, out);
  for (std::size_t i = 0; i < m.body.size(); ++i) {
    out += i == 0 ? " :- " : ", ";
    write_pattern(m.body[i], out);
  }
  out += ") exists [";
  bool first = true;
  for (Symbol s : m.second_order) {
    out += (first ? "" : ",") + s.str();
    first = false;
  }
  for (Symbol s : m.first_order) {
    out += (first ? "" : ",") + s.str();
    first = false;
  }
  return out + "].";
}

std::string serialize_problem(const MILProblem& p) {
  std::string out = "% MIL problem\n";
  out += "\n:- pos.\n";
  for (const Literal& l : p.positive) out += to_string(l) + ".\n";
  out += "\n:- neg.\n";
  for (const Literal& l : p.negative) out += to_string(l) + ".\n";
  out += "\n:- bk.\n";
  write_clauses(p.background, out);
  if (!p.support.empty()) {
    out += "\n:- support.\n";
    write_clauses(p.support, out);
  }
  if (!p.builtins.empty()) {
    out += "\n:- builtins.\n";
    for (const PredicateKey& k : p.builtins.keys()) {
      out += quote_atom_if_needed(k.name.str()) + "/" + std::to_string(k.arity) + ".\n";
    }
  }
  out += "\n:- metarules.\n";
  for (const Metarule& m : p.metarules) out += serialize_metarule(m) + "\n";
  return out;
}

std::string serialize_hypothesis(const Hypothesis& h) {
  std::string out;
  if (h.deadline_expired) {
    out += "% empty hypothesis: deadline expired\n";
  } else {
    out += "% hypothesis: " + std::to_string(h.clauses.size()) + " clauses, " + std::to_string(h.residue.size()) +
           " residue facts\n";
  }
  write_clauses(h.clauses, out);
  for (const Literal& l : h.residue) out += to_string(l) + ".\n";
  return out;
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace topmil
