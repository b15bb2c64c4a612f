#include "topmil/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <unordered_map>

namespace topmil {
namespace {

const std::vector<Term>& no_args() {
  static const std::vector<Term> empty;
  return empty;
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Symbol nil_symbol() {
  static const Symbol s("[]");
  return s;
}

Symbol cons_symbol() {
  static const Symbol s(".");
  return s;
}

Term Term::var(Symbol name, std::uint32_t index) {
  Term t;
  t.kind_ = Kind::Variable;
  t.ground_ = false;
  t.name_ = name;
  t.index_ = index;
  t.hash_ = mix(mix(1, name.id()), index);
  return t;
}

Term Term::constant(Symbol name) {
  Term t;
  t.kind_ = Kind::Constant;
  t.name_ = name;
  t.hash_ = mix(2, name.id());
  return t;
}

Term Term::integer(long long value) { return constant(Symbol(std::to_string(value))); }

Term Term::compound(Symbol functor, std::vector<Term> args) {
  Term t;
  t.kind_ = Kind::Compound;
  t.name_ = functor;
  std::size_t h = mix(3, functor.id());
  bool ground = true;
  for (const Term& a : args) {
    ground = ground && a.ground();
    h = mix(h, a.hash());
  }
  t.ground_ = ground;
  t.hash_ = mix(h, args.size());
  t.args_ = std::make_shared<const std::vector<Term>>(std::move(args));
  return t;
}

const std::vector<Term>& Term::args() const { return args_ ? *args_ : no_args(); }

bool operator==(const Term& a, const Term& b) {
  if (a.kind_ != b.kind_ || a.name_ != b.name_ || a.index_ != b.index_ || a.hash_ != b.hash_) return false;
  if (a.kind_ != Term::Kind::Compound || a.args_ == b.args_) return true;
  return *a.args_ == *b.args_;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  switch (a.kind_) {
    case Term::Kind::Variable:
      return a.var_id() <=> b.var_id();
    case Term::Kind::Constant:
      return a.name_ <=> b.name_;
    case Term::Kind::Compound: {
      if (auto c = a.arity() <=> b.arity(); c != 0) return c;
      if (auto c = a.name_ <=> b.name_; c != 0) return c;
      const auto& x = a.args();
      const auto& y = b.args();
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (auto c = x[i] <=> y[i]; c != 0) return c;
      }
      return std::strong_ordering::equal;
    }
  }
  return std::strong_ordering::equal;
}

bool Literal::ground() const {
  return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.ground(); });
}

std::strong_ordering operator<=>(const Literal& a, const Literal& b) {
  if (auto c = a.predicate <=> b.predicate; c != 0) return c;
  if (auto c = a.args.size() <=> b.args.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (auto c = a.args[i] <=> b.args[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool Clause::ground() const {
  return head.ground() &&
         std::all_of(body.begin(), body.end(), [](const Literal& l) { return l.ground(); });
}

std::string quote_atom_if_needed(const std::string& text) {
  if (text == "[]") return text;
  bool plain = !text.empty() && std::islower(static_cast<unsigned char>(text[0]));
  for (char ch : text) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') plain = false;
  }
  if (plain) return text;
  long long v;
  if (symbol_integer(Symbol(text), v) && std::to_string(v) == text) return text;
  std::string out = "'";
  for (char ch : text) {
    if (ch == '\'' || ch == '\\') out += '\\';
    out += ch;
  }
  out += '\'';
  return out;
}

namespace {

void write_term(const Term& t, std::string& out);

void write_list(const Term& t, std::string& out) {
  out += '[';
  const Term* cur = &t;
  bool first = true;
  while (cur->is_compound() && cur->name() == cons_symbol() && cur->arity() == 2) {
    if (!first) out += ',';
    first = false;
    write_term(cur->args()[0], out);
    cur = &cur->args()[1];
  }
  if (!(cur->is_constant() && cur->name() == nil_symbol())) {
    out += '|';
    write_term(*cur, out);
  }
  out += ']';
}

bool is_infix(const Term& t) {
  if (!t.is_compound() || t.arity() != 2) return false;
  const std::string& n = t.name().str();
  return n == "/";
}

void write_term(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Variable: {
      std::string name = t.name().str();
      if (!name.empty() && std::islower(static_cast<unsigned char>(name[0]))) {
        name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
      }
      if (name.empty()) name = "_";
      out += name;
      if (t.index() != 0) {
        out += '_';
        out += std::to_string(t.index());
      }
      return;
    }
    case Term::Kind::Constant:
      out += quote_atom_if_needed(t.name().str());
      return;
    case Term::Kind::Compound:
      if (t.name() == cons_symbol() && t.arity() == 2) {
        write_list(t, out);
        return;
      }
      if (is_infix(t)) {
        write_term(t.args()[0], out);
        out += t.name().str();
        if (is_infix(t.args()[1])) {
          out += '(';
          write_term(t.args()[1], out);
          out += ')';
        } else {
          write_term(t.args()[1], out);
        }
        return;
      }
      out += quote_atom_if_needed(t.name().str());
      out += '(';
      for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) out += ',';
        write_term(t.args()[i], out);
      }
      out += ')';
      return;
  }
}

void write_literal(const Literal& l, std::string& out) {
  out += quote_atom_if_needed(l.predicate.str());
  if (l.args.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < l.args.size(); ++i) {
    if (i) out += ',';
    write_term(l.args[i], out);
  }
  out += ')';
}

}  // namespace

std::string to_string(const Term& t) {
  std::string out;
  write_term(t, out);
  return out;
}

std::string to_string(const Literal& l) {
  std::string out;
  write_literal(l, out);
  return out;
}

std::string to_string(const Clause& c) {
  std::string out;
  write_literal(c.head, out);
  for (std::size_t i = 0; i < c.body.size(); ++i) {
    out += i == 0 ? " :- " : ", ";
    write_literal(c.body[i], out);
  }
  out += '.';
  return out;
}

Term make_list(const std::vector<Term>& items, std::optional<Term> tail) {
  Term result = tail ? *tail : Term::constant(nil_symbol());
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    result = Term::compound(cons_symbol(), {*it, result});
  }
  return result;
}

void term_variables(const Term& t, std::vector<VarId>& out) {
  if (t.ground()) return;
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.var_id()) == out.end()) out.push_back(t.var_id());
    return;
  }
  for (const Term& a : t.args()) term_variables(a, out);
}

std::vector<VarId> clause_variables(const Clause& c) {
  std::vector<VarId> out;
  for (const Term& t : c.head.args) term_variables(t, out);
  for (const Literal& l : c.body) {
    for (const Term& t : l.args) term_variables(t, out);
  }
  return out;
}

namespace {

Clause rename_with(const Clause& c, const std::function<Term(std::size_t, const VarId&)>& fresh) {
  std::vector<VarId> vars = clause_variables(c);
  Substitution::Map m;
  for (std::size_t i = 0; i < vars.size(); ++i) m.emplace(vars[i], fresh(i, vars[i]));
  return Substitution(std::move(m)).apply(c);
}

std::string display_name(std::size_t i) {
  static const char* base[] = {"X", "Y", "Z"};
  std::string name = base[i % 3];
  if (i >= 3) name += std::to_string(i / 3);
  return name;
}

}  // namespace

Clause rename_apart(const Clause& c, std::uint32_t fresh_base) {
  return rename_with(c, [&](std::size_t i, const VarId& v) {
    return Term::var(v.name, fresh_base + static_cast<std::uint32_t>(i));
  });
}

Clause display_rename(const Clause& c) {
  return rename_with(c, [](std::size_t i, const VarId&) { return Term::var(display_name(i)); });
}

std::string variant_key(const Clause& c) {
  Clause r = rename_with(c, [](std::size_t i, const VarId&) {
    return Term::var(Symbol("_V"), static_cast<std::uint32_t>(i + 1));
  });
  return to_string(r);
}

bool is_variant(const Clause& a, const Clause& b) { return variant_key(a) == variant_key(b); }

void collect_constants(const Term& t, std::vector<Symbol>& out) {
  if (t.is_constant()) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  for (const Term& a : t.args()) collect_constants(a, out);
}

void collect_constants(const Literal& l, std::vector<Symbol>& out) {
  for (const Term& t : l.args) collect_constants(t, out);
}

std::size_t term_depth(const Term& t) {
  if (!t.is_compound()) return 0;
  std::size_t d = 0;
  for (const Term& a : t.args()) d = std::max(d, term_depth(a));
  return d + 1;
}

const Term* Substitution::find(const VarId& v) const {
  auto it = bindings_.find(v);
  return it == bindings_.end() ? nullptr : &it->second;
}

Term Substitution::apply(const Term& t) const {
  if (t.ground() || bindings_.empty()) return t;
  if (t.is_var()) {
    const Term* b = find(t.var_id());
    return b ? *b : t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(apply(a));
  return Term::compound(t.name(), std::move(args));
}

Literal Substitution::apply(const Literal& l) const {
  Literal out;
  out.predicate = l.predicate;
  out.args.reserve(l.args.size());
  for (const Term& a : l.args) out.args.push_back(apply(a));
  return out;
}

Clause Substitution::apply(const Clause& c) const {
  Clause out;
  out.head = apply(c.head);
  out.body.reserve(c.body.size());
  for (const Literal& l : c.body) out.body.push_back(apply(l));
  return out;
}

namespace {

// Triangular bindings built during unification.
class Unifier {
 public:
  const Term& walk(const Term& t) const {
    const Term* cur = &t;
    while (cur->is_var()) {
      auto it = map_.find(cur->var_id());
      if (it == map_.end()) break;
      cur = &it->second;
    }
    return *cur;
  }

  bool occurs(const VarId& v, const Term& t) const {
    const Term& w = walk(t);
    if (w.is_var()) return w.var_id() == v;
    for (const Term& a : w.args()) {
      if (!a.ground() && occurs(v, a)) return true;
    }
    return false;
  }

  bool unify(const Term& a0, const Term& b0) {
    const Term a = walk(a0);
    const Term b = walk(b0);
    if (a.is_var() && b.is_var() && a.var_id() == b.var_id()) return true;
    if (a.is_var()) return bind(a.var_id(), b);
    if (b.is_var()) return bind(b.var_id(), a);
    if (a.kind() != b.kind() || a.name() != b.name() || a.arity() != b.arity()) return false;
    if (a.is_constant()) return true;
    if (a.ground() && b.ground()) return a == b;
    for (std::size_t i = 0; i < a.arity(); ++i) {
      if (!unify(a.args()[i], b.args()[i])) return false;
    }
    return true;
  }

  // Fully resolves every binding; fails if a binding is cyclic.
  std::optional<Substitution> finish() const {
    Substitution::Map out;
    for (const auto& [v, t] : map_) {
      std::vector<VarId> stack{v};
      auto r = resolve(t, stack);
      if (!r) return std::nullopt;
      if (r->is_var() && r->var_id() == v) continue;
      out.emplace(v, std::move(*r));
    }
    return Substitution(std::move(out));
  }

 private:
  // A cyclic binding would be rejected by finish() anyway; refusing it here
  // also keeps unify() from chasing infinite rational trees.
  bool bind(const VarId& v, const Term& t) {
    if (occurs(v, t)) return false;
    map_.emplace(v, t);
    return true;
  }

  std::optional<Term> resolve(const Term& t, std::vector<VarId>& stack) const {
    if (t.ground()) return t;
    if (t.is_var()) {
      auto it = map_.find(t.var_id());
      if (it == map_.end()) return t;
      if (std::find(stack.begin(), stack.end(), t.var_id()) != stack.end()) {
        return std::nullopt;  // cyclic term
      }
      stack.push_back(t.var_id());
      auto r = resolve(it->second, stack);
      stack.pop_back();
      return r;
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) {
      auto r = resolve(a, stack);
      if (!r) return std::nullopt;
      args.push_back(std::move(*r));
    }
    return Term::compound(t.name(), std::move(args));
  }

  std::map<VarId, Term, VarIdLess> map_;
};

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b, bool) {
  Unifier u;
  if (!u.unify(a, b)) return std::nullopt;
  return u.finish();
}

std::optional<Substitution> unify(const Literal& a, const Literal& b, bool) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return std::nullopt;
  Unifier u;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!u.unify(a.args[i], b.args[i])) return std::nullopt;
  }
  return u.finish();
}

}  // namespace topmil
