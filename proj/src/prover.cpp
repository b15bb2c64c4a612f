#include "topmil/prover.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace topmil {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

enum class Tag : std::uint8_t { Ref, Con, Str, Fun };

// Ref: val = target cell (itself when unbound). Con: val = symbol id.
// Str: val = index of the Fun header. Fun: val = functor id, aux = arity,
// followed by the argument cells.
struct Cell {
  Tag tag;
  std::uint32_t val;
  std::uint32_t aux;
};

using Key = std::uint64_t;
constexpr Key kNoKey = ~Key{0};

Key con_key(std::uint32_t sym) { return (Key{sym} << 32) | 1; }
Key fun_key(std::uint32_t sym, std::uint32_t arity) { return (Key{sym} << 32) | (Key{arity} << 1); }
Key pred_key(std::uint32_t sym, std::uint32_t arity) { return (Key{sym} << 32) | arity; }

Key term_key(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      return kNoKey;
    case Term::Kind::Constant:
      return con_key(t.name().id());
    case Term::Kind::Compound:
      return fun_key(t.name().id(), static_cast<std::uint32_t>(t.arity()));
  }
  return kNoKey;
}

// A clause (or query) compiled to cells whose Ref cells hold variable numbers
// and whose Str cells point inside the template.
struct Template {
  std::vector<Cell> cells;
  std::uint32_t head = kNone;
  std::vector<std::uint32_t> body;
  std::uint32_t nvars = 0;
  std::vector<VarId> vars;
};

class TemplateBuilder {
 public:
  explicit TemplateBuilder(Template& t) : t_(t) {}

  void preassign(const std::vector<VarId>& order) {
    for (const VarId& v : order) number(v);
  }

  std::uint32_t add_root(const Literal& l) {
    if (l.args.empty()) {
      t_.cells.push_back({Tag::Con, l.predicate.id(), 0});
      return static_cast<std::uint32_t>(t_.cells.size() - 1);
    }
    std::uint32_t f = alloc(1 + static_cast<std::uint32_t>(l.args.size()));
    t_.cells[f] = {Tag::Fun, l.predicate.id(), static_cast<std::uint32_t>(l.args.size())};
    for (std::size_t i = 0; i < l.args.size(); ++i) fill(f + 1 + static_cast<std::uint32_t>(i), l.args[i]);
    t_.cells.push_back({Tag::Str, f, 0});
    return static_cast<std::uint32_t>(t_.cells.size() - 1);
  }

 private:
  std::uint32_t alloc(std::uint32_t n) {
    std::uint32_t at = static_cast<std::uint32_t>(t_.cells.size());
    t_.cells.resize(t_.cells.size() + n, Cell{Tag::Con, 0, 0});
    return at;
  }

  std::uint32_t number(const VarId& v) {
    auto it = numbers_.find(v);
    if (it != numbers_.end()) return it->second;
    std::uint32_t n = t_.nvars++;
    numbers_.emplace(v, n);
    t_.vars.push_back(v);
    return n;
  }

  void fill(std::uint32_t dst, const Term& term) {
    switch (term.kind()) {
      case Term::Kind::Variable:
        t_.cells[dst] = {Tag::Ref, number(term.var_id()), 0};
        return;
      case Term::Kind::Constant:
        t_.cells[dst] = {Tag::Con, term.name().id(), 0};
        return;
      case Term::Kind::Compound: {
        std::uint32_t n = static_cast<std::uint32_t>(term.arity());
        std::uint32_t f = alloc(1 + n);
        t_.cells[f] = {Tag::Fun, term.name().id(), n};
        for (std::uint32_t i = 0; i < n; ++i) fill(f + 1 + i, term.args()[i]);
        t_.cells[dst] = {Tag::Str, f, 0};
        return;
      }
    }
  }

  Template& t_;
  std::map<VarId, std::uint32_t, VarIdLess> numbers_;
};

Template compile_clause(const Clause& c, const std::vector<VarId>& preassigned = {}) {
  Template t;
  TemplateBuilder b(t);
  b.preassign(preassigned);
  t.head = b.add_root(c.head);
  for (const Literal& l : c.body) t.body.push_back(b.add_root(l));
  return t;
}

Template compile_query(const std::vector<Literal>& goal) {
  Template t;
  TemplateBuilder b(t);
  for (const Literal& l : goal) t.body.push_back(b.add_root(l));
  return t;
}

// Candidate lists for one predicate, split on the first and second argument.
struct Level2 {
  std::vector<std::uint32_t> all;
  std::unordered_map<Key, std::vector<std::uint32_t>> by1;
  std::vector<std::uint32_t> var1;
};

struct Bucket {
  Level2 top;
  std::unordered_map<Key, Level2> by0;
  Level2 var0;
};

void build_level(Level2& level, std::vector<std::uint32_t> ids, const std::vector<Key>& key1) {
  level.all = std::move(ids);
  std::vector<Key> distinct;
  for (std::uint32_t id : level.all) {
    Key k = key1[id];
    if (k != kNoKey && level.by1.find(k) == level.by1.end()) {
      level.by1.emplace(k, std::vector<std::uint32_t>{});
      distinct.push_back(k);
    }
  }
  for (std::uint32_t id : level.all) {
    Key k = key1[id];
    if (k == kNoKey) {
      level.var1.push_back(id);
      for (Key d : distinct) level.by1[d].push_back(id);
    } else {
      level.by1[k].push_back(id);
    }
  }
}

}  // namespace

struct ClauseDatabase::Impl {
  Program clauses;
  std::vector<Template> templates;
  std::unordered_map<Key, Bucket> buckets;

  const std::vector<std::uint32_t>* lookup(Key pred, Key k0, Key k1) const {
    auto it = buckets.find(pred);
    if (it == buckets.end()) return nullptr;
    const Bucket& b = it->second;
    const Level2* level = &b.top;
    if (k0 != kNoKey) {
      auto jt = b.by0.find(k0);
      level = jt == b.by0.end() ? &b.var0 : &jt->second;
    }
    if (k1 != kNoKey) {
      auto jt = level->by1.find(k1);
      return jt == level->by1.end() ? &level->var1 : &jt->second;
    }
    return &level->all;
  }
};

ClauseDatabase::ClauseDatabase() : impl_(std::make_shared<Impl>()) {}

ClauseDatabase::ClauseDatabase(const Program& program) {
  auto impl = std::make_shared<Impl>();
  impl->clauses = program;
  impl->templates.reserve(program.size());
  std::vector<Key> key0(program.size(), kNoKey), key1(program.size(), kNoKey);
  std::unordered_map<Key, std::vector<std::uint32_t>> by_pred;
  std::vector<Key> pred_order;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const Clause& c = program[i];
    impl->templates.push_back(compile_clause(c));
    if (!c.head.args.empty()) key0[i] = term_key(c.head.args[0]);
    if (c.head.args.size() >= 2) key1[i] = term_key(c.head.args[1]);
    Key pk = pred_key(c.head.predicate.id(), static_cast<std::uint32_t>(c.head.args.size()));
    auto [it, fresh] = by_pred.try_emplace(pk);
    if (fresh) pred_order.push_back(pk);
    it->second.push_back(static_cast<std::uint32_t>(i));
  }
  for (Key pk : pred_order) {
    const std::vector<std::uint32_t>& ids = by_pred[pk];
    Bucket& b = impl->buckets[pk];
    build_level(b.top, ids, key1);
    std::vector<Key> distinct;
    std::unordered_map<Key, std::vector<std::uint32_t>> groups;
    std::vector<std::uint32_t> vars;
    for (std::uint32_t id : ids) {
      if (key0[id] != kNoKey && groups.find(key0[id]) == groups.end()) {
        groups.emplace(key0[id], std::vector<std::uint32_t>{});
        distinct.push_back(key0[id]);
      }
    }
    for (std::uint32_t id : ids) {
      if (key0[id] == kNoKey) {
        vars.push_back(id);
        for (Key d : distinct) groups[d].push_back(id);
      } else {
        groups[key0[id]].push_back(id);
      }
    }
    for (Key d : distinct) build_level(b.by0[d], std::move(groups[d]), key1);
    build_level(b.var0, std::move(vars), key1);
  }
  impl_ = std::move(impl);
}

std::size_t ClauseDatabase::size() const { return impl_->clauses.size(); }
const Clause& ClauseDatabase::clause(std::size_t i) const { return impl_->clauses.at(i); }

bool BuiltinSet::is_known(const PredicateKey& key) {
  const std::string& n = key.name.str();
  if (n == "apply") return key.arity >= 1;
  if (n == "succ_within") return key.arity == 4;
  return false;
}

void BuiltinSet::enable(const PredicateKey& key) {
  if (!is_known(key)) throw std::invalid_argument("unknown built-in " + key.name.str() + "/" + std::to_string(key.arity));
  keys_.insert(key);
}

namespace {

struct GoalNode {
  std::uint32_t term;
  std::uint32_t next;
  std::uint32_t parent;
  std::uint32_t depth;
  std::uint32_t below;  // meta goals: predicate rank must be lower than this
};

enum class Phase : std::uint8_t { Clauses, Existing, Fresh, Done };

struct ChoicePoint {
  std::uint32_t goal;
  std::uint32_t heap_mark;
  std::uint32_t trail_mark;
  std::uint32_t goal_mark;
  std::uint32_t prog_mark;
  Phase phase;
  bool meta;
  bool p_unbound;
  std::uint32_t db;
  std::uint32_t pos;
  const std::vector<std::uint32_t>* list;
  Key pred, k0, k1;
};

struct CompiledMetarule {
  Template tpl;
  std::uint32_t existentials = 0;
  std::uint32_t head_p = 0;  // existential slot holding the head predicate variable
  std::uint32_t data_arity = 0;
  std::vector<char> constrained;
};

struct ProgEntry {
  std::uint32_t metarule;
  std::uint32_t base;
};

class Machine {
 public:
  Machine(const std::vector<DatabaseView>& dbs, const BuiltinSet& builtins, const SolveOptions& options,
          const ProofBudget& budget)
      : dbs_(dbs), options_(options), budget_(budget) {
    static const Symbol apply_sym("apply");
    static const Symbol succ_sym("succ_within");
    apply_sym_ = apply_sym.id();
    succ_sym_ = succ_sym.id();
    for (const PredicateKey& k : builtins.keys()) {
      if (k.name.id() == apply_sym_) apply_arities_.insert(k.arity);
      if (k.name.id() == succ_sym_) succ_enabled_ = true;
    }
    cells_.reserve(1 << 12);
    goals_.reserve(1 << 10);
  }

  void set_meta(const MetaSearchSpec* spec, std::vector<CompiledMetarule>* metarules) {
    meta_ = spec;
    metarules_ = metarules;
    encapsulation_ = spec->encapsulation.id();
    std::uint32_t n = static_cast<std::uint32_t>(spec->targets.size());
    for (std::uint32_t i = 0; i < n; ++i) {
      rank_[spec->targets[i].name.id()] = n - i;
      target_syms_.push_back(spec->targets[i].name.id());
      target_arity_.push_back(spec->targets[i].arity);
    }
  }

  // Puts already chosen clauses into the program before a run.
  void seed_program(const std::vector<MetaBinding>& initial) {
    for (const MetaBinding& b : initial) {
      std::uint32_t base = alloc(static_cast<std::uint32_t>(b.values.size()));
      for (std::size_t k = 0; k < b.values.size(); ++k) put_ground(base + static_cast<std::uint32_t>(k), b.values[k]);
      prog_.push_back({static_cast<std::uint32_t>(b.metarule), base});
    }
  }

  // Runs the query; on_solution returns true to stop.
  template <typename OnSolution>
  SolveReport run(const Template& query, std::vector<std::uint32_t>& query_slots, OnSolution&& on_solution) {
    report_ = SolveReport{};
    if (budget_.expired()) {
      report_.aborted = report_.deadline_expired = true;
      return finish();
    }
    query_slots.assign(query.nvars, kNone);
    std::uint32_t cont = kNone;
    std::vector<std::uint32_t> roots;
    for (std::uint32_t r : query.body) roots.push_back(build_root(query, r, query_slots));
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) cont = push_goal(*it, cont, kNone, 0, kNone);
    for (std::uint32_t& s : query_slots) {
      if (s == kNone) s = new_var();
    }
    cont_ = cont;
    while (true) {
      if (stopped_) break;
      if (cont_ == kNone) {
        if (on_solution()) break;
        if (stopped_ || !backtrack()) break;
        continue;
      }
      if (!step() && (stopped_ || !backtrack())) break;
    }
    return finish();
  }

  Term extract(std::uint32_t i, const std::unordered_map<std::uint32_t, Term>* names = nullptr,
               int depth = 0) const {
    if (depth > 100000) throw std::runtime_error("term too deep to extract (cyclic binding?)");
    i = deref(i);
    const Cell& c = cells_[i];
    switch (c.tag) {
      case Tag::Ref:
        if (names) {
          auto it = names->find(i);
          if (it != names->end()) return it->second;
        }
        return Term::var(Symbol("_G"), i + 1);
      case Tag::Con:
        return Term::constant(symbol_of(c.val));
      case Tag::Str: {
        const Cell& f = cells_[c.val];
        std::vector<Term> args;
        args.reserve(f.aux);
        for (std::uint32_t k = 0; k < f.aux; ++k) args.push_back(extract(c.val + 1 + k, names, depth + 1));
        return Term::compound(symbol_of(f.val), std::move(args));
      }
      case Tag::Fun:
        break;
    }
    throw std::logic_error("malformed heap term");
  }

  bool is_unbound(std::uint32_t i) const {
    i = deref(i);
    return cells_[i].tag == Tag::Ref;
  }
  std::uint32_t deref(std::uint32_t i) const {
    while (cells_[i].tag == Tag::Ref && cells_[i].val != i) i = cells_[i].val;
    return i;
  }

  const std::vector<ProgEntry>& prog() const { return prog_; }

  void count_answer() { ++report_.answers; }

 private:
  SolveReport finish() {
    report_.status = report_.answers > 0 ? ProofStatus::Success
                     : report_.truncated() ? ProofStatus::BudgetExhausted
                                           : ProofStatus::Failure;
    return report_;
  }

  static Symbol symbol_of(std::uint32_t id) { return Symbol::from_id(id); }

  std::uint32_t alloc(std::uint32_t n) {
    std::uint32_t at = static_cast<std::uint32_t>(cells_.size());
    cells_.resize(cells_.size() + n, Cell{Tag::Con, 0, 0});
    return at;
  }

  std::uint32_t new_var() {
    std::uint32_t v = alloc(1);
    cells_[v] = {Tag::Ref, v, 0};
    return v;
  }

  void put_ground(std::uint32_t dst, const Term& t) {
    if (t.is_var()) {
      cells_[dst] = {Tag::Ref, dst, 0};
    } else if (t.is_constant()) {
      cells_[dst] = {Tag::Con, t.name().id(), 0};
    } else {
      std::uint32_t n = static_cast<std::uint32_t>(t.arity());
      std::uint32_t f = alloc(1 + n);
      cells_[f] = {Tag::Fun, t.name().id(), n};
      for (std::uint32_t k = 0; k < n; ++k) put_ground(f + 1 + k, t.args()[k]);
      cells_[dst] = {Tag::Str, f, 0};
    }
  }

  std::uint32_t new_con(std::uint32_t sym) {
    std::uint32_t v = alloc(1);
    cells_[v] = {Tag::Con, sym, 0};
    return v;
  }

  void bind(std::uint32_t var, std::uint32_t target) {
    cells_[var] = {Tag::Ref, target, 0};
    trail_.push_back(var);
  }

  bool occurs(std::uint32_t var, std::uint32_t t) {
    scratch_.clear();
    scratch_.push_back(t);
    while (!scratch_.empty()) {
      std::uint32_t i = deref(scratch_.back());
      scratch_.pop_back();
      const Cell c = cells_[i];
      if (c.tag == Tag::Ref) {
        if (i == var) return true;
      } else if (c.tag == Tag::Str) {
        std::uint32_t n = cells_[c.val].aux;
        for (std::uint32_t k = 0; k < n; ++k) scratch_.push_back(c.val + 1 + k);
      }
    }
    return false;
  }

  bool bind_checked(std::uint32_t var, std::uint32_t target) {
    if (options_.occurs_check && occurs(var, target)) return false;
    bind(var, target);
    return true;
  }

  bool unify(std::uint32_t a0, std::uint32_t b0) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{a0, b0}};
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      std::uint32_t a = deref(x), b = deref(y);
      if (a == b) continue;
      const Cell ca = cells_[a], cb = cells_[b];
      if (ca.tag == Tag::Ref) {
        if (cb.tag == Tag::Ref) {
          if (a > b) bind(a, b);
          else bind(b, a);
        } else if (!bind_checked(a, b)) {
          return false;
        }
        continue;
      }
      if (cb.tag == Tag::Ref) {
        if (!bind_checked(b, a)) return false;
        continue;
      }
      if (ca.tag != cb.tag) return false;
      if (ca.tag == Tag::Con) {
        if (ca.val != cb.val) return false;
        continue;
      }
      const Cell fa = cells_[ca.val], fb = cells_[cb.val];
      if (fa.val != fb.val || fa.aux != fb.aux) return false;
      for (std::uint32_t k = 0; k < fa.aux; ++k) stack.push_back({ca.val + 1 + k, cb.val + 1 + k});
    }
    return true;
  }

  void build_into(const Template& t, std::uint32_t dst, std::uint32_t ti, std::vector<std::uint32_t>& slots) {
    const Cell tc = t.cells[ti];
    switch (tc.tag) {
      case Tag::Ref:
        if (slots[tc.val] == kNone) {
          cells_[dst] = {Tag::Ref, dst, 0};
          slots[tc.val] = dst;
        } else {
          cells_[dst] = {Tag::Ref, slots[tc.val], 0};
        }
        return;
      case Tag::Con:
        cells_[dst] = tc;
        return;
      case Tag::Str: {
        const Cell tf = t.cells[tc.val];
        std::uint32_t f = alloc(1 + tf.aux);
        cells_[f] = tf;
        for (std::uint32_t k = 0; k < tf.aux; ++k) build_into(t, f + 1 + k, tc.val + 1 + k, slots);
        cells_[dst] = {Tag::Str, f, 0};
        return;
      }
      case Tag::Fun:
        break;
    }
    throw std::logic_error("malformed template");
  }

  std::uint32_t build_root(const Template& t, std::uint32_t ti, std::vector<std::uint32_t>& slots) {
    std::uint32_t dst = alloc(1);
    build_into(t, dst, ti, slots);
    return dst;
  }

  // Unifies a template term against a heap term without copying the parts
  // that match existing structure.
  bool match(const Template& t, std::uint32_t troot, std::uint32_t h, std::vector<std::uint32_t>& slots) {
    match_stack_.clear();
    match_stack_.push_back({troot, h});
    while (!match_stack_.empty()) {
      auto [ti, hi] = match_stack_.back();
      match_stack_.pop_back();
      const Cell tc = t.cells[ti];
      switch (tc.tag) {
        case Tag::Ref:
          if (slots[tc.val] == kNone) {
            slots[tc.val] = hi;
          } else if (!unify(slots[tc.val], hi)) {
            return false;
          }
          break;
        case Tag::Con: {
          std::uint32_t d = deref(hi);
          const Cell c = cells_[d];
          if (c.tag == Tag::Ref) {
            bind(d, new_con(tc.val));
          } else if (c.tag != Tag::Con || c.val != tc.val) {
            return false;
          }
          break;
        }
        case Tag::Str: {
          std::uint32_t d = deref(hi);
          const Cell c = cells_[d];
          if (c.tag == Tag::Ref) {
            std::uint32_t n = build_root(t, ti, slots);
            if (!bind_checked(d, n)) return false;
          } else if (c.tag == Tag::Str) {
            const Cell tf = t.cells[tc.val];
            const Cell hf = cells_[c.val];
            if (tf.val != hf.val || tf.aux != hf.aux) return false;
            for (std::uint32_t k = 0; k < tf.aux; ++k) match_stack_.push_back({tc.val + 1 + k, c.val + 1 + k});
          } else {
            return false;
          }
          break;
        }
        case Tag::Fun:
          return false;
      }
    }
    return true;
  }

  std::uint32_t push_goal(std::uint32_t term, std::uint32_t next, std::uint32_t parent, std::uint32_t depth,
                          std::uint32_t below) {
    goals_.push_back({term, next, parent, depth, below});
    return static_cast<std::uint32_t>(goals_.size() - 1);
  }

  Key key_at(std::uint32_t i) const {
    i = deref(i);
    const Cell& c = cells_[i];
    if (c.tag == Tag::Con) return con_key(c.val);
    if (c.tag == Tag::Str) return fun_key(cells_[c.val].val, cells_[c.val].aux);
    return kNoKey;
  }

  void goal_keys(std::uint32_t term, Key& pred, Key& k0, Key& k1) const {
    const Cell& c = cells_[term];
    k0 = k1 = kNoKey;
    if (c.tag == Tag::Con) {
      pred = pred_key(c.val, 0);
      return;
    }
    const Cell& f = cells_[c.val];
    pred = pred_key(f.val, f.aux);
    if (f.aux >= 1) k0 = key_at(c.val + 1);
    if (f.aux >= 2) k1 = key_at(c.val + 2);
  }

  bool variant(std::uint32_t a0, std::uint32_t b0) {
    variant_map_.clear();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{a0, b0}};
    while (!stack.empty()) {
      auto [x, y] = stack.back();
      stack.pop_back();
      std::uint32_t a = deref(x), b = deref(y);
      const Cell ca = cells_[a], cb = cells_[b];
      if (ca.tag != cb.tag) return false;
      if (ca.tag == Tag::Ref) {
        bool seen = false;
        for (auto& [p, q] : variant_map_) {
          if (p == a || q == b) {
            if (p != a || q != b) return false;
            seen = true;
            break;
          }
        }
        if (!seen) variant_map_.push_back({a, b});
        continue;
      }
      if (ca.tag == Tag::Con) {
        if (ca.val != cb.val) return false;
        continue;
      }
      const Cell fa = cells_[ca.val], fb = cells_[cb.val];
      if (fa.val != fb.val || fa.aux != fb.aux) return false;
      for (std::uint32_t k = 0; k < fa.aux; ++k) stack.push_back({ca.val + 1 + k, cb.val + 1 + k});
    }
    return true;
  }

  bool ancestor_variant(const GoalNode& g) {
    Key pred, k0, k1;
    goal_keys(g.term, pred, k0, k1);
    for (std::uint32_t p = g.parent; p != kNone; p = goals_[p].parent) {
      Key pp, p0, p1;
      goal_keys(goals_[p].term, pp, p0, p1);
      if (pp != pred || p0 != k0) continue;
      if (variant(g.term, goals_[p].term)) return true;
    }
    return false;
  }

  bool count_inference() {
    ++report_.inferences;
    if (report_.inferences > budget_.max_inferences) {
      report_.aborted = true;
      stopped_ = true;
      return false;
    }
    if ((report_.inferences & 255) == 0 && budget_.expired()) {
      report_.aborted = report_.deadline_expired = true;
      stopped_ = true;
      return false;
    }
    return true;
  }

  std::uint32_t rank_of(std::uint32_t sym) const {
    auto it = rank_.find(sym);
    return it == rank_.end() ? 0 : it->second;
  }

  bool is_target(std::uint32_t sym) const { return rank_.count(sym) != 0; }

  // Executes the selected goal; false means the branch failed.
  bool step() {
    const std::uint32_t gi = cont_;
    const GoalNode g = goals_[gi];
    if (g.depth > budget_.max_depth) {
      report_.depth_pruned = true;
      return false;
    }
    const Cell root = cells_[g.term];
    std::uint32_t functor = root.tag == Tag::Str ? cells_[root.val].val : root.val;
    std::uint32_t arity = root.tag == Tag::Str ? cells_[root.val].aux : 0;

    if (functor == succ_sym_ && arity == 4 && succ_enabled_) {
      if (!count_inference()) return false;
      if (!succ_within(root.val)) return false;
      cont_ = g.next;
      return true;
    }
    if (functor == apply_sym_ && apply_arities_.count(arity)) {
      if (!count_inference()) return false;
      return call_apply(gi, root.val, arity);
    }
    if (options_.loop_check == LoopCheck::Variant && ancestor_variant(g)) return false;

    ChoicePoint cp{};
    cp.goal = gi;
    cp.heap_mark = static_cast<std::uint32_t>(cells_.size());
    cp.trail_mark = static_cast<std::uint32_t>(trail_.size());
    cp.goal_mark = static_cast<std::uint32_t>(goals_.size());
    cp.prog_mark = static_cast<std::uint32_t>(prog_.size());
    cp.phase = Phase::Clauses;
    cp.list = nullptr;
    goal_keys(g.term, cp.pred, cp.k0, cp.k1);
    if (meta_ && functor == encapsulation_ && arity >= 1) {
      std::uint32_t p = deref(root.val + 1);
      cp.meta = true;
      if (cells_[p].tag == Tag::Ref) {
        cp.p_unbound = true;
      } else if (cells_[p].tag == Tag::Con) {
        if (g.below != kNone && rank_of(cells_[p].val) >= g.below) return false;
        if (is_target(cells_[p].val)) cp.phase = Phase::Existing;
      }
    }
    cps_.push_back(cp);
    return try_next();
  }

  void undo_to(const ChoicePoint& cp) {
    while (trail_.size() > cp.trail_mark) {
      std::uint32_t v = trail_.back();
      trail_.pop_back();
      if (v < cp.heap_mark) cells_[v] = {Tag::Ref, v, 0};
    }
    cells_.resize(cp.heap_mark);
    goals_.resize(cp.goal_mark);
    prog_.resize(cp.prog_mark);
  }

  // Tries the remaining alternatives of the newest choicepoint.
  bool try_next() {
    ChoicePoint& cp = cps_.back();
    const GoalNode g = goals_[cp.goal];
    if (cp.phase == Phase::Clauses) {
      while (cp.db < dbs_.size()) {
        const DatabaseView& view = dbs_[cp.db];
        const ClauseDatabase::Impl& db = view.db->impl();
        if (!cp.list) {
          cp.list = db.lookup(cp.pred, cp.k0, cp.k1);
          cp.pos = 0;
          if (!cp.list) {
            ++cp.db;
            continue;
          }
        }
        while (cp.pos < cp.list->size()) {
          std::uint32_t id = (*cp.list)[cp.pos++];
          if (view.enabled && !(*view.enabled)[id]) continue;
          if (!count_inference()) return false;
          undo_to(cp);
          if (resolve(g, cp.goal, db.templates[id], nullptr, kNone)) return true;
          if (stopped_) return false;
        }
        cp.list = nullptr;
        ++cp.db;
      }
      if (!cp.meta || !cp.p_unbound) {
        cp.phase = Phase::Done;
        return false;
      }
      cp.phase = Phase::Existing;
      cp.pos = 0;
    }
    if (cp.phase == Phase::Existing) {
      while (cp.pos < cp.prog_mark) {
        std::uint32_t i = cp.pos++;
        ProgEntry e = prog_[i];
        const CompiledMetarule& m = (*metarules_)[e.metarule];
        if (cp.p_unbound && g.below != kNone) {
          std::uint32_t p = deref(e.base + m.head_p);
          if (cells_[p].tag == Tag::Con && rank_of(cells_[p].val) >= g.below) continue;
        }
        if (!count_inference()) return false;
        undo_to(cp);
        slots_.assign(m.tpl.nvars, kNone);
        for (std::uint32_t k = 0; k < m.existentials; ++k) slots_[k] = e.base + k;
        std::uint32_t below = meta_->lexicographic ? rank_of_bound(e.base + m.head_p) : kNone;
        if (resolve(g, cp.goal, m.tpl, &m.constrained, below, true)) return true;
        if (stopped_) return false;
      }
      cp.phase = Phase::Fresh;
      cp.pos = 0;
    }
    if (cp.phase == Phase::Fresh) {
      if (cp.prog_mark >= meta_->max_clauses) {
        cp.phase = Phase::Done;
        return false;
      }
      const std::uint32_t nt = static_cast<std::uint32_t>(target_syms_.size());
      const std::uint32_t total = static_cast<std::uint32_t>(metarules_->size()) * nt;
      while (cp.pos < total) {
        std::uint32_t j = cp.pos / nt, t = cp.pos % nt;
        ++cp.pos;
        const CompiledMetarule& m = (*metarules_)[j];
        if (m.data_arity != target_arity_[t]) continue;
        std::uint32_t sym = target_syms_[t];
        if (cp.p_unbound) {
          if (g.below != kNone && rank_of(sym) >= g.below) continue;
        } else {
          std::uint32_t p = deref(cells_[goals_[cp.goal].term].val + 1);
          if (cells_[p].val != sym) continue;
        }
        if (!count_inference()) return false;
        undo_to(cp);
        std::uint32_t base = alloc(m.existentials);
        for (std::uint32_t k = 0; k < m.existentials; ++k) cells_[base + k] = {Tag::Ref, base + k, 0};
        bind(base + m.head_p, new_con(sym));
        prog_.push_back({j, base});
        slots_.assign(m.tpl.nvars, kNone);
        for (std::uint32_t k = 0; k < m.existentials; ++k) slots_[k] = base + k;
        std::uint32_t below = meta_->lexicographic ? rank_of(sym) : kNone;
        if (resolve(g, cp.goal, m.tpl, &m.constrained, below, true)) return true;
        if (stopped_) return false;
      }
      cp.phase = Phase::Done;
    }
    return false;
  }

  std::uint32_t rank_of_bound(std::uint32_t cell) const {
    std::uint32_t p = deref(cell);
    return cells_[p].tag == Tag::Con ? rank_of(cells_[p].val) : kNone;
  }

  bool resolve(const GoalNode& g, std::uint32_t gi, const Template& t, const std::vector<char>* constrained,
               std::uint32_t below, bool slots_ready = false) {
    if (!slots_ready) slots_.assign(t.nvars, kNone);
    if (!match(t, t.head, g.term, slots_)) return false;
    std::uint32_t next = g.next;
    if (!t.body.empty()) {
      body_roots_.clear();
      for (std::uint32_t r : t.body) body_roots_.push_back(build_root(t, r, slots_));
      for (std::size_t i = body_roots_.size(); i-- > 0;) {
        std::uint32_t b = (constrained && below != kNone && (*constrained)[i]) ? below : kNone;
        next = push_goal(body_roots_[i], next, gi, g.depth + 1, b);
      }
    }
    cont_ = next;
    return true;
  }

  bool integer_at(std::uint32_t i, long long& out) const {
    i = deref(i);
    if (cells_[i].tag != Tag::Con) return false;
    return symbol_integer(symbol_of(cells_[i].val), out);
  }

  bool succ_within(std::uint32_t f) {
    long long x, y, lo, hi;
    if (!integer_at(f + 3, lo) || !integer_at(f + 4, hi)) return false;
    if (integer_at(f + 1, x)) {
      if (x < lo || x + 1 > hi) return false;
      return unify(f + 2, new_con(Symbol(std::to_string(x + 1)).id()));
    }
    if (integer_at(f + 2, y)) {
      if (y - 1 < lo || y > hi) return false;
      return unify(f + 1, new_con(Symbol(std::to_string(y - 1)).id()));
    }
    return false;
  }

  bool call_apply(std::uint32_t gi, std::uint32_t f, std::uint32_t arity) {
    const GoalNode g = goals_[gi];
    std::uint32_t p = deref(f + 1);
    const Cell pc = cells_[p];
    std::uint32_t functor;
    std::vector<std::uint32_t> sources;
    if (pc.tag == Tag::Con) {
      functor = pc.val;
    } else if (pc.tag == Tag::Str) {
      const Cell pf = cells_[pc.val];
      functor = pf.val;
      for (std::uint32_t k = 0; k < pf.aux; ++k) sources.push_back(pc.val + 1 + k);
    } else {
      return false;
    }
    for (std::uint32_t k = 1; k < arity; ++k) sources.push_back(f + 1 + k);
    std::uint32_t term;
    if (sources.empty()) {
      term = new_con(functor);
    } else {
      std::uint32_t n = static_cast<std::uint32_t>(sources.size());
      std::uint32_t nf = alloc(1 + n);
      cells_[nf] = {Tag::Fun, functor, n};
      for (std::uint32_t k = 0; k < n; ++k) cells_[nf + 1 + k] = {Tag::Ref, sources[k], 0};
      term = alloc(1);
      cells_[term] = {Tag::Str, nf, 0};
    }
    cont_ = push_goal(term, g.next, gi, g.depth + 1, kNone);
    return true;
  }

  bool backtrack() {
    while (!cps_.empty()) {
      if (try_next()) return true;
      if (stopped_) return false;
      cps_.pop_back();
    }
    return false;
  }

  const std::vector<DatabaseView>& dbs_;
  SolveOptions options_;
  ProofBudget budget_;
  SolveReport report_;
  bool stopped_ = false;

  std::vector<Cell> cells_;
  std::vector<std::uint32_t> trail_;
  std::vector<GoalNode> goals_;
  std::vector<ChoicePoint> cps_;
  std::vector<ProgEntry> prog_;
  std::uint32_t cont_ = kNone;

  std::vector<std::uint32_t> slots_;
  std::vector<std::uint32_t> body_roots_;
  std::vector<std::uint32_t> scratch_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> match_stack_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> variant_map_;

  std::uint32_t apply_sym_ = 0, succ_sym_ = 0;
  std::unordered_set<std::uint32_t> apply_arities_;
  bool succ_enabled_ = false;

  const MetaSearchSpec* meta_ = nullptr;
  std::vector<CompiledMetarule>* metarules_ = nullptr;
  std::uint32_t encapsulation_ = 0;
  std::unordered_map<std::uint32_t, std::uint32_t> rank_;
  std::vector<std::uint32_t> target_syms_;
  std::vector<std::uint32_t> target_arity_;
};

// Term-level engine for LoopCheck::Tabled. Each call variant owns a table of
// answers; a query is re-evaluated until a pass adds no answer anywhere, after
// which every table visited in that pass is complete.
class TabledEngine {
 public:
  TabledEngine(const std::vector<DatabaseView>& dbs, const BuiltinSet& builtins, const SolveOptions& options,
               const ProofBudget& budget)
      : dbs_(dbs), options_(options), budget_(budget) {
    static const Symbol apply_sym("apply");
    static const Symbol succ_sym("succ_within");
    apply_sym_ = apply_sym;
    succ_sym_ = succ_sym;
    for (const PredicateKey& k : builtins.keys()) {
      if (k.name == apply_sym_) apply_arities_.insert(k.arity);
      if (k.name == succ_sym_) succ_enabled_ = true;
    }
  }

  SolveReport run(const std::vector<Literal>& goal, bool first_only, const Prover::AnswerFn& on_answer) {
    report_ = SolveReport{};
    std::vector<Term> vars;
    std::vector<VarId> ids;
    for (const Literal& l : goal) {
      for (const Term& t : l.args) term_variables(t, ids);
    }
    std::vector<VarId> distinct;
    for (const VarId& v : ids) {
      if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
    }
    for (const VarId& v : distinct) vars.push_back(Term::var(v.name, v.index));
    Table top;
    top.ground = false;
    const Literal answer(Symbol("$answer"), vars);
    while (!stopped_) {
      if (budget_.expired()) {
        abort(true);
        break;
      }
      ++pass_;
      changed_ = false;
      visited_.clear();
      solve_body(goal, 0, answer, top, 0);
      if (stopped_ || (first_only && !top.answers.empty()) || !changed_) {
        if (!stopped_ && !changed_) {
          for (Table* t : visited_) t->complete = true;
        }
        break;
      }
    }
    for (const Literal& a : top.answers) {
      Substitution s;
      for (std::size_t i = 0; i < distinct.size(); ++i) {
        if (!(a.args[i].is_var() && a.args[i].var_id() == distinct[i])) s.set(distinct[i], a.args[i]);
      }
      ++report_.answers;
      if (!on_answer(s) || first_only) break;
    }
    report_.status = report_.answers > 0 ? ProofStatus::Success
                     : report_.truncated() ? ProofStatus::BudgetExhausted
                                           : ProofStatus::Failure;
    return report_;
  }

 private:
  struct Table {
    std::vector<Literal> answers;
    std::unordered_set<std::string> keys;
    std::uint64_t pass = 0;
    bool complete = false;
    bool ground = false;
  };

  void abort(bool deadline) {
    report_.aborted = true;
    if (deadline) report_.deadline_expired = true;
    stopped_ = true;
  }

  bool count_inference() {
    ++report_.inferences;
    if (report_.inferences > budget_.max_inferences) {
      abort(false);
      return false;
    }
    if ((report_.inferences & 255) == 0 && budget_.expired()) {
      abort(true);
      return false;
    }
    return true;
  }

  Term rename(const Term& t) {
    if (t.ground()) return t;
    if (t.is_var()) {
      for (std::size_t i = 0; i < rename_from_.size(); ++i) {
        if (rename_from_[i] == t.var_id()) return rename_to_[i];
      }
      rename_from_.push_back(t.var_id());
      rename_to_.push_back(Term::var(t.name(), next_var_++));
      return rename_to_.back();
    }
    std::vector<Term> args;
    args.reserve(t.arity());
    for (const Term& a : t.args()) args.push_back(rename(a));
    return Term::compound(t.name(), std::move(args));
  }

  Literal rename(const Literal& l) {
    Literal out;
    out.predicate = l.predicate;
    out.args.reserve(l.args.size());
    for (const Term& a : l.args) out.args.push_back(rename(a));
    return out;
  }

  Clause fresh(const Clause& c) {
    rename_from_.clear();
    rename_to_.clear();
    Clause r;
    r.head = rename(c.head);
    r.body.reserve(c.body.size());
    for (const Literal& l : c.body) r.body.push_back(rename(l));
    return r;
  }

  // Byte string identical for two literals iff they are variants.
  static void encode(const Term& t, std::string& out, std::vector<VarId>& vars) {
    auto put = [&](char tag, std::uint32_t v) {
      out.push_back(tag);
      out.append(reinterpret_cast<const char*>(&v), sizeof v);
    };
    if (t.is_var()) {
      auto it = std::find(vars.begin(), vars.end(), t.var_id());
      if (it == vars.end()) {
        vars.push_back(t.var_id());
        it = vars.end() - 1;
      }
      put('V', static_cast<std::uint32_t>(it - vars.begin()));
    } else if (t.is_constant()) {
      put('C', t.name().id());
    } else {
      put('F', t.name().id());
      put('/', static_cast<std::uint32_t>(t.arity()));
      for (const Term& a : t.args()) encode(a, out, vars);
    }
  }

  std::string key_of(const Literal& l) {
    std::string out;
    key_vars_.clear();
    encode(Term::compound(l.predicate, l.args), out, key_vars_);
    return out;
  }

  static std::vector<Literal> apply_rest(const Substitution& s, const std::vector<Literal>& goals, std::size_t from) {
    std::vector<Literal> out;
    out.reserve(goals.size() - from);
    for (std::size_t i = from; i < goals.size(); ++i) out.push_back(s.apply(goals[i]));
    return out;
  }

  void add_answer(Table& t, const Literal& a) {
    if (!t.keys.insert(key_of(a)).second) return;
    t.answers.push_back(a);
    changed_ = true;
  }

  // Continues with goals[i..] after a goal was solved by `s`.
  void next(const Substitution& s, const std::vector<Literal>& goals, std::size_t i, const Literal& answer,
            Table& into, std::uint32_t depth) {
    solve_body(apply_rest(s, goals, i), 0, s.apply(answer), into, depth);
  }

  void solve_body(const std::vector<Literal>& goals, std::size_t i, const Literal& answer, Table& into,
                  std::uint32_t depth) {
    if (stopped_ || (into.ground && !into.answers.empty())) return;
    if (i == goals.size()) {
      add_answer(into, answer);
      return;
    }
    const Literal& g = goals[i];
    if (g.predicate == succ_sym_ && g.args.size() == 4 && succ_enabled_) {
      if (!count_inference()) return;
      long long x, y, lo, hi;
      if (!g.args[2].integer_value(lo) || !g.args[3].integer_value(hi)) return;
      std::optional<Substitution> s;
      if (g.args[0].integer_value(x)) {
        if (x < lo || x + 1 > hi) return;
        s = unify(g.args[1], Term::integer(x + 1), options_.occurs_check);
      } else if (g.args[1].integer_value(y)) {
        if (y - 1 < lo || y > hi) return;
        s = unify(g.args[0], Term::integer(y - 1), options_.occurs_check);
      }
      if (s) next(*s, goals, i + 1, answer, into, depth);
      return;
    }
    if (g.predicate == apply_sym_ && apply_arities_.count(static_cast<std::uint32_t>(g.args.size()))) {
      if (!count_inference()) return;
      const Term& p = g.args[0];
      if (p.is_var()) return;
      std::vector<Term> args;
      if (p.is_compound()) args = p.args();
      args.insert(args.end(), g.args.begin() + 1, g.args.end());
      std::vector<Literal> rewritten = goals;
      rewritten[i] = Literal(p.name(), std::move(args));
      solve_body(rewritten, i, answer, into, depth);
      return;
    }
    Table* sub = call(g, depth + 1);
    if (!sub) return;
    if (!sub->complete) depends_on_open_ = true;
    for (std::size_t k = 0; k < sub->answers.size() && !stopped_; ++k) {
      if (into.ground && !into.answers.empty()) return;
      Literal a = sub->answers[k];
      if (!a.ground()) {
        rename_from_.clear();
        rename_to_.clear();
        a = rename(a);
      }
      auto s = unify(g, a, options_.occurs_check);
      if (s) next(*s, goals, i + 1, answer, into, depth);
    }
  }

  Table* call(const Literal& g, std::uint32_t depth) {
    if (depth > budget_.max_depth) {
      report_.depth_pruned = true;
      return nullptr;
    }
    bool ground = g.ground();
    auto [it, fresh_table] = tables_.try_emplace(key_of(g));
    Table& t = it->second;
    if (fresh_table) t.ground = ground;
    if (t.complete || t.pass == pass_) return &t;
    t.pass = pass_;
    visited_.push_back(&t);
    // A table whose evaluation consumed only complete tables is complete now.
    bool outer = depends_on_open_;
    depends_on_open_ = false;
    evaluate(g, t, depth);
    if (!depends_on_open_ && !stopped_) t.complete = true;
    depends_on_open_ = outer;
    return &t;
  }

  void evaluate(const Literal& g, Table& t, std::uint32_t depth) {
    Key pred = pred_key(g.predicate.id(), static_cast<std::uint32_t>(g.args.size()));
    Key k0 = g.args.size() >= 1 ? term_key(g.args[0]) : kNoKey;
    Key k1 = g.args.size() >= 2 ? term_key(g.args[1]) : kNoKey;
    for (const DatabaseView& view : dbs_) {
      const ClauseDatabase::Impl& db = view.db->impl();
      const std::vector<std::uint32_t>* list = db.lookup(pred, k0, k1);
      if (!list) continue;
      for (std::uint32_t id : *list) {
        if (view.enabled && !(*view.enabled)[id]) continue;
        if (stopped_ || (t.ground && !t.answers.empty())) return;
        if (!count_inference()) return;
        Clause c = fresh(db.clauses[id]);
        auto s = unify(c.head, g, options_.occurs_check);
        if (!s) continue;
        solve_body(apply_rest(*s, c.body, 0), 0, s->apply(g), t, depth);
      }
    }
  }

  const std::vector<DatabaseView>& dbs_;
  SolveOptions options_;
  ProofBudget budget_;
  SolveReport report_;
  bool stopped_ = false;

  std::unordered_map<std::string, Table> tables_;
  std::vector<Table*> visited_;
  std::uint64_t pass_ = 0;
  bool changed_ = false;
  bool depends_on_open_ = false;
  std::uint32_t next_var_ = 1u << 30;
  std::vector<VarId> rename_from_;
  std::vector<Term> rename_to_;
  std::vector<VarId> key_vars_;

  Symbol apply_sym_, succ_sym_;
  std::unordered_set<std::uint32_t> apply_arities_;
  bool succ_enabled_ = false;
};

Substitution extract_answer(const Machine& m, const Template& q, const std::vector<std::uint32_t>& slots) {
  std::unordered_map<std::uint32_t, Term> names;
  for (std::uint32_t k = 0; k < q.nvars; ++k) {
    std::uint32_t d = m.deref(slots[k]);
    if (m.is_unbound(d)) names.try_emplace(d, Term::var(q.vars[k].name, q.vars[k].index));
  }
  Substitution s;
  for (std::uint32_t k = 0; k < q.nvars; ++k) {
    Term t = m.extract(slots[k], &names);
    if (t.is_var() && t.var_id() == q.vars[k]) continue;
    s.set(q.vars[k], std::move(t));
  }
  return s;
}

}  // namespace

Prover::Prover(std::vector<DatabaseView> databases, BuiltinSet builtins, SolveOptions options)
    : databases_(std::move(databases)), builtins_(std::move(builtins)), options_(options) {}

SolveReport Prover::solve(const std::vector<Literal>& goal, const ProofBudget& budget,
                          const AnswerFn& on_answer) const {
  if (options_.loop_check == LoopCheck::Tabled) {
    return TabledEngine(databases_, builtins_, options_, budget).run(goal, false, on_answer);
  }
  Template q = compile_query(goal);
  Machine m(databases_, builtins_, options_, budget);
  std::vector<std::uint32_t> slots;
  return m.run(q, slots, [&]() {
    m.count_answer();
    return !on_answer(extract_answer(m, q, slots));
  });
}

SolveReport Prover::prove(const std::vector<Literal>& goal, const ProofBudget& budget) const {
  if (options_.loop_check == LoopCheck::Tabled) {
    return TabledEngine(databases_, builtins_, options_, budget).run(goal, true, [](const Substitution&) {
      return false;
    });
  }
  Template q = compile_query(goal);
  Machine m(databases_, builtins_, options_, budget);
  std::vector<std::uint32_t> slots;
  return m.run(q, slots, [&]() {
    m.count_answer();
    return true;
  });
}

SolveReport solve(const std::vector<Literal>& goal, const Program& program, const ProofBudget& budget,
                  std::vector<Substitution>* answers, std::size_t max_answers, const BuiltinSet& builtins,
                  const SolveOptions& options) {
  ClauseDatabase db(program);
  Prover prover({DatabaseView{&db}}, builtins, options);
  std::size_t seen = 0;
  return prover.solve(goal, budget, [&](const Substitution& s) {
    if (answers) answers->push_back(s);
    return ++seen < max_answers;
  });
}

Entailment entails(const Program& program, const Literal& atom, const ProofBudget& budget,
                   const BuiltinSet& builtins, const SolveOptions& options) {
  ClauseDatabase db(program);
  Prover prover({DatabaseView{&db}}, builtins, options);
  SolveReport r = prover.prove({atom}, budget);
  return {r.answers > 0, r.answers == 0 && r.truncated()};
}

MetaProver::MetaProver(std::vector<DatabaseView> background, BuiltinSet builtins)
    : background_(std::move(background)), builtins_(std::move(builtins)) {}

SolveReport MetaProver::solve(const std::vector<Literal>& goal, const MetaSearchSpec& spec,
                              const ProofBudget& budget, const AcceptFn& accept) const {
  std::vector<CompiledMetarule> compiled;
  for (const MetaruleTemplate& mt : spec.metarules) {
    CompiledMetarule c;
    c.tpl = compile_clause(mt.clause, mt.existentials);
    c.existentials = static_cast<std::uint32_t>(mt.existentials.size());
    const Term& p = mt.clause.head.args.at(0);
    auto it = std::find(mt.existentials.begin(), mt.existentials.end(), p.var_id());
    if (!p.is_var() || it == mt.existentials.end()) {
      throw std::invalid_argument("metarule head predicate must be an existential variable");
    }
    c.head_p = static_cast<std::uint32_t>(it - mt.existentials.begin());
    c.data_arity = static_cast<std::uint32_t>(mt.clause.head.args.size() - 1);
    c.constrained = mt.constrained;
    c.constrained.resize(mt.clause.body.size(), 0);
    compiled.push_back(std::move(c));
  }
  Template q = compile_query(goal);
  Machine m(background_, builtins_, SolveOptions{}, budget);
  m.set_meta(&spec, &compiled);
  m.seed_program(spec.initial);
  std::vector<std::uint32_t> slots;
  return m.run(q, slots, [&]() {
    std::vector<MetaBinding> program;
    for (const ProgEntry& e : m.prog()) {
      MetaBinding b;
      b.metarule = e.metarule;
      for (std::uint32_t k = 0; k < compiled[e.metarule].existentials; ++k) b.values.push_back(m.extract(e.base + k));
      program.push_back(std::move(b));
    }
    if (!accept(program)) return false;
    m.count_answer();
    return true;
  });
}

}  // namespace topmil
