#include "pmc/encoding.hpp"

#include <functional>
#include <sstream>

namespace pmc {

TermPtr Term::var(std::string name) {
  auto t = std::shared_ptr<Term>(new Term(Kind::Var));
  t->var_ = std::move(name);
  return t;
}

TermPtr Term::integer(std::int64_t v) {
  auto t = std::shared_ptr<Term>(new Term(Kind::Const));
  t->value_ = v;
  return t;
}

TermPtr Term::boolean(bool v) {
  auto t = std::shared_ptr<Term>(new Term(Kind::BoolConst));
  t->value_ = v ? 1 : 0;
  return t;
}

TermPtr Term::add(std::vector<TermPtr> xs) {
  if (xs.size() == 1) return xs[0];
  auto t = std::shared_ptr<Term>(new Term(Kind::Add));
  t->args_ = std::move(xs);
  return t;
}

TermPtr Term::sub(TermPtr a, TermPtr b) {
  auto t = std::shared_ptr<Term>(new Term(Kind::Sub));
  t->args_ = {std::move(a), std::move(b)};
  return t;
}

TermPtr Term::eq(TermPtr a, TermPtr b) {
  auto t = std::shared_ptr<Term>(new Term(Kind::Eq));
  t->args_ = {std::move(a), std::move(b)};
  return t;
}

TermPtr Term::le(TermPtr a, TermPtr b) {
  auto t = std::shared_ptr<Term>(new Term(Kind::Le));
  t->args_ = {std::move(a), std::move(b)};
  return t;
}

TermPtr Term::ge(TermPtr a, TermPtr b) {
  auto t = std::shared_ptr<Term>(new Term(Kind::Ge));
  t->args_ = {std::move(a), std::move(b)};
  return t;
}

TermPtr Term::negate(TermPtr a) {
  auto t = std::shared_ptr<Term>(new Term(Kind::Not));
  t->args_ = {std::move(a)};
  return t;
}

TermPtr Term::conj(std::vector<TermPtr> xs) {
  std::vector<TermPtr> kept;
  for (auto& x : xs) {
    if (x->kind() == Kind::BoolConst) {
      if (!x->bool_value()) return boolean(false);
      continue;
    }
    kept.push_back(std::move(x));
  }
  if (kept.empty()) return boolean(true);
  if (kept.size() == 1) return kept[0];
  auto t = std::shared_ptr<Term>(new Term(Kind::And));
  t->args_ = std::move(kept);
  return t;
}

TermPtr Term::disj(std::vector<TermPtr> xs) {
  std::vector<TermPtr> kept;
  for (auto& x : xs) {
    if (x->kind() == Kind::BoolConst) {
      if (x->bool_value()) return boolean(true);
      continue;
    }
    kept.push_back(std::move(x));
  }
  if (kept.empty()) return boolean(false);
  if (kept.size() == 1) return kept[0];
  auto t = std::shared_ptr<Term>(new Term(Kind::Or));
  t->args_ = std::move(kept);
  return t;
}

namespace {

void render(const Term& t, std::ostringstream& os) {
  switch (t.kind()) {
    case Term::Kind::Var:
      os << t.var();
      return;
    case Term::Kind::Const:
      if (t.value() < 0) os << "(- " << -t.value() << ")";
      else os << t.value();
      return;
    case Term::Kind::BoolConst:
      os << (t.bool_value() ? "true" : "false");
      return;
    default:
      break;
  }
  const char* op = nullptr;
  switch (t.kind()) {
    case Term::Kind::Add: op = "+"; break;
    case Term::Kind::Sub: op = "-"; break;
    case Term::Kind::Eq: op = "="; break;
    case Term::Kind::Le: op = "<="; break;
    case Term::Kind::Ge: op = ">="; break;
    case Term::Kind::Not: op = "not"; break;
    case Term::Kind::And: op = "and"; break;
    case Term::Kind::Or: op = "or"; break;
    default: op = "?"; break;
  }
  os << "(" << op;
  for (const auto& a : t.args()) {
    os << " ";
    render(*a, os);
  }
  os << ")";
}

}  // namespace

std::string Term::smt() const {
  std::ostringstream os;
  render(*this, os);
  return os.str();
}

std::int64_t Term::eval_int(const std::map<std::string, std::int64_t>& env) const {
  switch (kind_) {
    case Kind::Var: {
      auto it = env.find(var_);
      if (it == env.end()) throw UnknownIdError(var_);
      return it->second;
    }
    case Kind::Const:
      return value_;
    case Kind::Add: {
      std::int64_t s = 0;
      for (const auto& a : args_) s += a->eval_int(env);
      return s;
    }
    case Kind::Sub:
      return args_[0]->eval_int(env) - args_[1]->eval_int(env);
    default:
      throw Error("eval_int on a Boolean term");
  }
}

bool Term::eval_bool(const std::map<std::string, std::int64_t>& env) const {
  switch (kind_) {
    case Kind::BoolConst:
      return bool_value();
    case Kind::Eq:
      return args_[0]->eval_int(env) == args_[1]->eval_int(env);
    case Kind::Le:
      return args_[0]->eval_int(env) <= args_[1]->eval_int(env);
    case Kind::Ge:
      return args_[0]->eval_int(env) >= args_[1]->eval_int(env);
    case Kind::Not:
      return !args_[0]->eval_bool(env);
    case Kind::And:
      for (const auto& a : args_)
        if (!a->eval_bool(env)) return false;
      return true;
    case Kind::Or:
      for (const auto& a : args_)
        if (a->eval_bool(env)) return true;
      return false;
    default:
      throw Error("eval_bool on an arithmetic term");
  }
}

VarVec GenerationCounter::fresh() {
  VarVec v;
  v.generation = next_++;
  v.names.reserve(net_->places().size());
  for (const auto& p : net_->places())
    v.names.push_back("x" + std::to_string(v.generation) + "_" + p);
  return v;
}

TermPtr encode_enabled(const PetriNet& net, const std::string& t, const VarVec& x) {
  std::vector<TermPtr> parts;
  const auto& places = net.places();
  for (std::size_t i = 0; i < places.size(); ++i) {
    Tokens w = net.pre_weight(t, places[i]);
    if (w == 0) continue;
    parts.push_back(Term::ge(Term::var(x[i]), Term::integer(static_cast<std::int64_t>(w))));
  }
  return Term::conj(std::move(parts));
}

TermPtr encode_delta(const PetriNet& net, const std::string& t, const VarVec& x, const VarVec& xp) {
  // Full conjunction over all places, including unchanged ones.
  std::vector<TermPtr> parts;
  const auto& places = net.places();
  for (std::size_t i = 0; i < places.size(); ++i) {
    std::int64_t delta = static_cast<std::int64_t>(net.post_weight(t, places[i])) -
                         static_cast<std::int64_t>(net.pre_weight(t, places[i]));
    TermPtr rhs = delta == 0 ? Term::var(x[i])
                             : Term::add({Term::var(x[i]), Term::integer(delta)});
    parts.push_back(Term::eq(Term::var(xp[i]), rhs));
  }
  return Term::conj(std::move(parts));
}

TermPtr encode_eq(const VarVec& x, const VarVec& xp) {
  std::vector<TermPtr> parts;
  for (std::size_t i = 0; i < x.size(); ++i)
    parts.push_back(Term::eq(Term::var(x[i]), Term::var(xp[i])));
  return Term::conj(std::move(parts));
}

TermPtr encode_fire(const PetriNet& net, const std::string& t, const VarVec& x, const VarVec& xp) {
  return Term::disj({encode_eq(x, xp),
                     Term::conj({encode_enabled(net, t, x), encode_delta(net, t, x, xp)})});
}

TermPtr encode_transition_relation(const PetriNet& net, const VarVec& x, const VarVec& xp) {
  std::vector<TermPtr> parts{encode_eq(x, xp)};
  for (const auto& t : net.transitions())
    parts.push_back(Term::conj({encode_enabled(net, t, x), encode_delta(net, t, x, xp)}));
  return Term::disj(std::move(parts));
}

TermPtr marking_term(const PetriNet& net, const Marking& m, const VarVec& x) {
  std::vector<TermPtr> parts;
  const auto& places = net.places();
  for (std::size_t i = 0; i < places.size(); ++i)
    parts.push_back(Term::eq(Term::var(x[i]),
                             Term::integer(static_cast<std::int64_t>(m.at(places[i])))));
  return Term::conj(std::move(parts));
}

TermPtr cover_cube(const PetriNet& net, const Marking& m, const VarVec& x) {
  std::vector<TermPtr> parts;
  const auto& places = net.places();
  for (std::size_t i = 0; i < places.size(); ++i) {
    Tokens n = m.at(places[i]);
    if (n == 0) continue;
    parts.push_back(Term::ge(Term::var(x[i]), Term::integer(static_cast<std::int64_t>(n))));
  }
  return Term::conj(std::move(parts));
}

namespace {

TermPtr expr_term(const LinearExpr& e, const std::map<std::string, TermPtr>& vars) {
  std::vector<TermPtr> pos, neg;
  for (const auto& [v, c] : e.coef) {
    auto it = vars.find(v);
    TermPtr base = it != vars.end() ? it->second : Term::var(v);
    std::int64_t a = c >= 0 ? c : -c;
    TermPtr scaled = base;
    if (a != 1) {
      // Keep QF-LIA linear: repeat-addition for small coefficients.
      std::vector<TermPtr> copies;
      for (std::int64_t i = 0; i < a; ++i) copies.push_back(base);
      scaled = Term::add(std::move(copies));
    }
    (c >= 0 ? pos : neg).push_back(scaled);
  }
  if (e.constant > 0) pos.push_back(Term::integer(e.constant));
  if (e.constant < 0) neg.push_back(Term::integer(-e.constant));
  TermPtr lhs = pos.empty() ? Term::integer(0) : Term::add(std::move(pos));
  if (neg.empty()) return lhs;
  return Term::sub(lhs, Term::add(std::move(neg)));
}

}  // namespace

TermPtr formula_term(const PetriNet& net, const FormulaPtr& f, const VarVec& x,
                     std::vector<std::string>* bound_vars_out) {
  std::map<std::string, TermPtr> vars;
  const auto& places = net.places();
  for (std::size_t i = 0; i < places.size(); ++i) vars[places[i]] = Term::var(x[i]);

  std::function<TermPtr(const FormulaPtr&)> go = [&](const FormulaPtr& g) -> TermPtr {
    switch (g->kind()) {
      case Formula::Kind::True:
        return Term::boolean(true);
      case Formula::Kind::False:
        return Term::boolean(false);
      case Formula::Kind::Atom: {
        const Atom& a = g->atom();
        TermPtr lhs = expr_term(a.expr, vars);
        TermPtr rhs = Term::integer(a.bound);
        switch (a.cmp) {
          case Cmp::Eq: return Term::eq(lhs, rhs);
          case Cmp::Le: return Term::le(lhs, rhs);
          case Cmp::Ge: return Term::ge(lhs, rhs);
        }
        return Term::boolean(false);
      }
      case Formula::Kind::And: {
        std::vector<TermPtr> kids;
        for (const auto& c : g->children()) kids.push_back(go(c));
        return Term::conj(std::move(kids));
      }
      case Formula::Kind::Or: {
        std::vector<TermPtr> kids;
        for (const auto& c : g->children()) kids.push_back(go(c));
        return Term::disj(std::move(kids));
      }
      case Formula::Kind::Exists: {
        // The existential block is absorbed by satisfiability: bound
        // variables become plain solver constants the caller declares.
        if (bound_vars_out) {
          for (const auto& v : g->bound_vars()) bound_vars_out->push_back(v);
        } else {
          throw Error("existential block in a context that cannot absorb it");
        }
        std::map<std::string, TermPtr> saved;
        for (const auto& v : g->bound_vars()) {
          auto it = vars.find(v);
          if (it != vars.end()) {
            saved.emplace(v, it->second);
            vars.erase(it);
          }
        }
        TermPtr body = go(g->body());
        for (auto& [v, t] : saved) vars[v] = t;
        return body;
      }
    }
    return Term::boolean(false);
  };
  return go(f);
}

Unrolling unroll(const PetriNet& net, const Marking& m0, std::size_t k, GenerationCounter& gen) {
  Unrolling u;
  u.generations.push_back(gen.fresh());
  u.layers.push_back(marking_term(net, m0, u.generations[0]));
  for (std::size_t i = 0; i < k; ++i) {
    u.generations.push_back(gen.fresh());
    u.layers.push_back(
        encode_transition_relation(net, u.generations[i], u.generations[i + 1]));
  }
  return u;
}

Marking marking_from_values(const PetriNet& net, const VarVec& x,
                            const std::map<std::string, std::int64_t>& values) {
  Marking m;
  const auto& places = net.places();
  for (std::size_t i = 0; i < places.size(); ++i) {
    auto it = values.find(x[i]);
    if (it == values.end()) throw Error("model missing variable " + x[i]);
    if (it->second < 0) throw Error("negative token count in model for " + x[i]);
    m.set(places[i], static_cast<Tokens>(it->second));
  }
  return m;
}

}  // namespace pmc
