#include "pmc/formula.hpp"

#include <algorithm>
#include <sstream>

namespace pmc {

LinearExpr LinearExpr::var(const std::string& v, std::int64_t c) {
  LinearExpr e;
  if (c != 0) e.coef[v] = c;
  return e;
}

LinearExpr LinearExpr::lit(std::int64_t k) {
  LinearExpr e;
  e.constant = k;
  return e;
}

LinearExpr& LinearExpr::add(const LinearExpr& other, std::int64_t scale) {
  for (const auto& [v, c] : other.coef) {
    std::int64_t n = coef[v] + scale * c;
    if (n == 0) coef.erase(v);
    else coef[v] = n;
  }
  constant += scale * other.constant;
  return *this;
}

bool LinearExpr::is_single_var() const {
  return constant == 0 && coef.size() == 1 && coef.begin()->second == 1;
}

std::string LinearExpr::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : coef) {
    if (first) {
      if (c == 1) os << v;
      else if (c == -1) os << "-" << v;
      else os << c << "*" << v;
    } else {
      if (c >= 0) os << " + ";
      else os << " - ";
      std::int64_t a = c >= 0 ? c : -c;
      if (a == 1) os << v;
      else os << a << "*" << v;
    }
    first = false;
  }
  if (constant != 0 || first) {
    if (first) os << constant;
    else if (constant > 0) os << " + " << constant;
    else os << " - " << -constant;
  }
  return os.str();
}

std::string Atom::to_string() const {
  const char* op = cmp == Cmp::Eq ? "=" : cmp == Cmp::Le ? "<=" : ">=";
  return expr.to_string() + " " + op + " " + std::to_string(bound);
}

FormulaPtr Formula::make_true() {
  static FormulaPtr t(new Formula(Kind::True));
  return t;
}

FormulaPtr Formula::make_false() {
  static FormulaPtr f(new Formula(Kind::False));
  return f;
}

FormulaPtr Formula::make_atom(Atom a) {
  if (a.expr.coef.empty()) {
    // Ground atom: fold to a constant.
    bool v = a.cmp == Cmp::Eq ? a.expr.constant == a.bound
           : a.cmp == Cmp::Le ? a.expr.constant <= a.bound
                              : a.expr.constant >= a.bound;
    return v ? make_true() : make_false();
  }
  // Move the expression's constant into the bound.
  a.bound -= a.expr.constant;
  a.expr.constant = 0;
  auto f = std::shared_ptr<Formula>(new Formula(Kind::Atom));
  f->atom_ = std::move(a);
  return f;
}

FormulaPtr Formula::make_atom(LinearExpr e, Cmp cmp, std::int64_t k) {
  Atom a;
  a.expr = std::move(e);
  a.cmp = cmp;
  a.bound = k;
  return make_atom(std::move(a));
}

FormulaPtr Formula::make_lt(LinearExpr e, std::int64_t k) {
  return make_atom(std::move(e), Cmp::Le, k - 1);
}

FormulaPtr Formula::make_gt(LinearExpr e, std::int64_t k) {
  return make_atom(std::move(e), Cmp::Ge, k + 1);
}

FormulaPtr Formula::make_and(std::vector<FormulaPtr> fs) {
  std::vector<FormulaPtr> kids;
  for (auto& f : fs) {
    if (f->kind() == Kind::False) return make_false();
    if (f->kind() == Kind::True) continue;
    if (f->kind() == Kind::And) {
      for (const auto& c : f->children()) kids.push_back(c);
    } else {
      kids.push_back(std::move(f));
    }
  }
  if (kids.empty()) return make_true();
  if (kids.size() == 1) return kids[0];
  auto f = std::shared_ptr<Formula>(new Formula(Kind::And));
  f->children_ = std::move(kids);
  return f;
}

FormulaPtr Formula::make_or(std::vector<FormulaPtr> fs) {
  std::vector<FormulaPtr> kids;
  for (auto& f : fs) {
    if (f->kind() == Kind::True) return make_true();
    if (f->kind() == Kind::False) continue;
    if (f->kind() == Kind::Or) {
      for (const auto& c : f->children()) kids.push_back(c);
    } else {
      kids.push_back(std::move(f));
    }
  }
  if (kids.empty()) return make_false();
  if (kids.size() == 1) return kids[0];
  auto f = std::shared_ptr<Formula>(new Formula(Kind::Or));
  f->children_ = std::move(kids);
  return f;
}

FormulaPtr Formula::make_exists(std::vector<std::string> vars, FormulaPtr body) {
  if (vars.empty()) return body;
  if (body->kind() == Kind::True || body->kind() == Kind::False) return body;
  auto f = std::shared_ptr<Formula>(new Formula(Kind::Exists));
  f->bound_ = std::move(vars);
  f->children_.push_back(std::move(body));
  return f;
}

FormulaPtr Formula::negate(const FormulaPtr& f) {
  switch (f->kind()) {
    case Kind::True:
      return make_false();
    case Kind::False:
      return make_true();
    case Kind::Atom: {
      const Atom& a = f->atom();
      switch (a.cmp) {
        case Cmp::Le:
          return make_atom(a.expr, Cmp::Ge, a.bound + 1);
        case Cmp::Ge:
          return make_atom(a.expr, Cmp::Le, a.bound - 1);
        case Cmp::Eq:
          return make_or({make_atom(a.expr, Cmp::Le, a.bound - 1),
                          make_atom(a.expr, Cmp::Ge, a.bound + 1)});
      }
      return make_false();
    }
    case Kind::And: {
      std::vector<FormulaPtr> kids;
      for (const auto& c : f->children()) kids.push_back(negate(c));
      return make_or(std::move(kids));
    }
    case Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (const auto& c : f->children()) kids.push_back(negate(c));
      return make_and(std::move(kids));
    }
    case Kind::Exists:
      throw Error("cannot negate an existential block in NNF");
  }
  return make_false();
}

void Formula::collect_free(std::set<std::string>& out, std::set<std::string>& bound) const {
  switch (kind_) {
    case Kind::True:
    case Kind::False:
      return;
    case Kind::Atom:
      for (const auto& [v, c] : atom_.expr.coef) {
        (void)c;
        if (!bound.count(v)) out.insert(v);
      }
      return;
    case Kind::And:
    case Kind::Or:
      for (const auto& c : children_) c->collect_free(out, bound);
      return;
    case Kind::Exists: {
      std::vector<std::string> fresh;
      for (const auto& v : bound_)
        if (bound.insert(v).second) fresh.push_back(v);
      children_[0]->collect_free(out, bound);
      for (const auto& v : fresh) bound.erase(v);
      return;
    }
  }
}

std::set<std::string> Formula::free_vars() const {
  std::set<std::string> out, bound;
  collect_free(out, bound);
  return out;
}

std::string Formula::to_string() const {
  switch (kind_) {
    case Kind::True:
      return "true";
    case Kind::False:
      return "false";
    case Kind::Atom:
      return "(" + atom_.to_string() + ")";
    case Kind::And:
    case Kind::Or: {
      std::string sep = kind_ == Kind::And ? " and " : " or ";
      std::string s = "(";
      for (std::size_t i = 0; i < children_.size(); ++i) {
        if (i) s += sep;
        s += children_[i]->to_string();
      }
      return s + ")";
    }
    case Kind::Exists: {
      std::string s = "(exists (";
      for (std::size_t i = 0; i < bound_.size(); ++i) {
        if (i) s += " ";
        s += bound_[i];
      }
      return s + ") " + children_[0]->to_string() + ")";
    }
  }
  return "?";
}

FormulaPtr Formula::rename(const FormulaPtr& f, const std::map<std::string, std::string>& sub) {
  switch (f->kind()) {
    case Kind::True:
    case Kind::False:
      return f;
    case Kind::Atom: {
      Atom a;
      a.cmp = f->atom().cmp;
      a.bound = f->atom().bound;
      a.expr.constant = f->atom().expr.constant;
      for (const auto& [v, c] : f->atom().expr.coef) {
        auto it = sub.find(v);
        const std::string& nv = it == sub.end() ? v : it->second;
        a.expr.coef[nv] += c;
      }
      for (auto it = a.expr.coef.begin(); it != a.expr.coef.end();)
        it = it->second == 0 ? a.expr.coef.erase(it) : std::next(it);
      return make_atom(std::move(a));
    }
    case Kind::And:
    case Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (const auto& c : f->children()) kids.push_back(rename(c, sub));
      return f->kind() == Kind::And ? make_and(std::move(kids)) : make_or(std::move(kids));
    }
    case Kind::Exists: {
      std::map<std::string, std::string> inner = sub;
      for (const auto& v : f->bound_vars()) inner.erase(v);
      return make_exists(f->bound_vars(), rename(f->body(), inner));
    }
  }
  return f;
}

namespace {

std::int64_t eval_expr(const LinearExpr& e, const std::map<std::string, std::int64_t>& env) {
  std::int64_t sum = e.constant;
  for (const auto& [v, c] : e.coef) {
    auto it = env.find(v);
    if (it == env.end()) throw UnknownIdError(v);
    sum += c * it->second;
  }
  return sum;
}

bool eval_atom(const Atom& a, const std::map<std::string, std::int64_t>& env) {
  std::int64_t val = eval_expr(a.expr, env);
  switch (a.cmp) {
    case Cmp::Eq: return val == a.bound;
    case Cmp::Le: return val <= a.bound;
    case Cmp::Ge: return val >= a.bound;
  }
  return false;
}

// Attempts to solve an existential block over nonnegative integers by
// substitution: repeatedly pick an equality atom in a conjunctive body whose
// unresolved part is a single bound variable and derive its value. Returns
// nullopt when the body is not such a conjunction.
std::optional<bool> eval_exists_by_substitution(const Formula& ex,
                                                std::map<std::string, std::int64_t> env) {
  std::set<std::string> unknown(ex.bound_vars().begin(), ex.bound_vars().end());
  std::vector<const Atom*> atoms;
  std::vector<FormulaPtr> stack{ex.body()};
  while (!stack.empty()) {
    FormulaPtr f = stack.back();
    stack.pop_back();
    switch (f->kind()) {
      case Formula::Kind::True: break;
      case Formula::Kind::False: return false;
      case Formula::Kind::Atom: atoms.push_back(&f->atom()); break;
      case Formula::Kind::And:
        for (const auto& c : f->children()) stack.push_back(c);
        break;
      default:
        return std::nullopt;
    }
  }
  // Note: `atoms` keeps pointers into formulas owned by `ex`, alive here.
  std::vector<bool> used(atoms.size(), false);
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (used[i] || atoms[i]->cmp != Cmp::Eq) continue;
      const Atom& a = *atoms[i];
      std::string pending;
      std::int64_t pending_coef = 0;
      std::int64_t rest = a.expr.constant;
      bool stuck = false;
      for (const auto& [v, c] : a.expr.coef) {
        auto it = env.find(v);
        if (it != env.end()) {
          rest += c * it->second;
        } else if (!unknown.count(v)) {
          throw UnknownIdError(v);
        } else if (pending.empty()) {
          pending = v;
          pending_coef = c;
        } else {
          stuck = true;
          break;
        }
      }
      if (stuck || pending.empty()) continue;
      std::int64_t num = a.bound - rest;
      if (num % pending_coef != 0) return false;
      std::int64_t val = num / pending_coef;
      if (val < 0) return false;  // bound variables range over naturals
      env[pending] = val;
      unknown.erase(pending);
      used[i] = true;
      progress = true;
    }
  }
  if (!unknown.empty()) return std::nullopt;
  for (const Atom* a : atoms)
    if (!eval_atom(*a, env)) return false;
  return true;
}

bool eval_rec(const FormulaPtr& f, std::map<std::string, std::int64_t>& env) {
  switch (f->kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: return eval_atom(f->atom(), env);
    case Formula::Kind::And:
      for (const auto& c : f->children())
        if (!eval_rec(c, env)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f->children())
        if (eval_rec(c, env)) return true;
      return false;
    case Formula::Kind::Exists: {
      auto direct = eval_exists_by_substitution(*f, env);
      if (direct.has_value()) return *direct;
      throw UnboundedEvalError();
    }
  }
  return false;
}

}  // namespace

bool evaluate_assignment(const FormulaPtr& f, const std::map<std::string, std::int64_t>& env) {
  auto copy = env;
  return eval_rec(f, copy);
}

bool evaluate(const FormulaPtr& f, const Marking& m, const std::vector<std::string>& domain) {
  std::map<std::string, std::int64_t> env;
  for (const auto& p : domain) env[p] = static_cast<std::int64_t>(m.at(p));
  // Unbound free variables surface as UnknownIdError during evaluation.
  return eval_rec(f, env);
}

FormulaPtr marking_cube(const PetriNet& net, const Marking& m) {
  std::vector<FormulaPtr> atoms;
  for (const auto& p : net.places())
    atoms.push_back(Formula::make_atom(LinearExpr::var(p), Cmp::Eq,
                                       static_cast<std::int64_t>(m.at(p))));
  return Formula::make_and(std::move(atoms));
}

FormulaPtr enabled_predicate(const PetriNet& net, const std::string& t) {
  std::vector<FormulaPtr> atoms;
  for (const auto& [p, w] : net.pre(t))
    atoms.push_back(Formula::make_atom(LinearExpr::var(p), Cmp::Ge,
                                       static_cast<std::int64_t>(w)));
  return Formula::make_and(std::move(atoms));
}

FormulaPtr dead_predicate(const PetriNet& net) {
  std::vector<FormulaPtr> parts;
  for (const auto& t : net.transitions())
    parts.push_back(Formula::negate(enabled_predicate(net, t)));
  return Formula::make_and(std::move(parts));
}

FormulaPtr bounded_predicate(const PetriNet& net, Tokens k) {
  std::vector<FormulaPtr> atoms;
  for (const auto& p : net.places())
    atoms.push_back(Formula::make_atom(LinearExpr::var(p), Cmp::Le,
                                       static_cast<std::int64_t>(k)));
  return Formula::make_and(std::move(atoms));
}

bool is_syntactically_monotonic_goal(const FormulaPtr& f) {
  switch (f->kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
      return true;
    case Formula::Kind::Atom: {
      const Atom& a = f->atom();
      if (a.cmp != Cmp::Ge) return false;
      for (const auto& [v, c] : a.expr.coef) {
        (void)v;
        if (c < 0) return false;
      }
      return true;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (const auto& c : f->children())
        if (!is_syntactically_monotonic_goal(c)) return false;
      return true;
    case Formula::Kind::Exists:
      return false;
  }
  return false;
}

std::string Verdict::kind_string() const {
  switch (kind) {
    case Kind::Reachable: return "Reachable";
    case Kind::Unreachable: return "Unreachable";
    case Kind::Invariant: return "Invariant";
    case Kind::NotInvariant: return "NotInvariant";
    case Kind::Unknown: return "Unknown";
  }
  return "Unknown";
}

}  // namespace pmc
