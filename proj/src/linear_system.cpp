#include "pmc/linear_system.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "pmc/bounded_solve.hpp"

namespace pmc {

std::string SysConstraint::to_string() const {
  return lhs.to_string() + (cmp == Cmp::Eq ? " = " : " <= ") + rhs.to_string();
}

void LinearSystem::add_eq(LinearExpr lhs, LinearExpr rhs) {
  constraints_.push_back({std::move(lhs), Cmp::Eq, std::move(rhs)});
}

void LinearSystem::add_le(LinearExpr lhs, LinearExpr rhs) {
  constraints_.push_back({std::move(lhs), Cmp::Le, std::move(rhs)});
}

void LinearSystem::append(const LinearSystem& other) {
  for (const auto& c : other.constraints_) constraints_.push_back(c);
}

std::set<std::string> LinearSystem::vars() const {
  std::set<std::string> out;
  for (const auto& c : constraints_) {
    for (const auto& [v, w] : c.lhs.coef) { (void)w; out.insert(v); }
    for (const auto& [v, w] : c.rhs.coef) { (void)w; out.insert(v); }
  }
  return out;
}

std::set<std::string> LinearSystem::fresh_vars(const std::vector<std::string>& p1,
                                               const std::vector<std::string>& p2) const {
  std::set<std::string> out = vars();
  for (const auto& p : p1) out.erase(p);
  for (const auto& p : p2) out.erase(p);
  return out;
}

FormulaPtr LinearSystem::to_formula() const {
  std::vector<FormulaPtr> atoms;
  for (const auto& c : constraints_) {
    LinearExpr diff = c.lhs;
    diff.add(c.rhs, -1);
    atoms.push_back(Formula::make_atom(std::move(diff), c.cmp, 0));
  }
  return Formula::make_and(std::move(atoms));
}

std::string LinearSystem::to_text() const {
  std::ostringstream os;
  for (const auto& c : constraints_) os << c.to_string() << "\n";
  return os.str();
}

namespace {

LinearExpr rename_expr(const LinearExpr& e, const std::map<std::string, std::string>& sub) {
  LinearExpr out;
  out.constant = e.constant;
  for (const auto& [v, c] : e.coef) {
    auto it = sub.find(v);
    out.coef[it == sub.end() ? v : it->second] += c;
  }
  return out;
}

FormulaPtr renamed_system_formula(const LinearSystem& E,
                                  const std::map<std::string, std::string>& sub) {
  std::vector<FormulaPtr> atoms;
  for (const auto& c : E.constraints()) {
    LinearExpr diff = rename_expr(c.lhs, sub);
    diff.add(rename_expr(c.rhs, sub), -1);
    atoms.push_back(Formula::make_atom(std::move(diff), c.cmp, 0));
  }
  return Formula::make_and(std::move(atoms));
}

}  // namespace

FormulaPtr make_tilde_E(const LinearSystem& E,
                        const std::vector<std::string>& p1,
                        const std::vector<std::string>& p2,
                        const std::vector<std::string>& x,
                        const std::vector<std::string>& y) {
  if (x.size() != p1.size() || y.size() != p2.size())
    throw Error("make_tilde_E: variable vector length mismatch");
  // P1 names are substituted first; P2 names not already taken by the first
  // pass get the y renaming.
  std::map<std::string, std::string> sub;
  for (std::size_t j = 0; j < p2.size(); ++j) sub[p2[j]] = y[j];
  for (std::size_t i = 0; i < p1.size(); ++i) sub[p1[i]] = x[i];
  std::vector<FormulaPtr> parts{renamed_system_formula(E, sub)};
  for (std::size_t i = 0; i < p1.size(); ++i) {
    auto it = std::find(p2.begin(), p2.end(), p1[i]);
    if (it != p2.end()) {
      std::size_t j = static_cast<std::size_t>(it - p2.begin());
      LinearExpr diff = LinearExpr::var(x[i]);
      diff.add(LinearExpr::var(y[j]), -1);
      parts.push_back(Formula::make_atom(std::move(diff), Cmp::Eq, 0));
    }
  }
  return Formula::make_and(std::move(parts));
}

FormulaPtr e_transform(const FormulaPtr& f1, const LinearSystem& E,
                       const std::vector<std::string>& p1,
                       const std::vector<std::string>& p2) {
  // x block: one renamed variable per N1 place, plus the system's fresh
  // variables. y variables are the N2 place names themselves.
  std::vector<std::string> x;
  x.reserve(p1.size());
  for (const auto& p : p1) x.push_back("e!" + p);

  FormulaPtr tilde = make_tilde_E(E, p1, p2, x, p2);

  // Hygiene: free variables of F1 outside P1 must not collide with the
  // system's fresh variables; alpha-rename them out of the way.
  std::set<std::string> p1set(p1.begin(), p1.end());
  std::set<std::string> fresh = E.fresh_vars(p1, p2);
  std::map<std::string, std::string> sub;
  for (const auto& v : f1->free_vars()) {
    if (p1set.count(v)) continue;
    if (fresh.count(v)) sub[v] = "g!" + v;
  }
  for (std::size_t i = 0; i < p1.size(); ++i) sub[p1[i]] = x[i];
  FormulaPtr goal = Formula::rename(f1, sub);

  std::vector<std::string> bound = x;
  for (const auto& v : fresh) bound.push_back(v);
  return Formula::make_exists(std::move(bound),
                              Formula::make_and({tilde, goal}));
}

namespace {

void add_system_rows(BoundedEnumerator& en, const LinearSystem& E) {
  for (const auto& c : E.constraints()) {
    LinearExpr diff = c.lhs;
    diff.add(c.rhs, -1);
    en.add_row(diff.coef, c.cmp == Cmp::Eq ? 0 : 1, -diff.constant);
  }
}

}  // namespace

std::uint64_t count_preimage(const LinearSystem& E,
                             const std::vector<std::string>& p1,
                             const std::vector<std::string>& p2,
                             const Marking& m2,
                             std::int64_t bound) {
  BoundedEnumerator en;
  add_system_rows(en, E);
  for (const auto& p : p1) en.add_var(p);
  for (const auto& p : p2) {
    en.add_var(p);
    en.fix_var(p, static_cast<std::int64_t>(m2.at(p)));
  }
  en.cap_all(bound);
  // Fresh variables may legitimately stay unbounded only if the N1 places
  // are all determined; the enumerator insists on finite ranges, which is
  // the spec's "each N1-variable bounded" requirement extended to the whole
  // solution space it walks.
  std::set<std::vector<std::int64_t>> projections;
  en.enumerate([&](const std::map<std::string, std::int64_t>& sol) {
    std::vector<std::int64_t> proj;
    proj.reserve(p1.size());
    for (const auto& p : p1) {
      auto it = sol.find(p);
      proj.push_back(it == sol.end() ? 0 : it->second);
    }
    projections.insert(std::move(proj));
    return true;
  });
  return projections.size();
}

std::vector<Marking> solve_for(const LinearSystem& E,
                               const std::vector<std::string>& targets,
                               const Marking& given,
                               const std::vector<std::string>& given_domain,
                               std::int64_t bound,
                               std::uint64_t max_solutions) {
  BoundedEnumerator en;
  add_system_rows(en, E);
  for (const auto& p : targets) en.add_var(p);
  for (const auto& p : given_domain) {
    en.add_var(p);
    en.fix_var(p, static_cast<std::int64_t>(given.at(p)));
  }
  en.cap_all(bound);
  std::set<std::vector<std::int64_t>> seen;
  std::vector<Marking> out;
  bool complete = en.enumerate([&](const std::map<std::string, std::int64_t>& sol) {
    std::vector<std::int64_t> proj;
    proj.reserve(targets.size());
    for (const auto& p : targets) {
      auto it = sol.find(p);
      proj.push_back(it == sol.end() ? 0 : it->second);
    }
    if (seen.insert(proj).second) {
      Marking m;
      for (std::size_t i = 0; i < targets.size(); ++i)
        m.set(targets[i], static_cast<Tokens>(proj[i]));
      out.push_back(std::move(m));
    }
    return true;
  }, max_solutions);
  if (!complete) throw Error("solve_for: solution budget exceeded");
  return out;
}

}  // namespace pmc
