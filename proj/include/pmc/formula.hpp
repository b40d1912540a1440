#ifndef PMC_FORMULA_HPP
#define PMC_FORMULA_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pmc/net.hpp"

namespace pmc {

// Linear combination of integer variables plus a constant.
struct LinearExpr {
  std::map<std::string, std::int64_t> coef;
  std::int64_t constant = 0;

  LinearExpr() = default;
  static LinearExpr var(const std::string& v, std::int64_t c = 1);
  static LinearExpr lit(std::int64_t k);

  LinearExpr& add(const LinearExpr& other, std::int64_t scale = 1);
  bool is_single_var() const;
  std::string to_string() const;
};

enum class Cmp { Eq, Le, Ge };

// Canonical atom: expr cmp constant. Strict comparators are normalized
// away over the integers when formulas are built (x > k becomes x >= k+1).
struct Atom {
  LinearExpr expr;
  Cmp cmp = Cmp::Eq;
  std::int64_t bound = 0;

  std::string to_string() const;
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Formulas are immutable trees in negation normal form: atoms, conjunction,
// disjunction and an optional leading existential block. Negation is applied
// structurally at construction time.
class Formula {
 public:
  enum class Kind { True, False, Atom, And, Or, Exists };

  Kind kind() const { return kind_; }
  const Atom& atom() const { return atom_; }
  const std::vector<FormulaPtr>& children() const { return children_; }
  const std::vector<std::string>& bound_vars() const { return bound_; }
  const FormulaPtr& body() const { return children_[0]; }

  static FormulaPtr make_true();
  static FormulaPtr make_false();
  static FormulaPtr make_atom(Atom a);
  static FormulaPtr make_atom(LinearExpr e, Cmp cmp, std::int64_t k);
  // Strict forms, normalized to the canonical comparators.
  static FormulaPtr make_lt(LinearExpr e, std::int64_t k);
  static FormulaPtr make_gt(LinearExpr e, std::int64_t k);
  static FormulaPtr make_and(std::vector<FormulaPtr> fs);
  static FormulaPtr make_or(std::vector<FormulaPtr> fs);
  static FormulaPtr make_exists(std::vector<std::string> vars, FormulaPtr body);
  static FormulaPtr negate(const FormulaPtr& f);

  std::set<std::string> free_vars() const;
  std::string to_string() const;

  // Renames free variables; bound variables shadow the substitution.
  static FormulaPtr rename(const FormulaPtr& f, const std::map<std::string, std::string>& sub);

 private:
  Formula(Kind k) : kind_(k) {}
  Kind kind_;
  Atom atom_;
  std::vector<FormulaPtr> children_;
  std::vector<std::string> bound_;

  void collect_free(std::set<std::string>& out, std::set<std::string>& bound) const;
};

// Evaluation under a marking. Free variables must lie in `domain` (value
// taken from the marking, absent entries are zero) or be existentially
// bound. Existential blocks are solved by bounded search when the body
// makes every bound variable finitely enumerable; otherwise evaluation
// reports failure through UnboundedEvalError and the caller falls back to
// the solver.
struct UnboundedEvalError : Error {
  UnboundedEvalError() : Error("existential block not enumerable by substitution") {}
};

bool evaluate(const FormulaPtr& f, const Marking& m, const std::vector<std::string>& domain);
bool evaluate_assignment(const FormulaPtr& f, const std::map<std::string, std::int64_t>& env);

// Predicate constructors over a net's places.
FormulaPtr marking_cube(const PetriNet& net, const Marking& m);
FormulaPtr enabled_predicate(const PetriNet& net, const std::string& t);
FormulaPtr dead_predicate(const PetriNet& net);
FormulaPtr bounded_predicate(const PetriNet& net, Tokens k);

// Sufficient syntactic test for upward-closed (monotonic) goals: And/Or
// combinations of atoms sum(a_i x_i) >= k with nonnegative coefficients.
bool is_syntactically_monotonic_goal(const FormulaPtr& f);

// Verdict of a query, shared by all decision procedures.
struct Verdict {
  enum class Kind { Reachable, Unreachable, Invariant, NotInvariant, Unknown };
  Kind kind = Kind::Unknown;
  std::optional<FiringSequence> witness;
  std::optional<Marking> witness_marking;
  std::string method;
  std::string reason;

  bool definitive() const { return kind != Kind::Unknown; }
  std::string kind_string() const;
};

}  // namespace pmc

#endif
