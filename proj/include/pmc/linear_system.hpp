#ifndef PMC_LINEAR_SYSTEM_HPP
#define PMC_LINEAR_SYSTEM_HPP

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "pmc/formula.hpp"

namespace pmc {

// One reduction constraint: lhs = rhs or lhs <= rhs between linear
// combinations of place variables and fresh variables.
struct SysConstraint {
  LinearExpr lhs;
  Cmp cmp = Cmp::Eq;  // Eq or Le only
  LinearExpr rhs;

  std::string to_string() const;
};

// Ordered conjunction of reduction constraints; the polyhedral abstraction.
class LinearSystem {
 public:
  void add_eq(LinearExpr lhs, LinearExpr rhs);
  void add_le(LinearExpr lhs, LinearExpr rhs);
  void append(const LinearSystem& other);

  const std::vector<SysConstraint>& constraints() const { return constraints_; }
  bool empty() const { return constraints_.empty(); }

  std::set<std::string> vars() const;
  // Variables occurring in the system but in neither place set.
  std::set<std::string> fresh_vars(const std::vector<std::string>& p1,
                                   const std::vector<std::string>& p2) const;

  FormulaPtr to_formula() const;
  // One constraint per line, in the order produced.
  std::string to_text() const;

 private:
  std::vector<SysConstraint> constraints_;
};

// Renamed system: E with P1 names mapped to x-variables and P2 names to
// y-variables, plus equalities x_i = y_j for places shared by both nets.
FormulaPtr make_tilde_E(const LinearSystem& E,
                        const std::vector<std::string>& p1,
                        const std::vector<std::string>& p2,
                        const std::vector<std::string>& x,
                        const std::vector<std::string>& y);

// E-transform of a goal over N1's places into a formula over N2's places:
// exists x, fresh. tilde_E(x, y) and F1(x), with y named by the P2 places
// themselves and the x block alpha-renamed away from them.
FormulaPtr e_transform(const FormulaPtr& f1, const LinearSystem& E,
                       const std::vector<std::string>& p1,
                       const std::vector<std::string>& p2);

// Number of distinct N1-markings compatible with m2 under E, by bounded
// enumeration. Throws UnboundedPreimageError when some N1 variable is not
// bounded by E and m2.
std::uint64_t count_preimage(const LinearSystem& E,
                             const std::vector<std::string>& p1,
                             const std::vector<std::string>& p2,
                             const Marking& m2,
                             std::int64_t bound);

// Enumerates the markings over `targets` compatible with the fixed marking
// `given` (over `given_domain`) under E. Used by the equivalence oracle.
std::vector<Marking> solve_for(const LinearSystem& E,
                               const std::vector<std::string>& targets,
                               const Marking& given,
                               const std::vector<std::string>& given_domain,
                               std::int64_t bound,
                               std::uint64_t max_solutions = 1u << 20);

}  // namespace pmc

#endif
