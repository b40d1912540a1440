#ifndef PMC_ENCODING_HPP
#define PMC_ENCODING_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pmc/formula.hpp"
#include "pmc/net.hpp"

namespace pmc {

// First-order term over integer constants, variables, linear arithmetic and
// Boolean connectives. Immutable; shared subterms are fine.
class Term;
using TermPtr = std::shared_ptr<const Term>;

class Term {
 public:
  enum class Kind { Var, Const, Add, Sub, Eq, Le, Ge, Not, And, Or, BoolConst };

  Kind kind() const { return kind_; }
  const std::string& var() const { return var_; }
  std::int64_t value() const { return value_; }
  bool bool_value() const { return value_ != 0; }
  const std::vector<TermPtr>& args() const { return args_; }

  static TermPtr var(std::string name);
  static TermPtr integer(std::int64_t v);
  static TermPtr boolean(bool v);
  static TermPtr add(std::vector<TermPtr> xs);
  static TermPtr sub(TermPtr a, TermPtr b);
  static TermPtr eq(TermPtr a, TermPtr b);
  static TermPtr le(TermPtr a, TermPtr b);
  static TermPtr ge(TermPtr a, TermPtr b);
  static TermPtr negate(TermPtr a);
  static TermPtr conj(std::vector<TermPtr> xs);
  static TermPtr disj(std::vector<TermPtr> xs);

  // SMT-LIB rendering; deterministic.
  std::string smt() const;

  // Semantic evaluation under an integer assignment (for the encoding
  // oracle checks); throws UnknownIdError on unassigned variables.
  bool eval_bool(const std::map<std::string, std::int64_t>& env) const;
  std::int64_t eval_int(const std::map<std::string, std::int64_t>& env) const;

 private:
  explicit Term(Kind k) : kind_(k) {}
  Kind kind_;
  std::string var_;
  std::int64_t value_ = 0;
  std::vector<TermPtr> args_;
};

// One generation of marking variables, one per place, in place order.
struct VarVec {
  std::vector<std::string> names;
  std::size_t generation = 0;

  const std::string& operator[](std::size_t i) const { return names[i]; }
  std::size_t size() const { return names.size(); }
};

// Allocates pairwise-disjoint generations x0_, x1_, ... for one procedure
// instance. Not shared across threads.
class GenerationCounter {
 public:
  explicit GenerationCounter(const PetriNet& net) : net_(&net) {}
  VarVec fresh();
  std::size_t next_index() const { return next_; }

 private:
  const PetriNet* net_;
  std::size_t next_ = 0;
};

// Eq. 10-14 operators.
TermPtr encode_enabled(const PetriNet& net, const std::string& t, const VarVec& x);
TermPtr encode_delta(const PetriNet& net, const std::string& t, const VarVec& x, const VarVec& xp);
TermPtr encode_eq(const VarVec& x, const VarVec& xp);
TermPtr encode_fire(const PetriNet& net, const std::string& t, const VarVec& x, const VarVec& xp);
TermPtr encode_transition_relation(const PetriNet& net, const VarVec& x, const VarVec& xp);

TermPtr marking_term(const PetriNet& net, const Marking& m, const VarVec& x);
TermPtr cover_cube(const PetriNet& net, const Marking& m, const VarVec& x);

// Formula over place names instantiated at a generation; bound variables
// become existential block names handled by the caller (they are emitted as
// plain variables here and must be declared by the caller).
TermPtr formula_term(const PetriNet& net, const FormulaPtr& f, const VarVec& x,
                     std::vector<std::string>* bound_vars_out = nullptr);

// phi_k unrolling: phi_0 = m0(x0), phi_{i+1} = phi_i and T(x_i, x_{i+1}).
struct Unrolling {
  std::vector<TermPtr> layers;  // layers[0] = m0 cube, layers[i>0] = T step
  std::vector<VarVec> generations;
};
Unrolling unroll(const PetriNet& net, const Marking& m0, std::size_t k, GenerationCounter& gen);

// Decodes one generation of a solver model back into a marking.
Marking marking_from_values(const PetriNet& net, const VarVec& x,
                            const std::map<std::string, std::int64_t>& values);

}  // namespace pmc

#endif
