#ifndef PMC_ORACLE_HPP
#define PMC_ORACLE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pmc/formula.hpp"
#include "pmc/linear_system.hpp"
#include "pmc/net.hpp"

namespace pmc {

struct EnumerationCutoffs {
  std::uint64_t max_states = 100000;
  Tokens max_tokens = 64;  // per place
};

struct StateGraph {
  std::vector<Marking> states;
  std::map<Marking, std::size_t> index;
  // BFS parent links for shortest-witness extraction.
  std::vector<std::optional<std::pair<std::size_t, std::string>>> parent;
  std::vector<std::size_t> depth;
  struct Edge {
    std::size_t from;
    std::string transition;
    std::size_t to;
  };
  std::vector<Edge> edges;
  Marking initial;
  bool truncated = false;

  bool contains(const Marking& m) const { return index.count(m) > 0; }
  FiringSequence path_to(std::size_t state) const;
};

StateGraph enumerate(const PetriNet& net, const Marking& m0, const EnumerationCutoffs& cutoffs);

enum class Quantifier { EF, AG };

Verdict explicit_check(const PetriNet& net, const StateGraph& graph, Quantifier q,
                       const FormulaPtr& goal);

// Bounded certification of (N1,m1) |>_E (N2,m2): checks condition (A1) and
// both directions of (A2) over all observation sequences up to obs_depth,
// with candidate counterpart markings enumerated from E within the token
// cutoff.
struct EquivalenceCheck {
  enum class Outcome { Certified, Refuted, Inconclusive };
  Outcome outcome = Outcome::Inconclusive;
  std::size_t depth_checked = 0;
  std::string detail;  // refutation witness or inconclusive reason
};

EquivalenceCheck check_e_abstraction_bounded(const PetriNet& n1, const Marking& m1,
                                             const PetriNet& n2, const Marking& m2,
                                             const LinearSystem& E, std::size_t obs_depth,
                                             const EnumerationCutoffs& cutoffs = {});

}  // namespace pmc

#endif
