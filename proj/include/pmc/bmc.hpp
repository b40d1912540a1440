#ifndef PMC_BMC_HPP
#define PMC_BMC_HPP

#include <atomic>
#include <chrono>
#include <optional>

#include "pmc/formula.hpp"
#include "pmc/net.hpp"
#include "pmc/reducer.hpp"
#include "pmc/solver.hpp"

namespace pmc {

struct ProcedureOptions {
  std::size_t max_depth = 1000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::atomic<bool>* cancel = nullptr;
  SolverConfig solver;
  bool fixpoint_check = false;  // BMC only; incomplete path-revisit test

  bool cancelled() const { return cancel && cancel->load(); }
  std::optional<unsigned> remaining_ms() const {
    if (!deadline) return std::nullopt;
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    *deadline - std::chrono::steady_clock::now())
                    .count();
    return left <= 0 ? 0u : static_cast<unsigned>(left);
  }
};

struct BmcOutcome {
  enum class Kind { Reachable, Exhausted, Unknown };
  Kind kind = Kind::Unknown;
  std::size_t depth = 0;
  Marking witness_marking;  // over the checked net
  FiringSequence trace;     // stutters removed; replays on the checked net
  std::string reason;
};

BmcOutcome bmc_check(const PetriNet& net, const Marking& m0, const FormulaPtr& goal,
                     const ProcedureOptions& options = {});

struct ReducedBmcOutcome {
  BmcOutcome outcome;            // on the reduced net
  ReductionTrace reduction;
  Ratio ratio;
  std::optional<Marking> lifted_witness;  // over the original net
};

ReducedBmcOutcome bmc_with_reduction(const PetriNet& net, const Marking& m0,
                                     const FormulaPtr& goal,
                                     const ProcedureOptions& options = {});

// Solves E and a fixed reduced-net marking for an original-net marking that
// additionally satisfies `goal` (pass true-formula for none). Throws on
// unsat, which would contradict the conservation theorems.
Marking lift_witness(const PetriNet& original, const PetriNet& reduced,
                     const LinearSystem& system, const Marking& reduced_marking,
                     const FormulaPtr& goal, const SolverConfig& solver);

}  // namespace pmc

#endif
