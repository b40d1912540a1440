#include "pmc/bmc.hpp"

#include "pmc/encoding.hpp"

namespace pmc {

namespace {

// Declares a generation's variables (nonnegative) in the current scope.
void declare_generation(SolverSession& session, const VarVec& x) {
  for (const auto& name : x.names) session.declare_int(name);
}

FiringSequence rebuild_trace(const PetriNet& net, const std::vector<Marking>& path) {
  FiringSequence seq;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (path[i] == path[i + 1]) continue;  // stutter step
    auto t = find_step(net, path[i], path[i + 1]);
    if (!t) throw Error("model decodes to a pair that is not one firing apart");
    seq.push_back(*t);
  }
  return seq;
}

}  // namespace

BmcOutcome bmc_check(const PetriNet& net, const Marking& m0, const FormulaPtr& goal,
                     const ProcedureOptions& options) {
  BmcOutcome out;
  SolverConfig cfg = options.solver;
  SolverSession session(cfg);
  GenerationCounter gen(net);

  std::vector<VarVec> generations;
  generations.push_back(gen.fresh());
  declare_generation(session, generations[0]);
  session.assert_term(marking_term(net, m0, generations[0]));

  for (std::size_t k = 0;; ++k) {
    if (options.cancelled()) {
      out.kind = BmcOutcome::Kind::Unknown;
      out.reason = "cancelled";
      return out;
    }
    auto left = options.remaining_ms();
    if (left && *left == 0) {
      out.kind = BmcOutcome::Kind::Unknown;
      out.reason = "budget";
      return out;
    }

    session.push();
    std::vector<std::string> bound;
    TermPtr goal_term = formula_term(net, goal, generations[k], &bound);
    for (const auto& v : bound) session.declare_int(v);
    session.assert_term(goal_term);
    SatResult r = session.check_sat(left);
    if (r.sat()) {
      std::vector<Marking> path;
      for (const auto& g : generations) {
        if (g.names.empty()) {
          path.push_back(Marking{});
          continue;
        }
        path.push_back(marking_from_values(net, g, session.get_values(g.names)));
      }
      out.kind = BmcOutcome::Kind::Reachable;
      out.depth = k;
      out.witness_marking = path.back();
      out.trace = rebuild_trace(net, path);
      // Soundness gate: the witness must replay from m0.
      if (fire_sequence(net, m0, out.trace) != out.witness_marking)
        throw Error("witness does not replay");
      return out;
    }
    session.pop();
    if (r.kind == SatResult::Kind::Unknown) {
      out.kind = BmcOutcome::Kind::Unknown;
      out.reason = r.unknown_reason;
      return out;
    }

    // A net with no places has a single marking; depth 0 exhausts it.
    if (net.places().empty()) {
      out.kind = BmcOutcome::Kind::Exhausted;
      out.depth = k;
      return out;
    }
    if (k >= options.max_depth) {
      out.kind = BmcOutcome::Kind::Unknown;
      out.reason = "depth budget";
      return out;
    }

    generations.push_back(gen.fresh());
    declare_generation(session, generations[k + 1]);
    session.assert_term(encode_transition_relation(net, generations[k], generations[k + 1]));

    if (options.fixpoint_check) {
      // Every path of length k+1 revisits one of its own states exactly when
      // no genuinely new marking appears at depth k+1; sound but incomplete.
      session.push();
      std::vector<TermPtr> fresh_state;
      for (std::size_t i = 0; i <= k; ++i)
        fresh_state.push_back(
            Term::negate(encode_eq(generations[k + 1], generations[i])));
      session.assert_term(Term::conj(std::move(fresh_state)));
      SatResult rf = session.check_sat(options.remaining_ms());
      session.pop();
      if (rf.unsat()) {
        out.kind = BmcOutcome::Kind::Exhausted;
        out.depth = k + 1;
        return out;
      }
    }
  }
}

Marking lift_witness(const PetriNet& original, const PetriNet& reduced,
                     const LinearSystem& system, const Marking& reduced_marking,
                     const FormulaPtr& goal, const SolverConfig& solver) {
  SolverSession session(solver);
  std::set<std::string> vars = system.vars();
  for (const auto& p : original.places()) vars.insert(p);
  for (const auto& p : reduced.places()) vars.insert(p);
  for (const auto& v : vars) session.declare_int(v);

  VarVec identity1;
  identity1.names = original.places();
  std::vector<std::string> bound;
  TermPtr goal_term = formula_term(original, goal, identity1, &bound);
  for (const auto& v : bound) session.declare_int(v);

  VarVec identity2;
  identity2.names = reduced.places();
  session.assert_term(marking_term(reduced, reduced_marking, identity2));
  if (!system.empty())
    session.assert_term(formula_term(original, system.to_formula(), identity1, nullptr));
  session.assert_term(goal_term);
  SatResult r = session.check_sat();
  if (!r.sat())
    throw Error("witness lift is unsatisfiable; the reduction equations are inconsistent "
                "with a reachable reduced-net marking");
  Marking lifted;
  if (!original.places().empty()) {
    auto values = session.get_values(original.places());
    for (const auto& p : original.places()) {
      auto it = values.find(p);
      if (it == values.end() || it->second < 0) throw Error("bad lift model");
      lifted.set(p, static_cast<Tokens>(it->second));
    }
  }
  return lifted;
}

ReducedBmcOutcome bmc_with_reduction(const PetriNet& net, const Marking& m0,
                                     const FormulaPtr& goal,
                                     const ProcedureOptions& options) {
  ReducedBmcOutcome out;
  out.reduction = reduce(net, m0);
  out.ratio = reduction_ratio(out.reduction);
  if (out.reduction.steps.empty()) {
    out.outcome = bmc_check(net, m0, goal, options);
    if (out.outcome.kind == BmcOutcome::Kind::Reachable)
      out.lifted_witness = out.outcome.witness_marking;
    return out;
  }
  FormulaPtr transformed = e_transform(goal, out.reduction.system, net.places(),
                                       out.reduction.final_net.places());
  out.outcome = bmc_check(out.reduction.final_net, out.reduction.final_marking,
                          transformed, options);
  if (out.outcome.kind == BmcOutcome::Kind::Reachable) {
    out.lifted_witness = lift_witness(net, out.reduction.final_net, out.reduction.system,
                                      out.outcome.witness_marking, goal, options.solver);
  }
  return out;
}

}  // namespace pmc
