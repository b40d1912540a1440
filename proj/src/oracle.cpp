#include "pmc/oracle.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace pmc {

FiringSequence StateGraph::path_to(std::size_t state) const {
  FiringSequence seq;
  std::size_t cur = state;
  while (parent[cur].has_value()) {
    seq.push_back(parent[cur]->second);
    cur = parent[cur]->first;
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

StateGraph enumerate(const PetriNet& net, const Marking& m0, const EnumerationCutoffs& cutoffs) {
  StateGraph g;
  g.initial = m0;
  g.states.push_back(m0);
  g.index[m0] = 0;
  g.parent.push_back(std::nullopt);
  g.depth.push_back(0);
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    Marking m = g.states[cur];
    for (const auto& t : net.transitions()) {
      if (!is_enabled(net, m, t)) continue;
      Marking next = fire(net, m, t);
      bool over = false;
      for (const auto& [p, n] : next.entries())
        if (n > cutoffs.max_tokens) { over = true; break; }
      if (over) {
        g.truncated = true;
        continue;
      }
      auto it = g.index.find(next);
      std::size_t id;
      if (it == g.index.end()) {
        if (g.states.size() >= cutoffs.max_states) {
          g.truncated = true;
          continue;
        }
        id = g.states.size();
        g.index[next] = id;
        g.states.push_back(next);
        g.parent.push_back(std::make_pair(cur, t));
        g.depth.push_back(g.depth[cur] + 1);
        queue.push_back(id);
      } else {
        id = it->second;
      }
      g.edges.push_back({cur, t, id});
    }
  }
  return g;
}

Verdict explicit_check(const PetriNet& net, const StateGraph& graph, Quantifier q,
                       const FormulaPtr& goal) {
  Verdict v;
  if (q == Quantifier::AG && graph.truncated) {
    v.kind = Verdict::Kind::Unknown;
    v.reason = "state space truncated";
    return v;
  }
  // States are stored in BFS order, so the first hit is a shortest witness.
  for (std::size_t i = 0; i < graph.states.size(); ++i) {
    bool sat = evaluate(goal, graph.states[i], net.places());
    if (q == Quantifier::EF && sat) {
      v.kind = Verdict::Kind::Reachable;
      v.witness = graph.path_to(i);
      v.witness_marking = graph.states[i];
      return v;
    }
    if (q == Quantifier::AG && !sat) {
      v.kind = Verdict::Kind::NotInvariant;
      v.witness = graph.path_to(i);
      v.witness_marking = graph.states[i];
      return v;
    }
  }
  if (q == Quantifier::EF) {
    if (graph.truncated) {
      v.kind = Verdict::Kind::Unknown;
      v.reason = "state space truncated";
    } else {
      v.kind = Verdict::Kind::Unreachable;
    }
  } else {
    v.kind = Verdict::Kind::Invariant;
  }
  return v;
}

namespace {

// All markings reachable silently (via unlabeled transitions) from a seed
// set, staying inside the already-enumerated graph.
std::set<std::size_t> tau_closure(const PetriNet& net, const StateGraph& g,
                                  std::set<std::size_t> seed) {
  std::deque<std::size_t> queue(seed.begin(), seed.end());
  // Adjacency on demand: the graph's edge list is small at desk scale.
  std::multimap<std::size_t, std::pair<std::string, std::size_t>> adj;
  for (const auto& e : g.edges) adj.emplace(e.from, std::make_pair(e.transition, e.to));
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    auto range = adj.equal_range(cur);
    for (auto it = range.first; it != range.second; ++it) {
      if (net.label(it->second.first).has_value()) continue;
      if (seed.insert(it->second.second).second) queue.push_back(it->second.second);
    }
  }
  return seed;
}

// Observation unfolding: for each observation sequence of length <= depth,
// the set of graph states reachable with exactly that observation.
using ObsMap = std::map<ObservationSequence, std::set<std::size_t>>;

ObsMap observation_map(const PetriNet& net, const StateGraph& g, std::size_t depth) {
  std::multimap<std::size_t, std::pair<std::string, std::size_t>> adj;
  for (const auto& e : g.edges) adj.emplace(e.from, std::make_pair(e.transition, e.to));

  ObsMap out;
  std::map<ObservationSequence, std::set<std::size_t>> layer;
  layer[{}] = tau_closure(net, g, {0});
  out = layer;
  for (std::size_t d = 0; d < depth && !layer.empty(); ++d) {
    std::map<ObservationSequence, std::set<std::size_t>> next;
    for (const auto& [sigma, states] : layer) {
      for (std::size_t s : states) {
        auto range = adj.equal_range(s);
        for (auto it = range.first; it != range.second; ++it) {
          const Label& l = net.label(it->second.first);
          if (!l.has_value()) continue;
          ObservationSequence ext = sigma;
          ext.push_back(*l);
          next[ext].insert(it->second.second);
        }
      }
    }
    for (auto& [sigma, states] : next) {
      states = tau_closure(net, g, std::move(states));
      out[sigma] = states;
    }
    layer = std::move(next);
  }
  return out;
}

std::string describe(const ObservationSequence& sigma) {
  std::ostringstream os;
  os << "\"";
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i) os << " ";
    os << sigma[i];
  }
  os << "\"";
  return os.str();
}

}  // namespace

EquivalenceCheck check_e_abstraction_bounded(const PetriNet& n1, const Marking& m1,
                                             const PetriNet& n2, const Marking& m2,
                                             const LinearSystem& E, std::size_t obs_depth,
                                             const EnumerationCutoffs& cutoffs) {
  EquivalenceCheck result;
  StateGraph g1 = enumerate(n1, m1, cutoffs);
  StateGraph g2 = enumerate(n2, m2, cutoffs);
  if (g1.truncated || g2.truncated) {
    result.outcome = EquivalenceCheck::Outcome::Inconclusive;
    result.detail = "state space truncated at the enumeration cutoffs";
    return result;
  }

  const std::int64_t bound = static_cast<std::int64_t>(cutoffs.max_tokens);

  // (A1): the initial markings are compatible with E.
  try {
    if (!markings_compatible(m1, n1.places(), m2, n2.places()) ||
        solve_for(E, {}, merge_markings(m1, n1.places(), m2, n2.places()),
                  [&] {
                    std::vector<std::string> dom = n1.places();
                    for (const auto& p : n2.places())
                      if (std::find(dom.begin(), dom.end(), p) == dom.end()) dom.push_back(p);
                    return dom;
                  }(),
                  bound)
            .empty()) {
      result.outcome = EquivalenceCheck::Outcome::Refuted;
      result.detail = "initial markings do not satisfy E";
      return result;
    }
  } catch (const MergeConflictError& e) {
    result.outcome = EquivalenceCheck::Outcome::Refuted;
    result.detail = std::string("initial markings incompatible: ") + e.what();
    return result;
  } catch (const Error& e) {
    result.outcome = EquivalenceCheck::Outcome::Inconclusive;
    result.detail = e.what();
    return result;
  }

  ObsMap obs1 = observation_map(n1, g1, obs_depth);
  ObsMap obs2 = observation_map(n2, g2, obs_depth);

  // One direction of (A2); `forward` means sequences of n1 checked against n2.
  auto check_direction = [&](const PetriNet& na, const StateGraph& ga, const ObsMap& oa,
                             const PetriNet& nb, const StateGraph& gb, const ObsMap& ob,
                             const char* dir) -> std::optional<std::string> {
    std::map<std::size_t, std::vector<Marking>> cache;
    for (const auto& [sigma, states_a] : oa) {
      auto itb = ob.find(sigma);
      for (std::size_t sa : states_a) {
        const Marking& ma = ga.states[sa];
        auto cached = cache.find(sa);
        if (cached == cache.end()) {
          try {
            cached = cache.emplace(sa, solve_for(E, nb.places(), ma, na.places(), bound)).first;
          } catch (const Error& e) {
            return std::string("candidate enumeration failed (") + dir + "): " + e.what();
          }
        }
        const std::vector<Marking>& candidates = cached->second;
        if (candidates.empty())
          return std::string(dir) + ": no counterpart marking satisfies E after " +
                 describe(sigma) + " reaching " + ma.to_string();
        for (const auto& mb : candidates) {
          std::size_t idx;
          if (itb == ob.end() || !gb.contains(mb) ||
              (idx = gb.index.at(mb), !itb->second.count(idx)))
            return std::string(dir) + ": counterpart " + mb.to_string() +
                   " not reachable via " + describe(sigma);
        }
      }
    }
    return std::nullopt;
  };

  if (auto bad = check_direction(n1, g1, obs1, n2, g2, obs2, "forward")) {
    result.outcome = EquivalenceCheck::Outcome::Refuted;
    result.detail = *bad;
    return result;
  }
  if (auto bad = check_direction(n2, g2, obs2, n1, g1, obs1, "backward")) {
    result.outcome = EquivalenceCheck::Outcome::Refuted;
    result.detail = *bad;
    return result;
  }

  result.outcome = EquivalenceCheck::Outcome::Certified;
  result.depth_checked = obs_depth;
  return result;
}

}  // namespace pmc
