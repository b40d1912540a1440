#ifndef PMC_REDUCER_HPP
#define PMC_REDUCER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmc/linear_system.hpp"
#include "pmc/net.hpp"

namespace pmc {

enum class RuleId { Concat, Agg, Red, Shortcut, Redt, Deadt, Constant, Source };

const char* rule_name(RuleId r);

struct ReductionStep {
  RuleId rule;
  std::map<std::string, std::string> matched;  // role -> identifier
  LinearSystem equations;
  std::vector<std::string> fresh_vars;
};

struct ReductionTrace {
  PetriNet initial_net;
  Marking initial_marking;
  std::vector<ReductionStep> steps;
  PetriNet final_net;
  Marking final_marking;
  LinearSystem system;  // concatenation of the step equations, in order
  bool truncated = false;

  std::string equations_text() const { return system.to_text(); }
};

struct ReducePolicy {
  std::size_t max_steps = 10000;
};

struct RuleApplication {
  ReductionStep step;
  PetriNet net;
  Marking marking;
};

// Fresh place-variable names a1, a2, ... skipping anything already taken.
class FreshNames {
 public:
  explicit FreshNames(const PetriNet& net);
  std::string next();
  void reserve(const std::string& name) { used_.insert(name); }

 private:
  std::set<std::string> used_;
  std::uint64_t counter_ = 1;
};

std::optional<RuleApplication> try_concat(const PetriNet& net, const Marking& m, FreshNames& names);
std::optional<RuleApplication> try_agg(const PetriNet& net, const Marking& m, FreshNames& names);
std::optional<RuleApplication> try_redundant_place(const PetriNet& net, const Marking& m);
std::optional<RuleApplication> try_shortcut(const PetriNet& net, const Marking& m);
std::optional<RuleApplication> try_redundant_transition(const PetriNet& net, const Marking& m);
std::optional<RuleApplication> try_dead_transition(const PetriNet& net, const Marking& m);
std::optional<RuleApplication> try_constant(const PetriNet& net, const Marking& m);
std::optional<RuleApplication> try_source(const PetriNet& net, const Marking& m);

ReductionTrace reduce(const PetriNet& net, const Marking& m0, const ReducePolicy& policy = {});

struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }
};

Ratio reduction_ratio(const ReductionTrace& trace);

}  // namespace pmc

#endif
