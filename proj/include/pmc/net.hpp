#ifndef PMC_NET_HPP
#define PMC_NET_HPP

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pmc/common.hpp"

namespace pmc {

// Sparse arc row: place name -> weight. Absent place means weight 0.
using FlowRow = std::map<std::string, Tokens>;

// A marking assigns token counts to places. Stored sparsely; places absent
// from the map hold zero tokens. Kept normalized (no explicit zero entries)
// so that structural comparison coincides with marking equality.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::map<std::string, Tokens> tokens);

  Tokens at(const std::string& place) const;
  void set(const std::string& place, Tokens count);

  const std::map<std::string, Tokens>& entries() const { return tokens_; }
  bool operator==(const Marking& other) const { return tokens_ == other.tokens_; }
  bool operator!=(const Marking& other) const { return tokens_ != other.tokens_; }
  bool operator<(const Marking& other) const { return tokens_ < other.tokens_; }

  // Componentwise order over the union of domains.
  bool covers(const Marking& other) const;

  Tokens total() const;
  std::string to_string() const;

 private:
  std::map<std::string, Tokens> tokens_;
};

using FiringSequence = std::vector<std::string>;
using ObservationSequence = std::vector<std::string>;

// Silent transitions carry no label; everything else is a symbol over the
// observation alphabet. The default labeling maps a transition to its name.
using Label = std::optional<std::string>;

class PetriNet {
 public:
  PetriNet() = default;
  PetriNet(std::string name, std::vector<std::string> places,
           std::vector<std::string> transitions,
           std::vector<FlowRow> pre, std::vector<FlowRow> post,
           std::vector<Label> labels);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& places() const { return places_; }
  const std::vector<std::string>& transitions() const { return transitions_; }

  std::size_t place_index(const std::string& p) const;
  std::size_t transition_index(const std::string& t) const;
  bool has_place(const std::string& p) const;
  bool has_transition(const std::string& t) const;

  const FlowRow& pre(const std::string& t) const { return pre_[transition_index(t)]; }
  const FlowRow& post(const std::string& t) const { return post_[transition_index(t)]; }
  const FlowRow& pre(std::size_t ti) const { return pre_[ti]; }
  const FlowRow& post(std::size_t ti) const { return post_[ti]; }
  Tokens pre_weight(const std::string& t, const std::string& p) const;
  Tokens post_weight(const std::string& t, const std::string& p) const;

  const Label& label(const std::string& t) const { return labels_[transition_index(t)]; }
  const Label& label(std::size_t ti) const { return labels_[ti]; }
  bool is_silent(const std::string& t) const { return !label(t).has_value(); }

 private:
  std::string name_;
  std::vector<std::string> places_;
  std::vector<std::string> transitions_;
  std::vector<FlowRow> pre_;
  std::vector<FlowRow> post_;
  std::vector<Label> labels_;
  std::unordered_map<std::string, std::size_t> place_index_;
  std::unordered_map<std::string, std::size_t> transition_index_;
};

bool is_enabled(const PetriNet& net, const Marking& m, const std::string& t);
Marking fire(const PetriNet& net, const Marking& m, const std::string& t);
Marking fire_sequence(const PetriNet& net, const Marking& m, const FiringSequence& seq);
ObservationSequence observe(const PetriNet& net, const FiringSequence& seq);

// Union of two markings over explicit place domains. Fails when a shared
// place disagrees, which is exactly when cube(m1) & cube(m2) is
// unsatisfiable over dom1 and dom2.
Marking merge_markings(const Marking& m1, const std::vector<std::string>& dom1,
                       const Marking& m2, const std::vector<std::string>& dom2);
bool markings_compatible(const Marking& m1, const std::vector<std::string>& dom1,
                         const Marking& m2, const std::vector<std::string>& dom2);

// First declared transition firing `from` into `to`, if any.
std::optional<std::string> find_step(const PetriNet& net, const Marking& from, const Marking& to);

}  // namespace pmc

#endif
