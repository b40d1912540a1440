#include "pmc/net.hpp"

#include <set>
#include <sstream>

namespace pmc {

Marking::Marking(std::map<std::string, Tokens> tokens) : tokens_(std::move(tokens)) {
  for (auto it = tokens_.begin(); it != tokens_.end();) {
    if (it->second == 0) it = tokens_.erase(it);
    else ++it;
  }
}

Tokens Marking::at(const std::string& place) const {
  auto it = tokens_.find(place);
  return it == tokens_.end() ? 0 : it->second;
}

void Marking::set(const std::string& place, Tokens count) {
  if (count == 0) tokens_.erase(place);
  else tokens_[place] = count;
}

bool Marking::covers(const Marking& other) const {
  for (const auto& [p, n] : other.tokens_)
    if (at(p) < n) return false;
  return true;
}

Tokens Marking::total() const {
  Tokens sum = 0;
  for (const auto& [p, n] : tokens_) sum = checked_add(sum, n);
  return sum;
}

std::string Marking::to_string() const {
  std::ostringstream os;
  os << "<";
  bool first = true;
  for (const auto& [p, n] : tokens_) {
    if (!first) os << " ";
    os << p << ":" << n;
    first = false;
  }
  os << ">";
  return os.str();
}

PetriNet::PetriNet(std::string name, std::vector<std::string> places,
                   std::vector<std::string> transitions,
                   std::vector<FlowRow> pre, std::vector<FlowRow> post,
                   std::vector<Label> labels)
    : name_(std::move(name)),
      places_(std::move(places)),
      transitions_(std::move(transitions)),
      pre_(std::move(pre)),
      post_(std::move(post)),
      labels_(std::move(labels)) {
  if (pre_.size() != transitions_.size() || post_.size() != transitions_.size() ||
      labels_.size() != transitions_.size())
    throw Error("net " + name_ + ": flow/label tables do not match transition count");
  for (std::size_t i = 0; i < places_.size(); ++i) {
    if (!place_index_.emplace(places_[i], i).second)
      throw Error("duplicate place " + places_[i]);
  }
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    if (place_index_.count(transitions_[i]))
      throw Error("identifier " + transitions_[i] + " used as both place and transition");
    if (!transition_index_.emplace(transitions_[i], i).second)
      throw Error("duplicate transition " + transitions_[i]);
  }
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    for (const auto& [p, w] : pre_[i]) {
      (void)w;
      if (!place_index_.count(p))
        throw Error("transition " + transitions_[i] + ": pre arc to undeclared place " + p);
    }
    for (const auto& [p, w] : post_[i]) {
      (void)w;
      if (!place_index_.count(p))
        throw Error("transition " + transitions_[i] + ": post arc to undeclared place " + p);
    }
  }
}

std::size_t PetriNet::place_index(const std::string& p) const {
  auto it = place_index_.find(p);
  if (it == place_index_.end()) throw UnknownIdError(p);
  return it->second;
}

std::size_t PetriNet::transition_index(const std::string& t) const {
  auto it = transition_index_.find(t);
  if (it == transition_index_.end()) throw UnknownIdError(t);
  return it->second;
}

bool PetriNet::has_place(const std::string& p) const { return place_index_.count(p) > 0; }
bool PetriNet::has_transition(const std::string& t) const { return transition_index_.count(t) > 0; }

Tokens PetriNet::pre_weight(const std::string& t, const std::string& p) const {
  const FlowRow& row = pre(t);
  auto it = row.find(p);
  return it == row.end() ? 0 : it->second;
}

Tokens PetriNet::post_weight(const std::string& t, const std::string& p) const {
  const FlowRow& row = post(t);
  auto it = row.find(p);
  return it == row.end() ? 0 : it->second;
}

bool is_enabled(const PetriNet& net, const Marking& m, const std::string& t) {
  for (const auto& [p, w] : net.pre(t))
    if (m.at(p) < w) return false;
  return true;
}

Marking fire(const PetriNet& net, const Marking& m, const std::string& t) {
  for (const auto& [p, w] : net.pre(t))
    if (m.at(p) < w) throw NotEnabledError(t, p);
  Marking out = m;
  for (const auto& [p, w] : net.pre(t)) out.set(p, checked_sub(out.at(p), w));
  for (const auto& [p, w] : net.post(t)) out.set(p, checked_add(out.at(p), w));
  return out;
}

Marking fire_sequence(const PetriNet& net, const Marking& m, const FiringSequence& seq) {
  Marking cur = m;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!net.has_transition(seq[i])) throw UnknownIdError(seq[i]);
    if (!is_enabled(net, cur, seq[i])) throw SequenceError(i, seq[i]);
    cur = fire(net, cur, seq[i]);
  }
  return cur;
}

ObservationSequence observe(const PetriNet& net, const FiringSequence& seq) {
  ObservationSequence obs;
  for (const auto& t : seq) {
    const Label& l = net.label(t);
    if (l.has_value()) obs.push_back(*l);
  }
  return obs;
}

bool markings_compatible(const Marking& m1, const std::vector<std::string>& dom1,
                         const Marking& m2, const std::vector<std::string>& dom2) {
  std::set<std::string> d2(dom2.begin(), dom2.end());
  for (const auto& p : dom1)
    if (d2.count(p) && m1.at(p) != m2.at(p)) return false;
  return true;
}

std::optional<std::string> find_step(const PetriNet& net, const Marking& from, const Marking& to) {
  for (const auto& t : net.transitions()) {
    if (!is_enabled(net, from, t)) continue;
    if (fire(net, from, t) == to) return t;
  }
  return std::nullopt;
}

Marking merge_markings(const Marking& m1, const std::vector<std::string>& dom1,
                       const Marking& m2, const std::vector<std::string>& dom2) {
  std::set<std::string> d2(dom2.begin(), dom2.end());
  for (const auto& p : dom1)
    if (d2.count(p) && m1.at(p) != m2.at(p)) throw MergeConflictError(p);
  Marking out;
  for (const auto& p : dom1) out.set(p, m1.at(p));
  for (const auto& p : dom2)
    if (out.at(p) == 0) out.set(p, m2.at(p));
  return out;
}

}  // namespace pmc
