#include "pmc/reducer.hpp"

#include <algorithm>

namespace pmc {

const char* rule_name(RuleId r) {
  switch (r) {
    case RuleId::Concat: return "CONCAT";
    case RuleId::Agg: return "AGG";
    case RuleId::Red: return "RED";
    case RuleId::Shortcut: return "SHORTCUT";
    case RuleId::Redt: return "REDT";
    case RuleId::Deadt: return "DEADT";
    case RuleId::Constant: return "CONSTANT";
    case RuleId::Source: return "SOURCE";
  }
  return "?";
}

FreshNames::FreshNames(const PetriNet& net) {
  for (const auto& p : net.places()) used_.insert(p);
  for (const auto& t : net.transitions()) used_.insert(t);
}

std::string FreshNames::next() {
  for (;;) {
    std::string cand = "a" + std::to_string(counter_++);
    if (used_.insert(cand).second) return cand;
  }
}

namespace {

bool touches(const PetriNet& net, std::size_t ti, const std::string& p) {
  auto w = [&](const FlowRow& row) {
    auto it = row.find(p);
    return it == row.end() ? Tokens{0} : it->second;
  };
  return w(net.pre(ti)) > 0 || w(net.post(ti)) > 0;
}

Tokens row_weight(const FlowRow& row, const std::string& p) {
  auto it = row.find(p);
  return it == row.end() ? Tokens{0} : it->second;
}

PetriNet remove_places(const PetriNet& net, const std::set<std::string>& gone) {
  std::vector<std::string> places;
  for (const auto& p : net.places())
    if (!gone.count(p)) places.push_back(p);
  std::vector<FlowRow> pre, post;
  for (std::size_t i = 0; i < net.transitions().size(); ++i) {
    FlowRow rp, rq;
    for (const auto& [p, w] : net.pre(i))
      if (!gone.count(p)) rp[p] = w;
    for (const auto& [p, w] : net.post(i))
      if (!gone.count(p)) rq[p] = w;
    pre.push_back(std::move(rp));
    post.push_back(std::move(rq));
  }
  std::vector<Label> labels;
  for (std::size_t i = 0; i < net.transitions().size(); ++i) labels.push_back(net.label(i));
  return PetriNet(net.name(), places, net.transitions(), pre, post, labels);
}

PetriNet remove_transitions(const PetriNet& net, const std::set<std::string>& gone) {
  std::vector<std::string> transitions;
  std::vector<FlowRow> pre, post;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < net.transitions().size(); ++i) {
    if (gone.count(net.transitions()[i])) continue;
    transitions.push_back(net.transitions()[i]);
    pre.push_back(net.pre(i));
    post.push_back(net.post(i));
    labels.push_back(net.label(i));
  }
  return PetriNet(net.name(), net.places(), transitions, pre, post, labels);
}

Marking restrict_marking(const Marking& m, const PetriNet& net) {
  Marking out;
  for (const auto& p : net.places()) out.set(p, m.at(p));
  return out;
}

// Fuses y1 and y2 into a fresh place x appended to the place order; the
// silent link transitions in `links` are removed, all other arcs re-target
// to x with weights added.
PetriNet fuse_places(const PetriNet& net, const std::string& y1, const std::string& y2,
                     const std::set<std::string>& links, const std::string& x) {
  std::vector<std::string> places;
  for (const auto& p : net.places())
    if (p != y1 && p != y2) places.push_back(p);
  places.push_back(x);
  std::vector<std::string> transitions;
  std::vector<FlowRow> pre, post;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < net.transitions().size(); ++i) {
    const std::string& t = net.transitions()[i];
    if (links.count(t)) continue;
    transitions.push_back(t);
    FlowRow rp, rq;
    for (const auto& [p, w] : net.pre(i)) {
      if (p == y1 || p == y2) rp[x] += w;
      else rp[p] = w;
    }
    for (const auto& [p, w] : net.post(i)) {
      if (p == y1 || p == y2) rq[x] += w;
      else rq[p] = w;
    }
    pre.push_back(std::move(rp));
    post.push_back(std::move(rq));
    labels.push_back(net.label(i));
  }
  return PetriNet(net.name(), places, transitions, pre, post, labels);
}

LinearExpr sum_vars(const std::string& a, const std::string& b, std::int64_t k = 0) {
  LinearExpr e = LinearExpr::var(a);
  e.add(LinearExpr::var(b));
  e.constant = k;
  return e;
}

}  // namespace

std::optional<RuleApplication> try_dead_transition(const PetriNet& net, const Marking& m) {
  for (std::size_t i = 0; i < net.transitions().size(); ++i) {
    for (const auto& [p, w] : net.pre(i)) {
      if (w == 0 || m.at(p) != 0) continue;
      bool fed = false;
      for (std::size_t j = 0; j < net.transitions().size(); ++j)
        if (row_weight(net.post(j), p) > 0) { fed = true; break; }
      if (fed) continue;
      const std::string& t = net.transitions()[i];
      RuleApplication app;
      app.step.rule = RuleId::Deadt;
      app.step.matched = {{"transition", t}, {"empty_place", p}};
      app.net = remove_transitions(net, {t});
      app.marking = m;
      return app;
    }
  }
  return std::nullopt;
}

std::optional<RuleApplication> try_redundant_transition(const PetriNet& net, const Marking& m) {
  // Silent self-loops first: firing them changes nothing and emits nothing.
  for (std::size_t i = 0; i < net.transitions().size(); ++i) {
    if (net.label(i).has_value()) continue;
    if (net.pre(i) == net.post(i)) {
      const std::string& t = net.transitions()[i];
      RuleApplication app;
      app.step.rule = RuleId::Redt;
      app.step.matched = {{"transition", t}};
      app.net = remove_transitions(net, {t});
      app.marking = m;
      return app;
    }
  }
  // Exact duplicates: same flows and same label; the later one goes.
  for (std::size_t i = 0; i < net.transitions().size(); ++i) {
    for (std::size_t j = i + 1; j < net.transitions().size(); ++j) {
      if (net.pre(i) != net.pre(j) || net.post(i) != net.post(j)) continue;
      if (net.label(i) != net.label(j)) continue;
      const std::string& t = net.transitions()[j];
      RuleApplication app;
      app.step.rule = RuleId::Redt;
      app.step.matched = {{"kept", net.transitions()[i]}, {"transition", t}};
      app.net = remove_transitions(net, {t});
      app.marking = m;
      return app;
    }
  }
  return std::nullopt;
}

std::optional<RuleApplication> try_constant(const PetriNet& net, const Marking& m) {
  for (const auto& p : net.places()) {
    Tokens k = m.at(p);
    bool constant = true;
    for (std::size_t i = 0; i < net.transitions().size(); ++i) {
      Tokens wp = row_weight(net.pre(i), p);
      if (wp != row_weight(net.post(i), p) || wp > k) {
        constant = false;
        break;
      }
    }
    if (!constant) continue;
    RuleApplication app;
    app.step.rule = RuleId::Constant;
    app.step.matched = {{"place", p}};
    app.step.equations.add_eq(LinearExpr::var(p), LinearExpr::lit(static_cast<std::int64_t>(k)));
    app.net = remove_places(net, {p});
    app.marking = restrict_marking(m, app.net);
    return app;
  }
  return std::nullopt;
}

std::optional<RuleApplication> try_redundant_place(const PetriNet& net, const Marking& m) {
  const auto& places = net.places();
  for (std::size_t a = 0; a < places.size(); ++a) {
    for (std::size_t b = a + 1; b < places.size(); ++b) {
      bool same = true;
      for (std::size_t i = 0; i < net.transitions().size() && same; ++i) {
        same = row_weight(net.pre(i), places[a]) == row_weight(net.pre(i), places[b]) &&
               row_weight(net.post(i), places[a]) == row_weight(net.post(i), places[b]);
      }
      if (!same) continue;
      // Remove the place holding at least as many tokens; ties drop the
      // earlier one in declaration order.
      const std::string& z = m.at(places[a]) >= m.at(places[b]) ? places[a] : places[b];
      const std::string& y = z == places[a] ? places[b] : places[a];
      std::int64_t diff = static_cast<std::int64_t>(m.at(z)) - static_cast<std::int64_t>(m.at(y));
      RuleApplication app;
      app.step.rule = RuleId::Red;
      app.step.matched = {{"removed", z}, {"kept", y}};
      LinearExpr rhs = LinearExpr::var(y);
      rhs.constant = diff;
      app.step.equations.add_eq(LinearExpr::var(z), rhs);
      app.net = remove_places(net, {z});
      app.marking = restrict_marking(m, app.net);
      return app;
    }
  }
  return std::nullopt;
}

std::optional<RuleApplication> try_shortcut(const PetriNet& net, const Marking& m) {
  const auto& places = net.places();
  for (const auto& z : places) {
    for (std::size_t a = 0; a < places.size(); ++a) {
      if (places[a] == z) continue;
      for (std::size_t b = a + 1; b < places.size(); ++b) {
        if (places[b] == z) continue;
        const std::string& y1 = places[a];
        const std::string& y2 = places[b];
        if (m.at(z) < checked_add(m.at(y1), m.at(y2))) continue;
        bool rows_sum = true;
        for (std::size_t i = 0; i < net.transitions().size() && rows_sum; ++i) {
          rows_sum =
              row_weight(net.pre(i), z) ==
                  row_weight(net.pre(i), y1) + row_weight(net.pre(i), y2) &&
              row_weight(net.post(i), z) ==
                  row_weight(net.post(i), y1) + row_weight(net.post(i), y2);
        }
        if (!rows_sum) continue;
        std::int64_t k = static_cast<std::int64_t>(m.at(z)) -
                         static_cast<std::int64_t>(m.at(y1)) -
                         static_cast<std::int64_t>(m.at(y2));
        RuleApplication app;
        app.step.rule = RuleId::Shortcut;
        app.step.matched = {{"removed", z}, {"y1", y1}, {"y2", y2}};
        app.step.equations.add_eq(LinearExpr::var(z), sum_vars(y1, y2, k));
        app.net = remove_places(net, {z});
        app.marking = restrict_marking(m, app.net);
        return app;
      }
    }
  }
  return std::nullopt;
}

std::optional<RuleApplication> try_concat(const PetriNet& net, const Marking& m, FreshNames& names) {
  for (std::size_t i = 0; i < net.transitions().size(); ++i) {
    if (net.label(i).has_value()) continue;
    const FlowRow& p = net.pre(i);
    const FlowRow& q = net.post(i);
    if (p.size() != 1 || q.size() != 1) continue;
    if (p.begin()->second != 1 || q.begin()->second != 1) continue;
    const std::string& y1 = p.begin()->first;
    const std::string& y2 = q.begin()->first;
    if (y1 == y2) continue;
    if (m.at(y2) != 0) continue;
    bool ok = true;
    for (std::size_t j = 0; j < net.transitions().size() && ok; ++j) {
      if (j == i) continue;
      if (row_weight(net.post(j), y2) > 0) ok = false;           // no other input to y2
      else if (touches(net, j, y1) && touches(net, j, y2)) ok = false;
    }
    if (!ok) continue;
    const std::string& link = net.transitions()[i];
    std::string x = names.next();
    RuleApplication app;
    app.step.rule = RuleId::Concat;
    app.step.matched = {{"y1", y1}, {"y2", y2}, {"link", link}, {"fused", x}};
    app.step.equations.add_eq(LinearExpr::var(x), sum_vars(y1, y2));
    app.step.fresh_vars = {x};
    app.net = fuse_places(net, y1, y2, {link}, x);
    Marking next = restrict_marking(m, app.net);
    next.set(x, m.at(y1));
    app.marking = next;
    return app;
  }
  return std::nullopt;
}

std::optional<RuleApplication> try_agg(const PetriNet& net, const Marking& m, FreshNames& names) {
  auto unit_silent_link = [&](std::size_t i, const std::string& from, const std::string& to) {
    if (net.label(i).has_value()) return false;
    const FlowRow& p = net.pre(i);
    const FlowRow& q = net.post(i);
    return p.size() == 1 && q.size() == 1 && p.begin()->first == from &&
           q.begin()->first == to && p.begin()->second == 1 && q.begin()->second == 1;
  };
  for (std::size_t i = 0; i < net.transitions().size(); ++i) {
    if (net.label(i).has_value()) continue;
    const FlowRow& p = net.pre(i);
    const FlowRow& q = net.post(i);
    if (p.size() != 1 || q.size() != 1) continue;
    if (p.begin()->second != 1 || q.begin()->second != 1) continue;
    const std::string& y1 = p.begin()->first;
    const std::string& y2 = q.begin()->first;
    if (y1 == y2) continue;
    for (std::size_t j = i + 1; j < net.transitions().size(); ++j) {
      if (!unit_silent_link(j, y2, y1)) continue;
      // Tokens circulate freely between y1 and y2; fuse them.
      const std::string& down = net.transitions()[i];
      const std::string& up = net.transitions()[j];
      std::string x = names.next();
      RuleApplication app;
      app.step.rule = RuleId::Agg;
      app.step.matched = {{"y1", y1}, {"y2", y2}, {"down", down}, {"up", up}, {"fused", x}};
      app.step.equations.add_eq(LinearExpr::var(x), sum_vars(y1, y2));
      app.step.fresh_vars = {x};
      app.net = fuse_places(net, y1, y2, {down, up}, x);
      Marking next = restrict_marking(m, app.net);
      next.set(x, checked_add(m.at(y1), m.at(y2)));
      app.marking = next;
      return app;
    }
  }
  return std::nullopt;
}

std::optional<RuleApplication> try_source(const PetriNet& net, const Marking& m) {
  for (const auto& p : net.places()) {
    bool has_consumer = false;
    bool ok = true;
    std::set<std::string> consumers;
    for (std::size_t i = 0; i < net.transitions().size() && ok; ++i) {
      if (row_weight(net.post(i), p) > 0) { ok = false; break; }
      Tokens w = row_weight(net.pre(i), p);
      if (w == 0) continue;
      has_consumer = true;
      // Consumers must be pure silent sinks of this one place.
      if (net.label(i).has_value() || w != 1 || net.pre(i).size() != 1 || !net.post(i).empty())
        ok = false;
      else
        consumers.insert(net.transitions()[i]);
    }
    if (!ok || !has_consumer) continue;
    RuleApplication app;
    app.step.rule = RuleId::Source;
    app.step.matched = {{"place", p}};
    app.step.equations.add_le(LinearExpr::var(p),
                              LinearExpr::lit(static_cast<std::int64_t>(m.at(p))));
    app.net = remove_transitions(remove_places(net, {p}), consumers);
    app.marking = restrict_marking(m, app.net);
    return app;
  }
  return std::nullopt;
}

ReductionTrace reduce(const PetriNet& net, const Marking& m0, const ReducePolicy& policy) {
  ReductionTrace trace;
  trace.initial_net = net;
  trace.initial_marking = m0;
  PetriNet cur = net;
  Marking m = m0;
  FreshNames names(net);
  for (std::size_t iter = 0;; ++iter) {
    if (iter >= policy.max_steps) {
      trace.truncated = true;
      break;
    }
    std::optional<RuleApplication> app;
    if (!app) app = try_dead_transition(cur, m);
    if (!app) app = try_redundant_transition(cur, m);
    if (!app) app = try_constant(cur, m);
    if (!app) app = try_redundant_place(cur, m);
    if (!app) app = try_shortcut(cur, m);
    if (!app) app = try_concat(cur, m, names);
    if (!app) app = try_agg(cur, m, names);
    if (!app) app = try_source(cur, m);
    if (!app) break;
    trace.system.append(app->step.equations);
    trace.steps.push_back(std::move(app->step));
    cur = std::move(app->net);
    m = std::move(app->marking);
  }
  trace.final_net = std::move(cur);
  trace.final_marking = std::move(m);
  return trace;
}

Ratio reduction_ratio(const ReductionTrace& trace) {
  std::uint64_t p_init = trace.initial_net.places().size();
  std::uint64_t p_red = trace.final_net.places().size();
  if (p_init == 0) return {0, 1};
  return {p_init - p_red, p_init};
}

}  // namespace pmc
