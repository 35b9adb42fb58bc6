#pragma once

// Straightforward reference implementations used as test oracles.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "dcim/cascade.hpp"
#include "dcim/graph.hpp"
#include "dcim/model.hpp"

namespace ref {

using dcim::DirectedGraph;
using dcim::NodeId;
using dcim::NodeSet;
using dcim::Observation;

struct Cascade {
  std::set<NodeId> active;
  std::vector<Observation> obs;
};

// Rounds of newly active nodes; targets and attackers in ascending id;
// attempt index = 1 + failures so far on the target.
inline Cascade cascade(const DirectedGraph& g, const NodeSet& seeds,
                       const std::vector<std::vector<bool>>& coin) {
  Cascade r;
  std::set<NodeId> fresh(seeds.begin(), seeds.end());
  r.active = fresh;
  std::map<NodeId, std::uint32_t> fails;
  while (!fresh.empty()) {
    std::set<NodeId> next;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      if (r.active.count(v)) continue;
      for (NodeId u : g.in_neighbors(v)) {
        if (!fresh.count(u)) continue;
        const std::uint32_t i = fails[v] + 1;
        const bool y = coin[v][i - 1];
        r.obs.push_back({u, v, i, y});
        if (y) {
          next.insert(v);
          break;
        }
        ++fails[v];
      }
    }
    for (NodeId v : next) r.active.insert(v);
    fresh = next;
  }
  return r;
}

struct Enumeration {
  double spread = 0.0;
  std::vector<std::vector<double>> attempt_prob;  // [v][i-1]
};

// Sums over every coin assignment, weighting each by its probability.
inline Enumeration enumerate(const DirectedGraph& g, const dcim::ActivationModel& model,
                             const NodeSet& seeds) {
  std::vector<std::pair<NodeId, std::size_t>> slots;
  Enumeration out;
  out.attempt_prob.resize(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    out.attempt_prob[v].assign(g.in_degree(v), 0.0);
    for (std::size_t i = 0; i < g.in_degree(v); ++i) slots.push_back({v, i});
  }
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
    std::vector<std::vector<bool>> coin(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) coin[v].assign(g.in_degree(v), false);
    double w = 1.0;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const auto [v, i] = slots[s];
      const bool c = (mask >> s) & 1;
      coin[v][i] = c;
      const double p = model.attempt_prob(v, i + 1);
      w *= c ? p : 1.0 - p;
    }
    if (w == 0.0) continue;
    Cascade c = cascade(g, seeds, coin);
    out.spread += w * static_cast<double>(c.active.size());
    for (const Observation& o : c.obs) out.attempt_prob[o.target][o.attempt - 1] += w;
  }
  return out;
}

}  // namespace ref
