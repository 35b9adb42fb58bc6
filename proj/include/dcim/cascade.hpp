#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcim/graph.hpp"
#include "dcim/model.hpp"
#include "dcim/rng.hpp"

namespace dcim {

/// One executed activation attempt: `attacker` tried `target` as the
/// `attempt`-th attempt on that target.
struct Observation {
  NodeId attacker = 0;
  NodeId target = 0;
  std::uint32_t attempt = 0;
  bool success = false;
  bool operator==(const Observation&) const = default;
};

struct DiffusionTrace {
  NodeSet seed_set;
  std::vector<NodeSet> steps;  // steps[0] = seeds, steps[k] = nodes activated at step k
  std::vector<Observation> observations;
  NodeSet final_active;

  std::size_t reward() const noexcept { return final_active.size(); }
};

inline std::string dump_observations(const std::vector<Observation>& obs) {
  std::ostringstream out;
  for (const Observation& o : obs)
    out << o.attacker << ' ' << o.target << ' ' << o.attempt << ' ' << (o.success ? 1 : 0) << '\n';
  return out.str();
}

/// Pre-drawn outcome X_v(i) for every attempt slot of a graph.
class CoinTable {
 public:
  CoinTable() = default;
  CoinTable(const DirectedGraph& g, bool fill) : coins_(g.num_slots(), fill ? 1 : 0) {}
  explicit CoinTable(std::vector<char> per_slot) : coins_(std::move(per_slot)) {}

  bool complete_for(const DirectedGraph& g) const { return coins_.size() == g.num_slots(); }
  bool get(const DirectedGraph& g, NodeId v, std::size_t attempt) const {
    return coins_[g.slot(v, attempt)] != 0;
  }
  void set(const DirectedGraph& g, NodeId v, std::size_t attempt, bool value) {
    coins_[g.slot(v, attempt)] = value ? 1 : 0;
  }
  bool slot(std::size_t s) const { return coins_[s] != 0; }
  std::size_t size() const noexcept { return coins_.size(); }

 private:
  std::vector<char> coins_;
};

inline CoinTable draw_coins(const DirectedGraph& g, const ActivationModel& model, Stream& rng) {
  std::vector<char> coins(g.num_slots());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto probs = model.node_probs(v);
    for (std::size_t i = 0; i < probs.size(); ++i)
      coins[g.slot_begin(v) + i] = rng.bernoulli(probs[i]) ? 1 : 0;
  }
  return CoinTable(std::move(coins));
}

// Order in which same-step attackers of one target make their attempts.
enum class AttemptOrder { ascending, descending };

/// Reusable scratch buffers for the step engine; one per thread.
class CascadeWorkspace {
 public:
  void prepare(std::size_t n) {
    if (step_.size() != n) {
      step_.assign(n, inactive);
      failures_.assign(n, 0);
      seen_.assign(n, 0);
      touched_.clear();
      return;
    }
    for (NodeId v : touched_) {
      step_[v] = inactive;
      failures_[v] = 0;
      seen_[v] = 0;
    }
    touched_.clear();
  }

  static constexpr std::uint32_t inactive = UINT32_MAX;

  std::vector<std::uint32_t> step_;
  std::vector<std::uint32_t> failures_;
  std::vector<std::uint32_t> seen_;  // step stamp (+1) of the last candidate collection
  std::vector<NodeId> touched_;
  std::vector<NodeId> frontier_;
  std::vector<NodeId> next_;
  std::vector<NodeId> candidates_;
};

namespace detail {

/// Step-synchronous diffusion shared by every simulator in the library.
///
/// At step tau each inactive node v with in-neighbors activated at tau
/// receives their attempts one at a time. The attempt index is one plus all
/// failures v has absorbed so far (across steps); on the first success v
/// joins step tau + 1 and receives no further attempts. Targets are visited
/// in ascending id.
///
/// attempt(u, v, i, k) -> bool decides the outcome, where k indexes u within
/// in_neighbors(v). observe(u, v, i, y) sees each executed attempt and
/// on_step(nodes) sees each non-empty newly-activated set, step 0 included.
/// Returns the number of activated nodes.
template <class AttemptFn, class ObserveFn, class StepFn>
std::size_t run_cascade(const DirectedGraph& g, const NodeSet& seeds, AttemptOrder order,
                        CascadeWorkspace& ws, AttemptFn&& attempt, ObserveFn&& observe,
                        StepFn&& on_step) {
  ws.prepare(g.num_nodes());
  ws.frontier_.assign(seeds.begin(), seeds.end());
  for (NodeId s : seeds) {
    ws.step_[s] = 0;
    ws.touched_.push_back(s);
  }
  on_step(ws.frontier_);
  std::size_t active = ws.frontier_.size();

  for (std::uint32_t tau = 0; !ws.frontier_.empty(); ++tau) {
    ws.candidates_.clear();
    for (NodeId u : ws.frontier_)
      for (NodeId v : g.out_neighbors(u))
        if (ws.step_[v] == CascadeWorkspace::inactive && ws.seen_[v] != tau + 1) {
          if (ws.seen_[v] == 0) ws.touched_.push_back(v);
          ws.seen_[v] = tau + 1;
          ws.candidates_.push_back(v);
        }
    std::sort(ws.candidates_.begin(), ws.candidates_.end());

    ws.next_.clear();
    for (NodeId v : ws.candidates_) {
      auto nbrs = g.in_neighbors(v);
      const std::size_t deg = nbrs.size();
      for (std::size_t step_k = 0; step_k < deg; ++step_k) {
        const std::size_t k = order == AttemptOrder::ascending ? step_k : deg - 1 - step_k;
        const NodeId u = nbrs[k];
        if (ws.step_[u] != tau) continue;
        const std::uint32_t i = ws.failures_[v] + 1;
        const bool y = attempt(u, v, static_cast<std::size_t>(i), k);
        observe(u, v, i, y);
        if (y) {
          ws.step_[v] = tau + 1;
          ws.next_.push_back(v);
          break;
        }
        ++ws.failures_[v];
      }
    }
    if (!ws.next_.empty()) on_step(ws.next_);
    active += ws.next_.size();
    std::swap(ws.frontier_, ws.next_);
  }
  return active;
}

inline void require_seeds(const DirectedGraph& g, const NodeSet& seeds) {
  if (!g.valid(seeds)) throw Error("seed set " + to_string(seeds) + " has ids outside the graph");
}

template <class Model>
auto attempt_sampler(const DirectedGraph& g, const Model& model, Stream& rng) {
  return [&g, &model, &rng](NodeId, NodeId v, std::size_t i, std::size_t k) {
    const double p = model.is_count_dc() ? model.attempt_prob(v, i)
                                         : model.edge_prob(g.in_edge_ids(v)[k]);
    return rng.bernoulli(p);
  };
}

}  // namespace detail

/// Samples one cascade and records everything the learner gets to see.
inline DiffusionTrace simulate(const DirectedGraph& g, const ActivationModel& model,
                               const NodeSet& seeds, Stream& rng, CascadeWorkspace& ws) {
  detail::require_seeds(g, seeds);
  DiffusionTrace trace;
  trace.seed_set = seeds;
  std::vector<NodeId> all;
  detail::run_cascade(
      g, seeds, AttemptOrder::ascending, ws, detail::attempt_sampler(g, model, rng),
      [&](NodeId u, NodeId v, std::uint32_t i, bool y) {
        trace.observations.push_back({u, v, i, y});
      },
      [&](const std::vector<NodeId>& fresh) {
        trace.steps.emplace_back(fresh);
        all.insert(all.end(), fresh.begin(), fresh.end());
      });
  if (trace.steps.empty()) trace.steps.emplace_back();
  trace.final_active = NodeSet(std::move(all));
  return trace;
}

inline DiffusionTrace simulate(const DirectedGraph& g, const ActivationModel& model,
                               const NodeSet& seeds, Stream& rng) {
  CascadeWorkspace ws;
  return simulate(g, model, seeds, rng, ws);
}

/// |final_active| of one sampled cascade, without recording the trace.
inline std::size_t sample_cascade_size(const DirectedGraph& g, const ActivationModel& model,
                                       const NodeSet& seeds, Stream& rng, CascadeWorkspace& ws) {
  return detail::run_cascade(
      g, seeds, AttemptOrder::ascending, ws, detail::attempt_sampler(g, model, rng),
      [](NodeId, NodeId, std::uint32_t, bool) {}, [](const std::vector<NodeId>&) {});
}

struct CoinCascade {
  NodeSet final_active;
  std::vector<Observation> observations;
  std::vector<std::uint32_t> failures;  // failed attempts absorbed per node
};

/// Count-based cascade where the i-th attempt on v succeeds iff X_v(i).
inline CoinCascade simulate_with_coins(const DirectedGraph& g, const NodeSet& seeds,
                                       const CoinTable& coins, CascadeWorkspace& ws,
                                       AttemptOrder order = AttemptOrder::ascending) {
  if (!coins.complete_for(g))
    throw Error("coin table has " + std::to_string(coins.size()) + " slots, graph needs " +
                std::to_string(g.num_slots()));
  detail::require_seeds(g, seeds);
  CoinCascade out;
  out.failures.assign(g.num_nodes(), 0);
  std::vector<NodeId> all;
  detail::run_cascade(
      g, seeds, order, ws,
      [&](NodeId, NodeId v, std::size_t i, std::size_t) { return coins.get(g, v, i); },
      [&](NodeId u, NodeId v, std::uint32_t i, bool y) {
        out.observations.push_back({u, v, i, y});
        if (!y) ++out.failures[v];
      },
      [&](const std::vector<NodeId>& fresh) { all.insert(all.end(), fresh.begin(), fresh.end()); });
  out.final_active = NodeSet(std::move(all));
  return out;
}

inline CoinCascade simulate_with_coins(const DirectedGraph& g, const NodeSet& seeds,
                                       const CoinTable& coins,
                                       AttemptOrder order = AttemptOrder::ascending) {
  CascadeWorkspace ws;
  return simulate_with_coins(g, seeds, coins, ws, order);
}

/// Checks the structural invariants of a trace against its graph. Returns a
/// description of the first breach, or nullopt.
inline std::optional<std::string> check_trace(const DirectedGraph& g, const DiffusionTrace& t) {
  if (t.steps.empty() || t.steps.front() != t.seed_set) return "steps[0] differs from the seed set";
  std::vector<int> step_of(g.num_nodes(), -1);
  std::size_t total = 0;
  for (std::size_t k = 0; k < t.steps.size(); ++k)
    for (NodeId v : t.steps[k]) {
      if (v >= g.num_nodes()) return "step node out of range";
      if (step_of[v] != -1) return "node " + std::to_string(v) + " appears in two steps";
      step_of[v] = static_cast<int>(k);
      ++total;
    }
  if (total != t.final_active.size()) return "steps do not partition final_active";
  for (NodeId v : t.final_active)
    if (step_of[v] == -1) return "final node " + std::to_string(v) + " missing from steps";

  std::vector<std::uint32_t> last(g.num_nodes(), 0);
  std::vector<char> succeeded(g.num_nodes(), 0);
  for (const Observation& o : t.observations) {
    if (o.attacker >= g.num_nodes() || o.target >= g.num_nodes()) return "observation out of range";
    if (!g.edge_id(o.attacker, o.target)) return "observation on a non-edge";
    if (succeeded[o.target]) return "attempt on node " + std::to_string(o.target) + " after its activation";
    if (o.attempt != last[o.target] + 1) return "attempt indices on node " + std::to_string(o.target) + " not contiguous";
    last[o.target] = o.attempt;
    const int su = step_of[o.attacker];
    const int sv = step_of[o.target];
    if (su == -1) return "inactive attacker " + std::to_string(o.attacker);
    if (sv != -1 && sv <= su) return "target " + std::to_string(o.target) + " already active at attempt";
    if (o.success) {
      if (sv != su + 1) return "successful attempt does not activate target at the next step";
      succeeded[o.target] = 1;
    }
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (step_of[v] > 0 && !succeeded[v]) return "node " + std::to_string(v) + " active without a success";
  return std::nullopt;
}

}  // namespace dcim
