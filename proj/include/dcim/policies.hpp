#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "dcim/cascade.hpp"
#include "dcim/graph.hpp"
#include "dcim/model.hpp"
#include "dcim/oracle.hpp"
#include "dcim/rng.hpp"

namespace dcim {

/// Hoeffding radius sqrt(3 ln t / (2 T)) shared by every policy.
inline double confidence_radius(std::size_t t, std::uint64_t plays) {
  return std::sqrt(3.0 * std::log(static_cast<double>(t)) / (2.0 * static_cast<double>(plays)));
}

/// Select a seed set each round, then learn from that round's cascade.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual NodeSet select(std::size_t t) = 0;
  virtual void update(const DiffusionTrace& trace) = 0;
};

// ---------------------------------------------------------------------------
// DC-UCB

/// Per-slot statistics: T_v(i) observations with empirical mean p_hat_v(i).
struct DcUcbState {
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::vector<double>> means;

  static DcUcbState for_graph(const DirectedGraph& g) {
    DcUcbState s;
    s.counts.resize(g.num_nodes());
    s.means.resize(g.num_nodes());
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      s.counts[v].assign(g.in_degree(v), 0);
      s.means[v].assign(g.in_degree(v), 0.0);
    }
    return s;
  }

  std::uint64_t total_count() const {
    std::uint64_t total = 0;
    for (const auto& row : counts) total = std::accumulate(row.begin(), row.end(), total);
    return total;
  }
};

struct UcbVectors {
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> capped;
};

/// Running minimum along each row, starting from 1: restores the decreasing
/// shape so the capped vector is a valid count_dc model.
inline std::vector<double> cap_decreasing(const std::vector<double>& raw) {
  std::vector<double> capped(raw.size());
  double prev = 1.0;
  for (std::size_t i = 0; i < raw.size(); ++i) capped[i] = prev = std::min(prev, raw[i]);
  return capped;
}

inline UcbVectors dcucb_compute_ucbs(const DcUcbState& state, std::size_t t) {
  if (t < 1) throw Error("dc-ucb: rounds start at t = 1");
  UcbVectors out;
  out.raw.resize(state.counts.size());
  out.capped.resize(state.counts.size());
  for (std::size_t v = 0; v < state.counts.size(); ++v) {
    auto& raw = out.raw[v];
    raw.resize(state.counts[v].size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const std::uint64_t plays = state.counts[v][i];
      raw[i] = plays == 0 ? 1.0
                          : std::clamp(state.means[v][i] + confidence_radius(t, plays), 0.0, 1.0);
    }
    out.capped[v] = cap_decreasing(raw);
  }
  return out;
}

/// Running-mean update for every observed attempt in the trace.
inline void dcucb_update(DcUcbState& state, const DiffusionTrace& trace) {
  std::vector<std::pair<NodeId, std::uint32_t>> seen;
  seen.reserve(trace.observations.size());
  for (const Observation& o : trace.observations) {
    if (o.target >= state.counts.size() || o.attempt < 1 || o.attempt > state.counts[o.target].size())
      throw Error("dc-ucb: observation (" + std::to_string(o.target) + ", " +
                  std::to_string(o.attempt) + ") outside the slot table");
    seen.emplace_back(o.target, o.attempt);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw Error("dc-ucb: trace observes the same attempt slot twice");

  for (const Observation& o : trace.observations) {
    auto& plays = state.counts[o.target][o.attempt - 1];
    auto& mean = state.means[o.target][o.attempt - 1];
    mean = (static_cast<double>(plays) * mean + (o.success ? 1.0 : 0.0)) /
           static_cast<double>(plays + 1);
    ++plays;
  }
}

inline NodeSet dcucb_select(const DcUcbState& state, const DirectedGraph& g,
                            const OracleConfig& cfg, std::size_t t) {
  const UcbVectors ucb = dcucb_compute_ucbs(state, t);
  return greedy_oracle(g, ActivationModel::count_dc(ucb.capped), cfg);
}

class DcUcbPolicy final : public Policy {
 public:
  DcUcbPolicy(const DirectedGraph& g, OracleConfig cfg, std::uint64_t seed)
      : g_(g), cfg_(cfg), seed_(seed), state_(DcUcbState::for_graph(g)) {}

  std::string_view name() const override { return "dc-ucb"; }

  NodeSet select(std::size_t t) override {
    OracleConfig round_cfg = cfg_;
    round_cfg.seed = derive_seed(seed_, {static_cast<std::uint64_t>(StreamTag::oracle), t});
    return dcucb_select(state_, g_, round_cfg, t);
  }

  void update(const DiffusionTrace& trace) override { dcucb_update(state_, trace); }

  const DcUcbState& state() const noexcept { return state_; }

 private:
  const DirectedGraph& g_;
  OracleConfig cfg_;
  std::uint64_t seed_;
  DcUcbState state_;
};

// ---------------------------------------------------------------------------
// Flat UCB: every seed set is its own arm.

class FlatUcbPolicy final : public Policy {
 public:
  FlatUcbPolicy(const DirectedGraph& g, std::size_t k, double max_arms = 1e6)
      : scale_(static_cast<double>(g.num_nodes())) {
    const double arms = count_seed_sets(g.num_nodes(), k);
    if (arms > max_arms)
      throw Error("flat-ucb: " + std::to_string(static_cast<long long>(arms)) +
                  " seed sets exceed the arm limit");
    for_each_seed_set(g.num_nodes(), k, [&](const NodeSet& s) {
      arms_.push_back(s);
      return true;
    });
    counts_.assign(arms_.size(), 0);
    means_.assign(arms_.size(), 0.0);
  }

  std::string_view name() const override { return "flat-ucb"; }

  std::size_t num_arms() const noexcept { return arms_.size(); }
  const std::vector<NodeSet>& arms() const noexcept { return arms_; }
  std::uint64_t count(std::size_t arm) const { return counts_[arm]; }
  double mean(std::size_t arm) const { return means_[arm]; }

  double index(std::size_t arm, std::size_t t) const {
    if (counts_[arm] == 0) return std::numeric_limits<double>::infinity();
    return means_[arm] / scale_ + confidence_radius(t, counts_[arm]);
  }

  NodeSet select(std::size_t t) override {
    std::size_t best = 0;
    double best_index = -1.0;
    for (std::size_t a = 0; a < arms_.size(); ++a) {
      if (counts_[a] == 0) {
        best = a;
        break;
      }
      const double idx = index(a, t);
      if (idx > best_index) {
        best_index = idx;
        best = a;
      }
    }
    last_ = best;
    return arms_[best];
  }

  void update(const DiffusionTrace& trace) override {
    if (arms_[last_] != trace.seed_set) throw Error("flat-ucb: update for a set it did not select");
    record(last_, static_cast<double>(trace.reward()));
  }

  void record(std::size_t arm, double reward) {
    means_[arm] = (static_cast<double>(counts_[arm]) * means_[arm] + reward) /
                  static_cast<double>(counts_[arm] + 1);
    ++counts_[arm];
  }

 private:
  double scale_;
  std::vector<NodeSet> arms_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> means_;
  std::size_t last_ = 0;
};

// ---------------------------------------------------------------------------
// CMAB baselines: nodes are base arms, the seed set is the super arm.

enum class RewardSplit { average, random };

class CmabNodePolicy final : public Policy {
 public:
  CmabNodePolicy(const DirectedGraph& g, std::size_t k, RewardSplit split, std::uint64_t seed)
      : n_(g.num_nodes()), k_(k), split_(split), rng_(seed), counts_(n_, 0), means_(n_, 0.0) {
    if (k > n_) throw Error("cmab: K exceeds n");
  }

  std::string_view name() const override {
    return split_ == RewardSplit::average ? "cmab-avg" : "cmab-rand";
  }

  std::uint64_t count(NodeId v) const { return counts_[v]; }
  double mean(NodeId v) const { return means_[v]; }

  double index(NodeId v, std::size_t t) const {
    if (counts_[v] == 0) return std::numeric_limits<double>::infinity();
    return means_[v] / static_cast<double>(n_) + confidence_radius(t, counts_[v]);
  }

  NodeSet select(std::size_t t) override {
    std::vector<std::pair<double, NodeId>> ranked(n_);
    for (NodeId v = 0; v < n_; ++v) ranked[v] = {index(v, t), v};
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<NodeId> chosen;
    for (std::size_t i = 0; i < k_; ++i) chosen.push_back(ranked[i].second);
    return NodeSet(std::move(chosen));
  }

  void update(const DiffusionTrace& trace) override {
    const NodeSet& s = trace.seed_set;
    if (s.empty()) return;
    const double r = static_cast<double>(trace.reward());
    if (split_ == RewardSplit::average) {
      for (NodeId v : s) record(v, r / static_cast<double>(s.size()));
      return;
    }
    const NodeId lucky = s[static_cast<std::size_t>(rng_.below(s.size()))];
    for (NodeId v : s) record(v, v == lucky ? r : 0.0);
  }

  void record(NodeId v, double reward) {
    means_[v] = (static_cast<double>(counts_[v]) * means_[v] + reward) /
                static_cast<double>(counts_[v] + 1);
    ++counts_[v];
  }

 private:
  std::size_t n_;
  std::size_t k_;
  RewardSplit split_;
  Stream rng_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> means_;
};

// ---------------------------------------------------------------------------
// CUCB with an independent-cascade model: one arm per edge.

class CucbIcPolicy final : public Policy {
 public:
  CucbIcPolicy(const DirectedGraph& g, OracleConfig cfg, std::uint64_t seed)
      : g_(g), cfg_(cfg), seed_(seed), counts_(g.num_edges(), 0), means_(g.num_edges(), 0.0) {}

  std::string_view name() const override { return "cucb-ic"; }

  std::uint64_t count(std::size_t edge) const { return counts_[edge]; }
  double mean(std::size_t edge) const { return means_[edge]; }

  std::vector<double> ucbs(std::size_t t) const {
    std::vector<double> out(counts_.size());
    for (std::size_t e = 0; e < out.size(); ++e)
      out[e] = counts_[e] == 0 ? 1.0 : std::clamp(means_[e] + confidence_radius(t, counts_[e]), 0.0, 1.0);
    return out;
  }

  NodeSet select(std::size_t t) override {
    OracleConfig round_cfg = cfg_;
    round_cfg.seed = derive_seed(seed_, {static_cast<std::uint64_t>(StreamTag::oracle), t});
    return greedy_oracle(g_, ActivationModel::edge_ic(ucbs(t)), round_cfg);
  }

  void update(const DiffusionTrace& trace) override {
    for (const Observation& o : trace.observations) {
      auto id = g_.edge_id(o.attacker, o.target);
      if (!id) throw Error("cucb-ic: observation on a non-edge");
      means_[*id] = (static_cast<double>(counts_[*id]) * means_[*id] + (o.success ? 1.0 : 0.0)) /
                    static_cast<double>(counts_[*id] + 1);
      ++counts_[*id];
    }
  }

 private:
  const DirectedGraph& g_;
  OracleConfig cfg_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> means_;
};

struct PolicyParams {
  std::size_t k = 1;
  std::size_t mc_samples_per_eval = 200;
  bool lazy = true;
  double flat_arm_limit = 1e6;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view policy_names[] = {"dc-ucb", "flat-ucb", "cmab-avg", "cmab-rand",
                                                    "cucb-ic"};

inline std::unique_ptr<Policy> make_policy(std::string_view name, const DirectedGraph& g,
                                           const PolicyParams& p) {
  const OracleConfig cfg{p.k, p.mc_samples_per_eval, p.lazy, 0};
  if (name == "dc-ucb") return std::make_unique<DcUcbPolicy>(g, cfg, p.seed);
  if (name == "flat-ucb") return std::make_unique<FlatUcbPolicy>(g, p.k, p.flat_arm_limit);
  if (name == "cmab-avg") return std::make_unique<CmabNodePolicy>(g, p.k, RewardSplit::average, p.seed);
  if (name == "cmab-rand") return std::make_unique<CmabNodePolicy>(g, p.k, RewardSplit::random, p.seed);
  if (name == "cucb-ic") return std::make_unique<CucbIcPolicy>(g, cfg, p.seed);
  throw Error("unknown policy '" + std::string(name) + "'");
}

}  // namespace dcim
