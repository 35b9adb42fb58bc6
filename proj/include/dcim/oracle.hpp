#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "dcim/cascade.hpp"
#include "dcim/graph.hpp"
#include "dcim/model.hpp"
#include "dcim/rng.hpp"
#include "dcim/spread.hpp"

namespace dcim {

struct OracleConfig {
  std::size_t k = 1;
  std::size_t mc_samples_per_eval = 200;
  bool lazy = true;
  std::uint64_t seed = 0;
};

inline constexpr double greedy_alpha = 1.0 - 1.0 / 2.718281828459045;

/// Greedy maximization of a set function f over subsets of {0..n-1} of size
/// k. Each step adds the element with the largest marginal gain; ties go to
/// the smallest id. With lazy = true, stale gains are kept in a max-heap and
/// only the top is re-evaluated (CELF). For submodular f both variants return
/// the same set.
template <class SetFunction>
NodeSet greedy_maximize(std::size_t n, std::size_t k, SetFunction&& f, bool lazy) {
  if (k > n) throw Error("greedy: K=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  NodeSet chosen;
  double base = f(chosen);

  if (!lazy) {
    std::vector<char> taken(n, 0);
    while (chosen.size() < k) {
      NodeId best = 0;
      double best_gain = -INFINITY;
      double best_value = 0.0;
      for (NodeId v = 0; v < n; ++v) {
        if (taken[v]) continue;
        const double value = f(chosen.with(v));
        if (value - base > best_gain) {
          best_gain = value - base;
          best = v;
          best_value = value;
        }
      }
      taken[best] = 1;
      chosen.insert(best);
      base = best_value;
    }
    return chosen;
  }

  struct Entry {
    double gain;
    NodeId node;
    std::size_t round;  // |chosen| when the gain was computed
    double value;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    return a.gain != b.gain ? a.gain < b.gain : a.node > b.node;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (NodeId v = 0; v < n; ++v) {
    const double value = f(NodeSet{v});
    heap.push({value - base, v, 0, value});
  }
  while (chosen.size() < k) {
    Entry top = heap.top();
    heap.pop();
    if (top.round == chosen.size()) {
      chosen.insert(top.node);
      base = top.value;
      continue;
    }
    top.value = f(chosen.with(top.node));
    top.gain = top.value - base;
    top.round = chosen.size();
    heap.push(top);
  }
  return chosen;
}

/// A fixed sample of determinized cascades ("worlds") on which any seed set
/// can be scored. Every candidate is evaluated on the same worlds, so the
/// estimate is a deterministic set function.
///
/// A count_dc world stores, per node, the index of the first successful coin
/// (in_degree + 1 if none): v ends up active iff at least that many of its
/// in-neighbors do, which is exactly the final set simulate_with_coins gives
/// for the underlying coin table. An edge_ic world stores one live bit per
/// edge.
class WorldSample {
 public:
  WorldSample(const DirectedGraph& g, const ActivationModel& model, std::size_t num_worlds,
              Stream& rng)
      : g_(&g), count_dc_(model.is_count_dc()), num_worlds_(num_worlds) {
    if (num_worlds < 1) throw Error("world sample: need at least one world");
    const std::size_t n = g.num_nodes();
    if (count_dc_) {
      thresholds_.resize(num_worlds * n);
      for (std::size_t w = 0; w < num_worlds; ++w)
        for (NodeId v = 0; v < n; ++v) {
          auto probs = model.node_probs(v);
          std::uint32_t first = static_cast<std::uint32_t>(probs.size()) + 1;
          for (std::size_t i = 0; i < probs.size(); ++i)
            if (rng.bernoulli(probs[i])) {
              first = static_cast<std::uint32_t>(i) + 1;
              break;
            }
          thresholds_[w * n + v] = first;
        }
    } else {
      const std::size_t m = g.num_edges();
      live_.resize(num_worlds * m);
      for (std::size_t w = 0; w < num_worlds; ++w)
        for (std::size_t e = 0; e < m; ++e) live_[w * m + e] = rng.bernoulli(model.edge_prob(e)) ? 1 : 0;
    }
    hits_.assign(n, 0);
    stamp_.assign(n, 0);
  }

  std::size_t num_worlds() const noexcept { return num_worlds_; }

  std::size_t world_spread(std::size_t w, const NodeSet& seeds) {
    const DirectedGraph& g = *g_;
    const std::size_t n = g.num_nodes();
    ++epoch_;
    queue_.clear();
    for (NodeId s : seeds) {
      stamp_[s] = epoch_;
      hits_[s] = active_mark;
      queue_.push_back(s);
    }
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const NodeId u = queue_[head];
      auto outs = g.out_neighbors(u);
      for (std::size_t k = 0; k < outs.size(); ++k) {
        const NodeId v = outs[k];
        if (stamp_[v] != epoch_) {
          stamp_[v] = epoch_;
          hits_[v] = 0;
        }
        if (hits_[v] == active_mark) continue;
        bool fire;
        if (count_dc_) {
          fire = ++hits_[v] >= thresholds_[w * n + v];
        } else {
          fire = live_[w * g.num_edges() + g.out_edge_begin(u) + k] != 0;
        }
        if (fire) {
          hits_[v] = active_mark;
          queue_.push_back(v);
        }
      }
    }
    return queue_.size();
  }

  double mean_spread(const NodeSet& seeds) {
    std::size_t total = 0;
    for (std::size_t w = 0; w < num_worlds_; ++w) total += world_spread(w, seeds);
    return static_cast<double>(total) / static_cast<double>(num_worlds_);
  }

 private:
  static constexpr std::uint32_t active_mark = UINT32_MAX;

  const DirectedGraph* g_;
  bool count_dc_;
  std::size_t num_worlds_;
  std::vector<std::uint32_t> thresholds_;
  std::vector<char> live_;
  std::vector<std::uint32_t> hits_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
  std::vector<NodeId> queue_;
};

/// The (alpha, beta)-approximation oracle: greedy on Monte-Carlo spread
/// estimates, every estimate drawn from the same cfg.mc_samples_per_eval
/// worlds seeded by cfg.seed.
inline NodeSet greedy_oracle(const DirectedGraph& g, const ActivationModel& model,
                             const OracleConfig& cfg) {
  if (cfg.k < 1) throw Error("oracle: K must be at least 1");
  if (cfg.mc_samples_per_eval < 1) throw Error("oracle: need at least one sample per evaluation");
  if (cfg.k > g.num_nodes())
    throw Error("oracle: K=" + std::to_string(cfg.k) + " exceeds n=" + std::to_string(g.num_nodes()));
  Stream rng(cfg.seed);
  WorldSample worlds(g, model, cfg.mc_samples_per_eval, rng);
  return greedy_maximize(g.num_nodes(), cfg.k,
                         [&](const NodeSet& s) { return worlds.mean_spread(s); }, cfg.lazy);
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

/// Number of non-empty subsets of an n-set with at most k elements.
inline double count_seed_sets(std::size_t n, std::size_t k) {
  double total = 0.0;
  for (std::size_t s = 1; s <= k && s <= n; ++s) total += binomial(n, s);
  return total;
}

/// Visits every non-empty subset of {0..n-1} with at most k members: by size,
/// then lexicographically within a size. Stops early when visit returns false.
template <class Visit>
void for_each_seed_set(std::size_t n, std::size_t k, Visit&& visit) {
  for (std::size_t size = 1; size <= k && size <= n; ++size) {
    std::vector<NodeId> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = static_cast<NodeId>(i);
    while (true) {
      if (!visit(NodeSet(idx))) return;
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

struct BestSeedSet {
  NodeSet seeds;
  double value = 0.0;
};

/// Exhaustive optimum over non-empty sets of size <= k with exact spreads.
/// Ties (within 1e-12) resolve to the lexicographically smallest set.
inline BestSeedSet exact_best_seed_set(const DirectedGraph& g, const ActivationModel& model,
                                       std::size_t k, ExactOptions opts = {},
                                       double max_sets = 1e5) {
  if (k < 1) throw Error("exact optimum: K must be at least 1");
  const double sets = count_seed_sets(g.num_nodes(), k);
  if (sets > max_sets)
    throw CapExceeded("exact optimum: " + std::to_string(static_cast<long long>(sets)) +
                      " candidate sets exceed cap");
  if (g.num_slots() > opts.max_slots)
    throw CapExceeded("exact optimum: graph exceeds the enumeration cap");
  BestSeedSet best;
  bool have = false;
  for_each_seed_set(g.num_nodes(), k, [&](const NodeSet& s) {
    const double value = exact_spread(g, model, s, opts);
    if (!have || value > best.value + 1e-12 ||
        (std::abs(value - best.value) <= 1e-12 && s < best.seeds)) {
      best = {s, value};
      have = true;
    }
    return true;
  });
  return best;
}

}  // namespace dcim
