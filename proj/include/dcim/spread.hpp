#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dcim/cascade.hpp"
#include "dcim/graph.hpp"
#include "dcim/model.hpp"
#include "dcim/rng.hpp"

namespace dcim {

struct SpreadEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t num_samples = 0;
};

/// Monte-Carlo influence spread: mean of |final_active| over independent
/// cascades, with the standard error of that mean.
inline SpreadEstimate estimate_spread_mc(const DirectedGraph& g, const ActivationModel& model,
                                         const NodeSet& seeds, std::size_t num_samples,
                                         Stream& rng) {
  if (num_samples < 1) throw Error("estimate_spread_mc: need at least one sample");
  detail::require_seeds(g, seeds);
  CascadeWorkspace ws;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    const double x = static_cast<double>(sample_cascade_size(g, model, seeds, rng, ws));
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(num_samples);
  SpreadEstimate est;
  est.num_samples = num_samples;
  est.mean = sum / n;
  if (num_samples > 1) {
    const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

struct ExactOptions {
  std::size_t max_slots = 20;  // enumeration visits 2^max_slots coin tables
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// P^S_{v,i}: probability that the i-th attempt on v is executed.
using ObservationProbTable = std::vector<std::vector<double>>;

struct ExactCascadeStats {
  double spread = 0.0;
  ObservationProbTable observation_probs;
};

/// Exact expectation by brute force over every coin table: a cascade is a
/// deterministic function of the table, so the spread is the
/// probability-weighted sum of final-set sizes over all 2^m tables.
inline ExactCascadeStats exact_cascade_stats(const DirectedGraph& g, const ActivationModel& model,
                                             const NodeSet& seeds, ExactOptions opts = {}) {
  if (!model.is_count_dc()) throw Error("exact enumeration requires a count_dc model");
  require_valid(g, model);
  detail::require_seeds(g, seeds);
  const std::size_t m = g.num_slots();
  if (m > opts.max_slots || m >= 63)
    throw CapExceeded("exact enumeration over " + std::to_string(m) + " attempt slots exceeds cap " +
                      std::to_string(opts.max_slots) + "; use Monte-Carlo estimation");

  std::vector<double> slot_prob(m);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto probs = model.node_probs(v);
    for (std::size_t i = 0; i < probs.size(); ++i) slot_prob[g.slot_begin(v) + i] = probs[i];
  }

  ExactCascadeStats out;
  out.observation_probs.resize(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) out.observation_probs[v].assign(g.in_degree(v), 0.0);

  CascadeWorkspace ws;
  std::vector<char> bits(m);
  const std::uint64_t tables = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < tables; ++mask) {
    double weight = 1.0;
    for (std::size_t s = 0; s < m; ++s) {
      const bool on = (mask >> s) & 1U;
      bits[s] = on ? 1 : 0;
      weight *= on ? slot_prob[s] : 1.0 - slot_prob[s];
    }
    if (weight == 0.0) continue;
    const CoinTable coins{std::vector<char>(bits)};
    const CoinCascade run = simulate_with_coins(g, seeds, coins, ws);
    out.spread += weight * static_cast<double>(run.final_active.size());
    for (const Observation& o : run.observations)
      out.observation_probs[o.target][o.attempt - 1] += weight;
  }
  return out;
}

inline double exact_spread(const DirectedGraph& g, const ActivationModel& model,
                           const NodeSet& seeds, ExactOptions opts = {}) {
  return exact_cascade_stats(g, model, seeds, opts).spread;
}

inline ObservationProbTable exact_observation_probs(const DirectedGraph& g,
                                                    const ActivationModel& model,
                                                    const NodeSet& seeds, ExactOptions opts = {}) {
  return exact_cascade_stats(g, model, seeds, opts).observation_probs;
}

struct TpmResult {
  double lhs = 0.0;  // r(S, upper) - r(S, lower)
  double rhs = 0.0;  // observation-probability-weighted slot gaps
  bool holds = false;
};

inline constexpr double tpm_tolerance = 1e-9;

/// Evaluates the triggering-probability-modulated bound
///   r(S, upper) - r(S, lower)
///     <= sum_{v not in S} sum_{u on an S->v path} sum_i P^S_{u,i}(lower) (upper_u(i) - lower_u(i)).
/// u contributes once per downstream target, i.e. |reach(u) \ S| times when u
/// is reachable from S.
inline TpmResult tpm_check(const DirectedGraph& g, const ActivationModel& lower,
                           const ActivationModel& upper, const NodeSet& seeds,
                           ExactOptions opts = {}) {
  require_valid(g, lower);
  require_valid(g, upper);
  if (!dominated_by(lower, upper))
    throw Error("tpm_check: lower model is not elementwise dominated by the upper model");

  const ExactCascadeStats low = exact_cascade_stats(g, lower, seeds, opts);
  const double high_spread = exact_spread(g, upper, seeds, opts);

  const auto from_seeds = reachable_mask(g, seeds);
  TpmResult res;
  res.lhs = high_spread - low.spread;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (!from_seeds[u]) continue;
    const auto reach = reachable_mask(g, NodeSet{u});
    std::size_t multiplicity = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      if (reach[v] && !seeds.contains(v)) ++multiplicity;
    if (multiplicity == 0) continue;
    auto lo = lower.node_probs(u);
    auto hi = upper.node_probs(u);
    double slot_sum = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i)
      slot_sum += low.observation_probs[u][i] * (hi[i] - lo[i]);
    res.rhs += static_cast<double>(multiplicity) * slot_sum;
  }
  res.holds = res.lhs <= res.rhs + tpm_tolerance;
  return res;
}

}  // namespace dcim
