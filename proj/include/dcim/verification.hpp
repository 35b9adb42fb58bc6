#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dcim/cascade.hpp"
#include "dcim/experiment.hpp"
#include "dcim/graph.hpp"
#include "dcim/model.hpp"
#include "dcim/oracle.hpp"
#include "dcim/policies.hpp"
#include "dcim/spread.hpp"

namespace dcim::verify {

struct CheckResult {
  std::string name;
  enum class Status { pass, fail, skip } status = Status::fail;
  std::string detail;
  double seconds = 0.0;

  bool passed() const { return status == Status::pass; }
};

inline const char* status_label(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::pass: return "PASS";
    case CheckResult::Status::fail: return "FAIL";
    case CheckResult::Status::skip: return "SKIP";
  }
  return "?";
}

inline std::string format_line(const CheckResult& r) {
  std::ostringstream out;
  out << status_label(r.status) << "  " << r.name << "  (" << r.detail << "; "
      << std::round(r.seconds * 100.0) / 100.0 << " s)";
  return out.str();
}

template <class Body>
CheckResult timed(std::string name, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r = body();
  r.name = std::move(name);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline CheckResult verdict(bool ok, std::string detail) {
  return {"", ok ? CheckResult::Status::pass : CheckResult::Status::fail, std::move(detail), 0.0};
}

// ---------------------------------------------------------------------------
// Instance generators

/// Random digraph on 2..max_nodes nodes with at most max_edges edges.
inline DirectedGraph random_tiny_graph(Stream& rng, std::size_t max_nodes, std::size_t max_edges) {
  const std::size_t n = 2 + static_cast<std::size_t>(rng.below(max_nodes - 1));
  const double density = rng.uniform(0.15, 0.7);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v && rng.bernoulli(density)) edges.push_back({u, v});
  while (edges.size() > max_edges) edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(rng.below(edges.size())));
  return DirectedGraph(n, std::move(edges));
}

inline ActivationModel random_decreasing_model(const DirectedGraph& g, Stream& rng) {
  return sample_count_dc_model(g, 0.0, 1.0, rng);
}

/// A decreasing model dominated slotwise by `upper`: each slot is a random
/// fraction of the upper value, then capped by its predecessor.
inline ActivationModel random_dominated_model(const ActivationModel& upper, Stream& rng) {
  std::vector<std::vector<double>> probs(upper.num_nodes());
  for (NodeId v = 0; v < upper.num_nodes(); ++v) {
    auto hi = upper.node_probs(v);
    double prev = 1.0;
    for (double h : hi) {
      const double x = rng.bernoulli(0.2) ? h : h * rng.uniform();
      prev = std::min(prev, x);
      probs[v].push_back(prev);
    }
  }
  return ActivationModel::count_dc(std::move(probs));
}

inline NodeSet random_seeds(std::size_t n, std::size_t max_size, Stream& rng) {
  const std::size_t size = 1 + static_cast<std::size_t>(rng.below(std::min(max_size, n)));
  std::vector<NodeId> ids(n);
  for (NodeId v = 0; v < n; ++v) ids[v] = v;
  for (std::size_t i = 0; i < size; ++i) std::swap(ids[i], ids[i + rng.below(n - i)]);
  ids.resize(size);
  return NodeSet(std::move(ids));
}

inline DirectedGraph path3() { return DirectedGraph(3, {{0, 1}, {1, 2}}); }
inline DirectedGraph diamond() { return DirectedGraph(3, {{0, 2}, {1, 2}}); }

// ---------------------------------------------------------------------------
// Acceptance criteria 1-7 (exact / Monte-Carlo checks on tiny instances)

inline CheckResult tpm_inequality(std::size_t instances = 200, std::uint64_t seed = 101) {
  Stream rng(seed);
  std::size_t held = 0;
  double worst_slack = INFINITY;
  for (std::size_t k = 0; k < instances; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 6, 14);
    const ActivationModel upper = random_decreasing_model(g, rng);
    const ActivationModel lower = random_dominated_model(upper, rng);
    const NodeSet seeds = random_seeds(g.num_nodes(), 2, rng);
    const TpmResult r = tpm_check(g, lower, upper, seeds);
    if (r.holds) ++held;
    worst_slack = std::min(worst_slack, r.rhs - r.lhs);
  }
  std::ostringstream d;
  d << held << "/" << instances << " hold, min rhs-lhs " << worst_slack;
  return verdict(held == instances, d.str());
}

inline CheckResult spread_monotonicity(std::size_t instances = 200, std::uint64_t seed = 202) {
  Stream rng(seed);
  std::size_t ok = 0;
  for (std::size_t k = 0; k < instances; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 6, 14);
    const ActivationModel upper = random_decreasing_model(g, rng);
    const ActivationModel lower = random_dominated_model(upper, rng);
    const NodeSet seeds = random_seeds(g.num_nodes(), 2, rng);
    if (exact_spread(g, lower, seeds) <= exact_spread(g, upper, seeds) + 1e-12) ++ok;
  }
  return verdict(ok == instances, std::to_string(ok) + "/" + std::to_string(instances) + " monotone");
}

inline CheckResult cap_preservation(std::size_t trials = 1000, std::uint64_t seed = 303) {
  const std::vector<double> literal = cap_decreasing({0.4, 0.7, 0.6});
  const bool literal_ok = literal == std::vector<double>{0.4, 0.4, 0.4};
  Stream rng(seed);
  std::size_t ok = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const std::size_t len = 1 + static_cast<std::size_t>(rng.below(12));
    std::vector<double> truth(len), raw(len);
    for (double& p : truth) p = rng.uniform();
    std::sort(truth.begin(), truth.end(), std::greater<>());
    for (std::size_t i = 0; i < len; ++i) raw[i] = rng.bernoulli(0.2) ? truth[i] : rng.uniform(truth[i], 1.0);
    const auto capped = cap_decreasing(raw);
    bool good = true;
    for (std::size_t i = 0; i < len; ++i) good = good && truth[i] <= capped[i];
    if (good) ++ok;
  }
  return verdict(literal_ok && ok == trials,
                 std::to_string(ok) + "/" + std::to_string(trials) + " vectors, literal [0.4,0.7,0.6] -> " +
                     (literal_ok ? "[0.4,0.4,0.4]" : "wrong"));
}

inline CheckResult exact_vs_mc(std::uint64_t seed = 404) {
  struct Case {
    const char* name;
    DirectedGraph g;
    ActivationModel model;
    NodeSet seeds;
    double exact;
  };
  std::vector<Case> cases;
  cases.push_back({"path", path3(), ActivationModel::count_dc({{}, {0.5}, {0.5}}), NodeSet{0}, 1.75});
  cases.push_back({"diamond", diamond(), ActivationModel::count_dc({{}, {}, {0.5, 0.25}}), NodeSet{0, 1}, 2.625});
  bool ok = true;
  std::ostringstream d;
  Stream rng(seed);
  for (const auto& c : cases) {
    const double exact = exact_spread(c.g, c.model, c.seeds);
    const SpreadEstimate est = estimate_spread_mc(c.g, c.model, c.seeds, 100000, rng);
    const bool good = std::abs(exact - c.exact) < 1e-12 && std::abs(est.mean - exact) <= 3.0 * est.std_error &&
                      est.std_error < 0.005;
    ok = ok && good;
    d << (&c == &cases.front() ? "" : "; ") << c.name << " exact " << exact << " mc " << est.mean << "+-"
      << est.std_error;
  }
  return verdict(ok, d.str());
}

inline CheckResult order_invariance(std::size_t pairs = 200, std::uint64_t seed = 505) {
  Stream rng(seed);
  std::size_t ok = 0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 10, 40);
    const ActivationModel model = random_decreasing_model(g, rng);
    const CoinTable coins = draw_coins(g, model, rng);
    const NodeSet seeds = random_seeds(g.num_nodes(), 3, rng);
    const CoinCascade up = simulate_with_coins(g, seeds, coins, AttemptOrder::ascending);
    const CoinCascade down = simulate_with_coins(g, seeds, coins, AttemptOrder::descending);
    if (up.final_active == down.final_active && up.failures == down.failures) ++ok;
  }
  return verdict(ok == pairs, std::to_string(ok) + "/" + std::to_string(pairs) + " identical");
}

inline CheckResult ic_equivalence(std::size_t instances = 50, std::uint64_t seed = 606) {
  Stream rng(seed);
  std::size_t ok = 0;
  double worst_z = 0.0;
  std::string outliers;
  for (std::size_t k = 0; k < instances; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 6, 14);
    std::map<NodeId, double> per_node;
    for (NodeId v = 0; v < g.num_nodes(); ++v) per_node[v] = rng.uniform();
    const ActivationModel dc = homogeneous_model(g, per_node, 0.0);
    const ActivationModel ic = matched_edge_ic(g, dc);
    const NodeSet seeds = random_seeds(g.num_nodes(), 2, rng);
    const double exact = exact_spread(g, dc, seeds);
    const SpreadEstimate est = estimate_spread_mc(g, ic, seeds, 100000, rng);
    const double gap = std::abs(est.mean - exact);
    if (est.std_error > 0) worst_z = std::max(worst_z, gap / est.std_error);
    if (gap <= 3.0 * est.std_error + 1e-9) {
      ++ok;
      continue;
    }
    // Outlier: re-estimate with 200x the samples to tell noise from bias.
    Stream confirm(derive_seed(seed, {k}));
    const SpreadEstimate big = estimate_spread_mc(g, ic, seeds, 20000000, confirm);
    std::ostringstream line;
    line << "; instance " << k << " z " << gap / est.std_error << " at 1e5, z "
         << (big.mean - exact) / big.std_error << " at 2e7";
    outliers += line.str();
  }
  std::ostringstream d;
  d << ok << "/" << instances << " within 3 stderr, max |z| " << worst_z << outliers;
  return verdict(ok == instances, d.str());
}

inline CheckResult greedy_quality(std::size_t instances = 100, std::uint64_t seed = 707) {
  Stream rng(seed);
  std::size_t ok = 0;
  double worst = INFINITY;
  for (std::size_t k = 0; k < instances; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 6, 12);
    const ActivationModel model = random_decreasing_model(g, rng);
    const std::size_t budget = 1 + static_cast<std::size_t>(rng.below(std::min<std::size_t>(3, g.num_nodes())));
    const BestSeedSet best = exact_best_seed_set(g, model, budget);
    const NodeSet exact_greedy = greedy_maximize(
        g.num_nodes(), budget, [&](const NodeSet& s) { return exact_spread(g, model, s); }, true);
    const NodeSet mc_greedy = greedy_oracle(g, model, {budget, 200, true, rng.next()});
    const double a = exact_spread(g, model, exact_greedy);
    const double b = exact_spread(g, model, mc_greedy);
    const double bound = greedy_alpha * best.value;
    if (a >= bound - 1e-12 && b >= bound - 1e-12) ++ok;
    worst = std::min({worst, a / best.value, b / best.value});
  }
  std::ostringstream d;
  d << ok << "/" << instances << " reach (1-1/e) opt, worst ratio " << worst;
  return verdict(ok == instances, d.str());
}

// ---------------------------------------------------------------------------
// Additional invariants exercised by `dcim verify`

inline CheckResult trace_validity(std::size_t traces = 2000, std::uint64_t seed = 808) {
  Stream rng(seed);
  std::size_t ok = 0;
  std::string first_issue;
  for (std::size_t k = 0; k < traces; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 12, 60);
    const ActivationModel model = rng.bernoulli(0.5) ? random_decreasing_model(g, rng)
                                                     : matched_edge_ic(g, homogeneous_model(g, rng.uniform()));
    const NodeSet seeds = random_seeds(g.num_nodes(), 3, rng);
    const DiffusionTrace t = simulate(g, model, seeds, rng);
    auto issue = check_trace(g, t);
    if (!issue) ++ok;
    else if (first_issue.empty()) first_issue = *issue;
  }
  return verdict(ok == traces, std::to_string(ok) + "/" + std::to_string(traces) + " valid" +
                                   (first_issue.empty() ? "" : ", first issue: " + first_issue));
}

/// Total variation between final-set frequencies of simulate and of
/// simulate_with_coins fed with freshly drawn coin tables.
inline CheckResult determinization_consistency(std::size_t samples = 100000, std::uint64_t seed = 909) {
  Stream rng(seed);
  double worst = 0.0;
  for (int instance = 0; instance < 3; ++instance) {
    const DirectedGraph g = random_tiny_graph(rng, 5, 10);
    const ActivationModel model = random_decreasing_model(g, rng);
    const NodeSet seeds = random_seeds(g.num_nodes(), 2, rng);
    std::map<NodeSet, double> direct, coins;
    CascadeWorkspace ws;
    for (std::size_t s = 0; s < samples; ++s) {
      direct[simulate(g, model, seeds, rng, ws).final_active] += 1.0;
      coins[simulate_with_coins(g, seeds, draw_coins(g, model, rng), ws).final_active] += 1.0;
    }
    double tv = 0.0;
    for (const auto& [set, c] : direct) tv += std::abs(c - coins[set]);
    for (const auto& [set, c] : coins)
      if (!direct.count(set)) tv += c;
    worst = std::max(worst, 0.5 * tv / static_cast<double>(samples));
  }
  std::ostringstream d;
  d << "max total variation " << worst;
  return verdict(worst < 0.01, d.str());
}

inline CheckResult seed_monotone_coins(std::size_t trials = 500, std::uint64_t seed = 1010) {
  Stream rng(seed);
  std::size_t ok = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 10, 40);
    const CoinTable coins = draw_coins(g, random_decreasing_model(g, rng), rng);
    const NodeSet seeds = random_seeds(g.num_nodes(), 3, rng);
    const NodeSet more = seeds.with(static_cast<NodeId>(rng.below(g.num_nodes())));
    const NodeSet a = simulate_with_coins(g, seeds, coins).final_active;
    const NodeSet b = simulate_with_coins(g, more, coins).final_active;
    if (std::includes(b.begin(), b.end(), a.begin(), a.end())) ++ok;
  }
  return verdict(ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " monotone");
}

inline CheckResult mc_exact_agreement(std::size_t trials = 200, std::uint64_t seed = 1111) {
  Stream rng(seed);
  std::size_t ok = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 6, 12);
    const ActivationModel model = random_decreasing_model(g, rng);
    const NodeSet seeds = random_seeds(g.num_nodes(), 2, rng);
    const double exact = exact_spread(g, model, seeds);
    const SpreadEstimate est = estimate_spread_mc(g, model, seeds, 5000, rng);
    if (std::abs(est.mean - exact) <= 3.0 * est.std_error + 1e-9) ++ok;
  }
  return verdict(static_cast<double>(ok) >= 0.99 * static_cast<double>(trials),
                 std::to_string(ok) + "/" + std::to_string(trials) + " within 3 stderr (need 99%)");
}

inline CheckResult observation_prefix_monotone(std::size_t trials = 200, std::uint64_t seed = 1212) {
  Stream rng(seed);
  std::size_t ok = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 6, 14);
    const ActivationModel model = random_decreasing_model(g, rng);
    const NodeSet seeds = random_seeds(g.num_nodes(), 2, rng);
    const auto stats = exact_cascade_stats(g, model, seeds);
    bool good = stats.spread >= static_cast<double>(seeds.size()) - 1e-12 &&
                stats.spread <= static_cast<double>(reachable_set(g, seeds).size()) + 1e-12;
    for (const auto& row : stats.observation_probs)
      for (std::size_t i = 0; i < row.size(); ++i)
        good = good && row[i] >= -1e-12 && row[i] <= 1.0 + 1e-12 && (i == 0 || row[i] <= row[i - 1] + 1e-12);
    if (good) ++ok;
  }
  return verdict(ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " prefix-monotone and bounded");
}

inline CheckResult lazy_plain_equivalence(std::size_t trials = 100, std::uint64_t seed = 1313) {
  Stream rng(seed);
  std::size_t ok = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const DirectedGraph g = random_tiny_graph(rng, 6, 12);
    const ActivationModel model = random_decreasing_model(g, rng);
    const std::size_t budget = 1 + static_cast<std::size_t>(rng.below(g.num_nodes()));
    auto f = [&](const NodeSet& s) { return exact_spread(g, model, s); };
    if (greedy_maximize(g.num_nodes(), budget, f, true) == greedy_maximize(g.num_nodes(), budget, f, false)) ++ok;
  }
  return verdict(ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " identical (exact evaluator)");
}

inline std::vector<std::function<CheckResult()>> quick_suite() {
  return {
      [] { return timed("C1 TPM inequality (200 instances)", [] { return tpm_inequality(); }); },
      [] { return timed("C2 spread monotone in probabilities (200 instances)", [] { return spread_monotonicity(); }); },
      [] { return timed("C3 cap preservation (1000 vectors)", [] { return cap_preservation(); }); },
      [] { return timed("C4 exact vs Monte-Carlo (path, diamond)", [] { return exact_vs_mc(); }); },
      [] { return timed("C5 order invariance (200 coin tables)", [] { return order_invariance(); }); },
      [] { return timed("C6 IC equivalence (50 homogeneous instances)", [] { return ic_equivalence(); }); },
      [] { return timed("C7 greedy quality (100 instances)", [] { return greedy_quality(); }); },
  };
}

inline std::vector<std::function<CheckResult()>> invariant_suite() {
  return {
      [] { return timed("trace validity fuzz", [] { return trace_validity(); }); },
      [] { return timed("determinization consistency", [] { return determinization_consistency(); }); },
      [] { return timed("seed monotonicity per coin table", [] { return seed_monotone_coins(); }); },
      [] { return timed("MC/exact agreement", [] { return mc_exact_agreement(); }); },
      [] { return timed("observation probabilities prefix-monotone", [] { return observation_prefix_monotone(); }); },
      [] { return timed("CELF/plain greedy equivalence", [] { return lazy_plain_equivalence(); }); },
  };
}

// ---------------------------------------------------------------------------
// Learning criteria 8-10

struct LearningOutcome {
  std::map<std::string, double> final_avg_reward;  // mean over runs at t = T
  std::vector<std::vector<RoundRecord>> dcucb_runs;
  ExperimentInstance instance;
};

inline ExperimentConfig synthetic_config(const std::string& policy) {
  ExperimentConfig cfg;
  cfg.graph.kind = GraphSource::Kind::erdos_renyi;
  cfg.graph.n = 20;
  cfg.graph.p = 0.2;
  cfg.graph.seed = 2021;
  cfg.model.kind = ModelSource::Kind::sampled;
  cfg.model.lo = 0.1;
  cfg.model.hi = 0.5;
  cfg.model.seed = 2022;
  cfg.policy = policy;
  cfg.k = 2;
  cfg.horizon = 10000;
  cfg.runs = 10;
  cfg.seed = 7;
  return cfg;
}

inline LearningOutcome run_synthetic(const std::vector<std::string>& policies) {
  LearningOutcome out;
  out.instance = prepare_instance(synthetic_config(policies.front()));
  for (const auto& name : policies) {
    const ExperimentConfig cfg = synthetic_config(name);
    const ExperimentResult res = run_experiment(cfg, out.instance);
    out.final_avg_reward[name] = res.aggregate.back().mean;
    if (name == "dc-ucb") out.dcucb_runs = res.runs;
  }
  return out;
}

inline CheckResult learning_ranking(const LearningOutcome& o) {
  const double dc = o.final_avg_reward.at("dc-ucb");
  bool ok = true;
  std::ostringstream d;
  d << "n=" << o.instance.graph.num_nodes() << " m=" << o.instance.graph.num_edges() << " dc-ucb " << dc;
  for (const char* base : {"cmab-avg", "cmab-rand", "flat-ucb"}) {
    const double b = o.final_avg_reward.at(base);
    ok = ok && dc > b;
    d << ", " << base << " " << b << " (gap " << 100.0 * (dc - b) / dc << "%)";
  }
  const double avg_gap = (dc - o.final_avg_reward.at("cmab-avg")) / dc;
  ok = ok && avg_gap >= 0.03;
  return verdict(ok, d.str());
}

inline double window_mean(const std::vector<double>& xs, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += xs[i];
  return s / static_cast<double>(to - from);
}

/// Mean per-round regret in the first and last 1000 rounds, averaged over
/// runs, for a given per-round spread function and scaling.
template <class SpreadOf>
std::pair<double, double> regret_windows(const std::vector<std::vector<RoundRecord>>& runs, double target,
                                         SpreadOf&& spread_of) {
  double first = 0.0, last = 0.0;
  for (const auto& run : runs) {
    std::vector<double> inc;
    for (const auto& r : run) inc.push_back(std::max(0.0, target - spread_of(r)));
    first += window_mean(inc, 0, 1000);
    last += window_mean(inc, inc.size() - 1000, inc.size());
  }
  return {first / static_cast<double>(runs.size()), last / static_cast<double>(runs.size())};
}

inline CheckResult regret_trend(const LearningOutcome& o) {
  const auto& runs = o.dcucb_runs;
  double first = 0.0, last = 0.0;
  for (const auto& run : runs) {
    std::vector<double> inc;
    for (const auto& r : run) inc.push_back(r.regret_inc);
    first += window_mean(inc, 0, 1000);
    last += window_mean(inc, inc.size() - 1000, inc.size());
  }
  first /= static_cast<double>(runs.size());
  last /= static_cast<double>(runs.size());
  std::ostringstream d;
  d << "realized-reward regret, alpha*beta=" << greedy_alpha << ": rounds 1-1000 " << first
    << ", rounds 9001-10000 " << last << ", ratio " << (first > 0 ? last / first : INFINITY) << " (need < 0.5)";
  return verdict(first > 0 && last < 0.5 * first, d.str());
}

inline CheckResult real_network_ranking(const std::string& label, const std::string& path) {
  if (path.empty())
    return {"", CheckResult::Status::skip, "no " + label + " edge list supplied (set DCIM_" + label + ")", 0.0};
  std::map<std::string, double> finals;
  ExperimentConfig base;
  base.graph.kind = GraphSource::Kind::extract;
  base.graph.path = path;
  base.graph.seed = 2023;
  base.model.kind = ModelSource::Kind::sampled;
  base.model.seed = 2024;
  base.k = 10;
  base.horizon = 2000;
  base.runs = 3;
  base.seed = 11;
  base.opt_mode = "mc";
  const ExperimentInstance inst = prepare_instance(base);
  for (const char* name : {"dc-ucb", "cmab-avg", "cmab-rand", "cucb-ic"}) {
    ExperimentConfig cfg = base;
    cfg.policy = name;
    finals[name] = run_experiment(cfg, inst).aggregate.back().mean;
  }
  bool ok = true;
  std::ostringstream d;
  d << label << " n=" << inst.graph.num_nodes() << " m=" << inst.graph.num_edges();
  for (const auto& [name, v] : finals) {
    d << ", " << name << " " << v;
    if (name != "dc-ucb") ok = ok && finals["dc-ucb"] > v;
  }
  return verdict(ok, d.str());
}

}  // namespace dcim::verify
