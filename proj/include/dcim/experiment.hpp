#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dcim/cascade.hpp"
#include "dcim/graph.hpp"
#include "dcim/io.hpp"
#include "dcim/model.hpp"
#include "dcim/oracle.hpp"
#include "dcim/policies.hpp"
#include "dcim/rng.hpp"
#include "dcim/spread.hpp"

namespace dcim {

struct GraphSource {
  enum class Kind { file, erdos_renyi, extract } kind = Kind::erdos_renyi;
  std::string path;
  std::size_t n = 20;
  double p = 0.2;
  std::optional<std::uint64_t> seed;
  std::size_t degree_lo = 20;
  std::size_t degree_hi = 120;
  std::size_t pivots = 10;
};

struct ModelSource {
  enum class Kind { file, sampled, homogeneous } kind = Kind::sampled;
  std::string path;
  double lo = 0.1;
  double hi = 0.5;
  double p = 0.2;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  GraphSource graph;
  ModelSource model;
  std::string policy = "dc-ucb";
  std::size_t k = 2;
  std::size_t horizon = 10000;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::size_t mc_samples_per_eval = 200;
  bool lazy = true;
  double flat_arm_limit = 1e6;
  std::string opt_mode = "auto";  // auto | exact | mc
  std::size_t opt_samples = 10000;
  double alpha = greedy_alpha;
  double beta = 1.0;
  std::string regret_mode = "realized";  // realized | exact | mc
  std::size_t regret_samples = 10000;
  std::string output;
  std::size_t threads = 0;  // 0: hardware concurrency
};

namespace detail {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

template <class T>
void read_opt(const nlohmann::json& j, const char* key, std::optional<T>& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace detail

/// Parses the JSON experiment description. Unknown top-level keys are
/// rejected so typos surface instead of silently falling back to defaults.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  static const char* known[] = {"graph",   "model",        "policy",      "k",     "horizon",
                                "runs",    "seed",         "mc_samples",  "lazy",  "flat_arm_limit",
                                "opt",     "alpha",        "beta",        "regret",
                                "output",  "threads"};
  for (const auto& [key, _] : j.items())
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known))
      throw Error("config: unknown key '" + key + "'");

  ExperimentConfig cfg;
  try {
    if (j.contains("graph")) {
      const auto& g = j.at("graph");
      const auto type = g.at("type").get<std::string>();
      if (type == "file") cfg.graph.kind = GraphSource::Kind::file;
      else if (type == "erdos_renyi") cfg.graph.kind = GraphSource::Kind::erdos_renyi;
      else if (type == "extract") cfg.graph.kind = GraphSource::Kind::extract;
      else throw Error("config: unknown graph type '" + type + "'");
      detail::read_opt(g, "path", cfg.graph.path);
      detail::read_opt(g, "n", cfg.graph.n);
      detail::read_opt(g, "p", cfg.graph.p);
      detail::read_opt(g, "seed", cfg.graph.seed);
      detail::read_opt(g, "degree_lo", cfg.graph.degree_lo);
      detail::read_opt(g, "degree_hi", cfg.graph.degree_hi);
      detail::read_opt(g, "pivots", cfg.graph.pivots);
    }
    if (j.contains("model")) {
      const auto& m = j.at("model");
      const auto type = m.at("type").get<std::string>();
      if (type == "file") cfg.model.kind = ModelSource::Kind::file;
      else if (type == "sampled") cfg.model.kind = ModelSource::Kind::sampled;
      else if (type == "homogeneous") cfg.model.kind = ModelSource::Kind::homogeneous;
      else throw Error("config: unknown model type '" + type + "'");
      detail::read_opt(m, "path", cfg.model.path);
      detail::read_opt(m, "lo", cfg.model.lo);
      detail::read_opt(m, "hi", cfg.model.hi);
      detail::read_opt(m, "p", cfg.model.p);
      detail::read_opt(m, "seed", cfg.model.seed);
    }
    detail::read_opt(j, "policy", cfg.policy);
    detail::read_opt(j, "k", cfg.k);
    detail::read_opt(j, "horizon", cfg.horizon);
    detail::read_opt(j, "runs", cfg.runs);
    detail::read_opt(j, "seed", cfg.seed);
    detail::read_opt(j, "mc_samples", cfg.mc_samples_per_eval);
    detail::read_opt(j, "lazy", cfg.lazy);
    detail::read_opt(j, "flat_arm_limit", cfg.flat_arm_limit);
    if (j.contains("opt")) {
      const auto& o = j.at("opt");
      detail::read_opt(o, "mode", cfg.opt_mode);
      detail::read_opt(o, "samples", cfg.opt_samples);
    }
    detail::read_opt(j, "alpha", cfg.alpha);
    detail::read_opt(j, "beta", cfg.beta);
    if (j.contains("regret")) {
      const auto& r = j.at("regret");
      detail::read_opt(r, "mode", cfg.regret_mode);
      detail::read_opt(r, "samples", cfg.regret_samples);
    }
    detail::read_opt(j, "output", cfg.output);
    detail::read_opt(j, "threads", cfg.threads);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }

  if (cfg.k < 1) throw Error("config: k must be at least 1");
  if (cfg.horizon < 1) throw Error("config: horizon must be at least 1");
  if (cfg.runs < 1) throw Error("config: runs must be at least 1");
  if (cfg.opt_mode != "auto" && cfg.opt_mode != "exact" && cfg.opt_mode != "mc")
    throw Error("config: opt.mode must be auto, exact or mc");
  if (cfg.regret_mode != "realized" && cfg.regret_mode != "exact" && cfg.regret_mode != "mc")
    throw Error("config: regret.mode must be realized, exact or mc");
  if (std::find(std::begin(policy_names), std::end(policy_names), cfg.policy) == std::end(policy_names))
    throw Error("config: unknown policy '" + cfg.policy + "'");
  if (const char* dir = std::getenv("DCIM_OUTPUT_DIR"); dir && *dir) cfg.output = dir;
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  try {
    return parse_experiment_config(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

/// Graph, ground-truth model and optimum reference shared by every run.
struct ExperimentInstance {
  DirectedGraph graph;
  ActivationModel model;
  NodeSet opt_set;
  double opt_value = 0.0;
  std::string opt_mode;  // "exact" or "mc:<samples>"
};

inline ExperimentInstance prepare_instance(const ExperimentConfig& cfg) {
  ExperimentInstance inst;
  const auto& gs = cfg.graph;
  const std::uint64_t graph_seed =
      gs.seed.value_or(derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamTag::graph)}));
  switch (gs.kind) {
    case GraphSource::Kind::file:
      inst.graph = load_edge_list_file(gs.path);
      break;
    case GraphSource::Kind::erdos_renyi: {
      Stream rng(graph_seed);
      inst.graph = generate_erdos_renyi(gs.n, gs.p, rng);
      break;
    }
    case GraphSource::Kind::extract: {
      Stream rng(graph_seed);
      inst.graph = extract_dense_subgraph(load_edge_list_file(gs.path), gs.degree_lo, gs.degree_hi,
                                          gs.pivots, rng)
                       .graph;
      break;
    }
  }

  const auto& ms = cfg.model;
  const std::uint64_t model_seed =
      ms.seed.value_or(derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamTag::model)}));
  switch (ms.kind) {
    case ModelSource::Kind::file:
      inst.model = load_model_file(inst.graph, ms.path);
      break;
    case ModelSource::Kind::sampled: {
      Stream rng(model_seed);
      inst.model = sample_count_dc_model(inst.graph, ms.lo, ms.hi, rng);
      break;
    }
    case ModelSource::Kind::homogeneous:
      inst.model = homogeneous_model(inst.graph, ms.p);
      break;
  }
  require_valid(inst.graph, inst.model);
  if (cfg.k > inst.graph.num_nodes()) throw Error("config: k exceeds the node count");

  const bool exact_fits = inst.model.is_count_dc() && inst.graph.num_slots() <= ExactOptions{}.max_slots &&
                          count_seed_sets(inst.graph.num_nodes(), cfg.k) <= 1e5;
  if (cfg.opt_mode == "exact" || (cfg.opt_mode == "auto" && exact_fits)) {
    auto best = exact_best_seed_set(inst.graph, inst.model, cfg.k);
    inst.opt_set = best.seeds;
    inst.opt_value = best.value;
    inst.opt_mode = "exact";
  } else {
    const std::uint64_t opt_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamTag::opt)});
    OracleConfig oc{cfg.k, cfg.opt_samples, true, opt_seed};
    inst.opt_set = greedy_oracle(inst.graph, inst.model, oc);
    // Scored on fresh samples so the selection noise does not bias the value.
    Stream rng(derive_seed(opt_seed, {1}));
    inst.opt_value = estimate_spread_mc(inst.graph, inst.model, inst.opt_set, cfg.opt_samples, rng).mean;
    inst.opt_mode = "mc:" + std::to_string(cfg.opt_samples);
  }
  return inst;
}

/// Expected spread r(S, p) of the played sets, used by the exact and mc
/// regret modes. Each set's estimate is seeded from the set itself, so
/// values do not depend on which run asks first.
class SpreadCache {
 public:
  SpreadCache(const ExperimentInstance& inst, const ExperimentConfig& cfg)
      : inst_(inst), exact_(cfg.regret_mode == "exact"), samples_(cfg.regret_samples), seed_(cfg.seed) {}

  double operator()(const NodeSet& seeds) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = values_.find(seeds); it != values_.end()) return it->second;
    }
    double value;
    if (exact_) {
      value = exact_spread(inst_.graph, inst_.model, seeds);
    } else {
      std::uint64_t h = derive_seed(seed_, {static_cast<std::uint64_t>(StreamTag::opt), 2});
      for (NodeId v : seeds) h = derive_seed(h, {v});
      Stream rng(h);
      value = estimate_spread_mc(inst_.graph, inst_.model, seeds, samples_, rng).mean;
    }
    std::lock_guard lock(mutex_);
    values_.emplace(seeds, value);
    return value;
  }

 private:
  const ExperimentInstance& inst_;
  bool exact_;
  std::size_t samples_;
  std::uint64_t seed_;
  std::mutex mutex_;
  std::map<NodeSet, double> values_;
};

struct RoundRecord {
  std::size_t run = 0;
  std::size_t t = 0;
  double reward = 0.0;
  double cum_reward = 0.0;
  double avg_reward = 0.0;
  double regret_inc = 0.0;
  double cum_regret = 0.0;
  NodeSet seeds;
};

/// Cumulative alpha*beta-scaled regret; each round contributes
/// max(0, alpha*beta*opt - reward).
inline std::vector<double> compute_regret_series(const std::vector<double>& rewards,
                                                 double opt_value, double alpha, double beta) {
  if (opt_value < 0.0) throw Error("regret: opt value must be non-negative");
  std::vector<double> out(rewards.size());
  double cum = 0.0;
  const double target = alpha * beta * opt_value;
  for (std::size_t t = 0; t < rewards.size(); ++t) out[t] = cum += std::max(0.0, target - rewards[t]);
  return out;
}

/// One run of a policy against the instance; rounds are t = 1..horizon.
inline std::vector<RoundRecord> run_single(const ExperimentInstance& inst, const ExperimentConfig& cfg,
                                           std::size_t run, SpreadCache* spreads = nullptr) {
  PolicyParams params;
  params.k = cfg.k;
  params.mc_samples_per_eval = cfg.mc_samples_per_eval;
  params.lazy = cfg.lazy;
  params.flat_arm_limit = cfg.flat_arm_limit;
  params.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamTag::policy), run});
  auto policy = make_policy(cfg.policy, inst.graph, params);
  std::optional<SpreadCache> own_spreads;
  if (!spreads) spreads = &own_spreads.emplace(inst, cfg);

  const double target = cfg.alpha * cfg.beta * inst.opt_value;
  std::vector<RoundRecord> records;
  records.reserve(cfg.horizon);
  CascadeWorkspace ws;
  double cum_reward = 0.0;
  double cum_regret = 0.0;
  for (std::size_t t = 1; t <= cfg.horizon; ++t) {
    const NodeSet seeds = policy->select(t);
    Stream rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(StreamTag::diffusion), run, t}));
    const DiffusionTrace trace = simulate(inst.graph, inst.model, seeds, rng, ws);

    RoundRecord rec;
    rec.run = run;
    rec.t = t;
    rec.seeds = seeds;
    rec.reward = static_cast<double>(trace.reward());
    cum_reward += rec.reward;
    rec.cum_reward = cum_reward;
    rec.avg_reward = cum_reward / static_cast<double>(t);
    const double spread = cfg.regret_mode != "realized" ? (*spreads)(seeds) : rec.reward;
    rec.regret_inc = std::max(0.0, target - spread);
    cum_regret += rec.regret_inc;
    rec.cum_regret = cum_regret;
    records.push_back(rec);

    policy->update(trace);
  }
  return records;
}

struct AggregatePoint {
  std::size_t t = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Per-round mean and standard error (sample std / sqrt(runs)) across runs.
inline std::vector<AggregatePoint> aggregate_runs(const std::vector<std::vector<double>>& series) {
  if (series.empty()) return {};
  const std::size_t len = series.front().size();
  for (const auto& s : series)
    if (s.size() != len) throw Error("aggregate: runs have different lengths");
  const double runs = static_cast<double>(series.size());
  std::vector<AggregatePoint> out(len);
  for (std::size_t t = 0; t < len; ++t) {
    double sum = 0.0;
    for (const auto& s : series) sum += s[t];
    const double mean = sum / runs;
    double sq = 0.0;
    for (const auto& s : series) sq += (s[t] - mean) * (s[t] - mean);
    out[t].t = t + 1;
    out[t].mean = mean;
    out[t].std_error = series.size() > 1 ? std::sqrt(sq / (runs - 1.0) / runs) : 0.0;
  }
  return out;
}

struct ExperimentResult {
  ExperimentInstance instance;
  std::vector<std::vector<RoundRecord>> runs;
  std::vector<AggregatePoint> aggregate;
};

inline std::string run_csv(const std::vector<RoundRecord>& records, const ExperimentConfig& cfg,
                           const ExperimentInstance& inst) {
  std::ostringstream out;
  out << "# policy=" << cfg.policy << " alpha=" << format_double(cfg.alpha)
      << " beta=" << format_double(cfg.beta) << " opt=" << format_double(inst.opt_value)
      << " opt_mode=" << inst.opt_mode << " regret_mode=" << cfg.regret_mode << " opt_set=" << to_string(inst.opt_set) << '\n';
  out << "run,t,reward,cum_reward,avg_reward,regret_inc,cum_regret\n";
  for (const RoundRecord& r : records)
    out << r.run << ',' << r.t << ',' << format_double(r.reward) << ',' << format_double(r.cum_reward)
        << ',' << format_double(r.avg_reward) << ',' << format_double(r.regret_inc) << ','
        << format_double(r.cum_regret) << '\n';
  return out.str();
}

inline std::string aggregate_csv(const std::vector<AggregatePoint>& points) {
  std::ostringstream out;
  out << "t,mean_avg_reward,stderr_avg_reward\n";
  for (const auto& p : points) out << p.t << ',' << format_double(p.mean) << ',' << format_double(p.std_error) << '\n';
  return out.str();
}

/// Runs every repetition (in parallel when threads allow) and, when
/// cfg.output is set, writes run_<r>.csv, aggregate.csv and summary.json.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const ExperimentInstance& inst) {
  ExperimentResult result;
  result.instance = inst;
  result.runs.resize(cfg.runs);
  SpreadCache spreads(inst, cfg);

  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.runs);
  if (threads <= 1) {
    for (std::size_t r = 0; r < cfg.runs; ++r) result.runs[r] = run_single(inst, cfg, r, &spreads);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t r = next++; r < cfg.runs; r = next++) result.runs[r] = run_single(inst, cfg, r, &spreads);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<std::vector<double>> avg(cfg.runs);
  for (std::size_t r = 0; r < cfg.runs; ++r)
    for (const auto& rec : result.runs[r]) avg[r].push_back(rec.avg_reward);
  result.aggregate = aggregate_runs(avg);

  if (!cfg.output.empty()) {
    const std::filesystem::path dir(cfg.output);
    for (std::size_t r = 0; r < cfg.runs; ++r)
      write_text_file(dir / ("run_" + std::to_string(r) + ".csv"), run_csv(result.runs[r], cfg, inst));
    write_text_file(dir / "aggregate.csv", aggregate_csv(result.aggregate));
    nlohmann::json summary = {
        {"policy", cfg.policy},
        {"n", inst.graph.num_nodes()},
        {"m", inst.graph.num_edges()},
        {"k", cfg.k},
        {"horizon", cfg.horizon},
        {"runs", cfg.runs},
        {"seed", cfg.seed},
        {"alpha", cfg.alpha},
        {"beta", cfg.beta},
        {"opt_value", inst.opt_value},
        {"opt_mode", inst.opt_mode},
        {"regret_mode", cfg.regret_mode},
        {"opt_set", inst.opt_set.ids()},
        {"final_avg_reward_mean", result.aggregate.back().mean},
        {"final_avg_reward_stderr", result.aggregate.back().std_error},
    };
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, prepare_instance(cfg));
}

}  // namespace dcim
