#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dcim/dcim.hpp"
#include "dcim/verification.hpp"

using namespace dcim;

namespace {

std::uint64_t seed_or(std::uint64_t value, StreamTag tag) {
  return derive_seed(value, {static_cast<std::uint64_t>(tag)});
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

int run_checks(const std::vector<std::function<verify::CheckResult()>>& checks) {
  int failures = 0;
  for (const auto& check : checks) {
    const auto r = check();
    std::cout << verify::format_line(r) << std::endl;
    if (r.status == verify::CheckResult::Status::fail) ++failures;
  }
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decreasing-cascade influence maximization toolkit"};
  app.require_subcommand(1);

  // gen-graph
  std::size_t er_n = 20;
  double er_p = 0.2;
  std::uint64_t seed = 0;
  std::string out_path;
  auto* gen_graph = app.add_subcommand("gen-graph", "Write an Erdos-Renyi digraph as an edge list");
  gen_graph->add_option("-n,--nodes", er_n, "Number of nodes")->check(CLI::PositiveNumber);
  gen_graph->add_option("-p,--edge-prob", er_p, "Probability of each ordered pair")->check(CLI::Range(0.0, 1.0));
  gen_graph->add_option("--seed", seed, "Random seed");
  gen_graph->add_option("-o,--output", out_path, "Output file (stdout if omitted)");

  // extract-subgraph
  std::string graph_path;
  std::string map_path;
  std::size_t degree_lo = 20, degree_hi = 120, pivots = 10;
  auto* extract = app.add_subcommand("extract-subgraph", "Extract a dense connected subgraph around random pivots");
  extract->add_option("-g,--graph", graph_path, "Source edge list")->required();
  extract->add_option("--degree-lo", degree_lo, "Minimum pivot degree (in + out)");
  extract->add_option("--degree-hi", degree_hi, "Maximum pivot degree (in + out)");
  extract->add_option("--pivots", pivots, "Number of pivots")->check(CLI::PositiveNumber);
  extract->add_option("--seed", seed, "Random seed");
  extract->add_option("-o,--output", out_path, "Output edge list (stdout if omitted)");
  extract->add_option("--map", map_path, "Write 'old new' id pairs here");

  // gen-probs
  std::string probs_mode = "sampled";
  double lo = 0.1, hi = 0.5, hp = 0.2;
  auto* gen_probs = app.add_subcommand("gen-probs", "Write a count-based activation model as JSON");
  gen_probs->add_option("-g,--graph", graph_path, "Edge list")->required();
  gen_probs->add_option("--mode", probs_mode, "sampled or homogeneous")
      ->check(CLI::IsMember({"sampled", "homogeneous"}));
  gen_probs->add_option("--lo", lo, "Lower bound for sampled probabilities");
  gen_probs->add_option("--hi", hi, "Upper bound for sampled probabilities");
  gen_probs->add_option("-p,--prob", hp, "Probability for the homogeneous model");
  gen_probs->add_option("--seed", seed, "Random seed");
  gen_probs->add_option("-o,--output", out_path, "Output file (stdout if omitted)");

  // spread
  std::string probs_path, seeds_text;
  std::size_t samples = 10000;
  bool exact = false;
  auto* spread = app.add_subcommand("spread", "Estimate or compute the influence spread of a seed set");
  spread->add_option("-g,--graph", graph_path, "Edge list")->required();
  spread->add_option("-m,--probs", probs_path, "Activation model JSON")->required();
  spread->add_option("-s,--seeds", seeds_text, "Seed ids, comma separated")->required();
  spread->add_option("-N,--samples", samples, "Monte-Carlo samples")->check(CLI::PositiveNumber);
  spread->add_flag("--exact", exact, "Enumerate coin tables instead of sampling");
  spread->add_option("--seed", seed, "Random seed");

  // tpm-check
  std::string upper_path;
  auto* tpm = app.add_subcommand("tpm-check", "Check the smoothness bound between two dominated models");
  tpm->add_option("-g,--graph", graph_path, "Edge list")->required();
  tpm->add_option("--lower", probs_path, "Lower activation model JSON")->required();
  tpm->add_option("--upper", upper_path, "Upper activation model JSON")->required();
  tpm->add_option("-s,--seeds", seeds_text, "Seed ids, comma separated")->required();

  // oracle
  std::size_t budget = 1;
  std::size_t eval_samples = 200;
  bool plain = false;
  auto* oracle = app.add_subcommand("oracle", "Run the greedy seed-selection oracle");
  oracle->add_option("-g,--graph", graph_path, "Edge list")->required();
  oracle->add_option("-m,--probs", probs_path, "Activation model JSON")->required();
  oracle->add_option("-k", budget, "Number of seeds")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--eval-samples", eval_samples, "Worlds per marginal-gain evaluation")
      ->check(CLI::PositiveNumber);
  oracle->add_option("-N,--samples", samples, "Samples for the reported spread")->check(CLI::PositiveNumber);
  oracle->add_flag("--plain", plain, "Disable lazy (CELF) evaluation");
  oracle->add_option("--seed", seed, "Random seed");

  // run
  std::string config_path, output_dir;
  auto* run = app.add_subcommand("run", "Run an online experiment from a JSON config");
  run->add_option("config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output_dir, "Output directory (overrides the config)");

  // verify
  bool full = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite and report each property");
  verify_cmd->add_flag("--full", full, "Include the desk-scale learning checks (slow)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_graph) {
      Stream rng(seed_or(seed, StreamTag::graph));
      emit(out_path, write_edge_list(generate_erdos_renyi(er_n, er_p, rng)));
    } else if (*extract) {
      Stream rng(seed_or(seed, StreamTag::extraction));
      const Extraction ex = extract_dense_subgraph(load_edge_list_file(graph_path), degree_lo, degree_hi, pivots, rng);
      emit(out_path, write_edge_list(ex.graph));
      if (!map_path.empty()) write_text_file(map_path, write_relabel_map(ex));
      std::cerr << "extracted n=" << ex.graph.num_nodes() << " m=" << ex.graph.num_edges() << "\n";
    } else if (*gen_probs) {
      const DirectedGraph g = load_edge_list_file(graph_path);
      ActivationModel model;
      if (probs_mode == "sampled") {
        Stream rng(seed_or(seed, StreamTag::model));
        model = sample_count_dc_model(g, lo, hi, rng);
      } else {
        model = homogeneous_model(g, hp);
      }
      emit(out_path, model_to_json(g, model).dump(1) + "\n");
    } else if (*spread) {
      const DirectedGraph g = load_edge_list_file(graph_path);
      const ActivationModel model = load_model_file(g, probs_path);
      const NodeSet seeds = parse_node_list(seeds_text);
      if (exact) {
        std::cout << "exact " << format_double(exact_spread(g, model, seeds)) << "\n";
      } else {
        Stream rng(seed_or(seed, StreamTag::diffusion));
        const SpreadEstimate est = estimate_spread_mc(g, model, seeds, samples, rng);
        std::cout << format_double(est.mean) << ' ' << format_double(est.std_error) << ' ' << est.num_samples
                  << "\n";
      }
    } else if (*tpm) {
      const DirectedGraph g = load_edge_list_file(graph_path);
      const TpmResult r =
          tpm_check(g, load_model_file(g, probs_path), load_model_file(g, upper_path), parse_node_list(seeds_text));
      std::cout << format_double(r.lhs) << ' ' << format_double(r.rhs) << ' ' << (r.holds ? "true" : "false")
                << "\n";
      return r.holds ? 0 : 1;
    } else if (*oracle) {
      const DirectedGraph g = load_edge_list_file(graph_path);
      const ActivationModel model = load_model_file(g, probs_path);
      const NodeSet chosen = greedy_oracle(g, model, {budget, eval_samples, !plain, seed_or(seed, StreamTag::oracle)});
      Stream rng(seed_or(seed, StreamTag::diffusion));
      const SpreadEstimate est = estimate_spread_mc(g, model, chosen, samples, rng);
      std::cout << to_string(chosen) << ' ' << format_double(est.mean) << ' ' << format_double(est.std_error)
                << "\n";
    } else if (*run) {
      ExperimentConfig cfg = load_experiment_config(config_path);
      if (!output_dir.empty()) cfg.output = output_dir;
      const ExperimentResult res = run_experiment(cfg);
      const auto& last = res.aggregate.back();
      std::cout << "policy " << cfg.policy << " opt " << format_double(res.instance.opt_value) << " ("
                << res.instance.opt_mode << ") final_avg_reward " << format_double(last.mean) << " +- "
                << format_double(last.std_error) << "\n";
      if (!cfg.output.empty()) std::cout << "wrote " << cfg.output << "\n";
    } else if (*verify_cmd) {
      int failures = run_checks(verify::quick_suite()) + run_checks(verify::invariant_suite());
      if (full) {
        const auto outcome = verify::run_synthetic({"dc-ucb", "cmab-avg", "cmab-rand", "flat-ucb"});
        failures += run_checks({[&] { return verify::timed("C8 desk-scale ranking", [&] {
                                  return verify::learning_ranking(outcome);
                                }); },
                                [&] { return verify::timed("C9 regret trend", [&] {
                                  return verify::regret_trend(outcome);
                                }); }});
      }
      std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
