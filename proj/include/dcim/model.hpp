#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dcim/graph.hpp"
#include "dcim/rng.hpp"

namespace dcim {

enum class ModelKind { count_dc, edge_ic };

/// Activation probabilities. Under count_dc, node v carries a non-increasing
/// sequence p_v(1..|N(v)|) and the i-th attempt on v succeeds with p_v(i)
/// whoever makes it. Under edge_ic, edge (u, v) fires with its own p_{u,v}.
class ActivationModel {
 public:
  ActivationModel() = default;

  static ActivationModel count_dc(std::vector<std::vector<double>> per_node) {
    ActivationModel m;
    m.kind_ = ModelKind::count_dc;
    m.node_probs_ = std::move(per_node);
    return m;
  }
  // Indexed by edge id of the graph the model belongs to.
  static ActivationModel edge_ic(std::vector<double> per_edge) {
    ActivationModel m;
    m.kind_ = ModelKind::edge_ic;
    m.edge_probs_ = std::move(per_edge);
    return m;
  }

  ModelKind kind() const noexcept { return kind_; }
  bool is_count_dc() const noexcept { return kind_ == ModelKind::count_dc; }

  std::size_t num_nodes() const noexcept { return node_probs_.size(); }
  std::span<const double> node_probs(NodeId v) const { return node_probs_[v]; }
  std::vector<double>& mutable_node_probs(NodeId v) { return node_probs_[v]; }
  // attempt is 1-based.
  double attempt_prob(NodeId v, std::size_t attempt) const { return node_probs_[v][attempt - 1]; }

  std::span<const double> edge_probs() const noexcept { return edge_probs_; }
  double edge_prob(std::size_t edge_id) const { return edge_probs_[edge_id]; }

  bool operator==(const ActivationModel&) const = default;

 private:
  ModelKind kind_ = ModelKind::count_dc;
  std::vector<std::vector<double>> node_probs_;
  std::vector<double> edge_probs_;
};

struct ModelViolation {
  NodeId node = 0;
  std::size_t index = 0;  // 1-based attempt index (count_dc) or edge id (edge_ic); 0 for length
  std::string message;
};

/// Returns the first violation in node order, or nullopt when the model is a
/// valid model for g.
inline std::optional<ModelViolation> validate_model(const DirectedGraph& g,
                                                    const ActivationModel& model) {
  auto bad_prob = [](double p) { return !(p >= 0.0 && p <= 1.0); };
  auto text = [](double p) {
    std::ostringstream out;
    out << p;
    return out.str();
  };
  if (model.kind() == ModelKind::edge_ic) {
    if (model.edge_probs().size() != g.num_edges())
      return ModelViolation{0, 0,
                            "edge probability count " + std::to_string(model.edge_probs().size()) +
                                " != edge count " + std::to_string(g.num_edges())};
    for (std::size_t id = 0; id < g.num_edges(); ++id)
      if (bad_prob(model.edge_prob(id)))
        return ModelViolation{g.edges()[id].to, id,
                              "edge probability " + text(model.edge_prob(id)) +
                                  " outside [0, 1]"};
    return std::nullopt;
  }
  if (model.num_nodes() != g.num_nodes())
    return ModelViolation{0, 0,
                          "model covers " + std::to_string(model.num_nodes()) + " nodes, graph has " +
                              std::to_string(g.num_nodes())};
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto probs = model.node_probs(v);
    if (probs.size() != g.in_degree(v))
      return ModelViolation{v, 0,
                            "length mismatch: " + std::to_string(probs.size()) + " probabilities for " +
                                std::to_string(g.in_degree(v)) + " in-neighbors"};
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (bad_prob(probs[i]))
        return ModelViolation{v, i + 1, "probability " + text(probs[i]) + " outside [0, 1]"};
      if (i > 0 && probs[i] > probs[i - 1])
        return ModelViolation{v, i + 1,
                              "not decreasing: " + text(probs[i]) + " > " + text(probs[i - 1])};
    }
  }
  return std::nullopt;
}

inline void require_valid(const DirectedGraph& g, const ActivationModel& model) {
  if (auto bad = validate_model(g, model))
    throw Error("invalid model at node " + std::to_string(bad->node) + " index " +
                std::to_string(bad->index) + ": " + bad->message);
}

/// For each node, draws |N(v)| values from Uniform[lo, hi] and sorts them
/// descending. Nodes are processed in id order.
inline ActivationModel sample_count_dc_model(const DirectedGraph& g, double lo, double hi,
                                             Stream& rng) {
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
    throw Error("sampled model: need 0 <= lo <= hi <= 1");
  std::vector<std::vector<double>> probs(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto& seq = probs[v];
    seq.resize(g.in_degree(v));
    for (double& p : seq) p = lo == hi ? lo : rng.uniform(lo, hi);
    std::sort(seq.begin(), seq.end(), std::greater<>());
  }
  return ActivationModel::count_dc(std::move(probs));
}

/// Constant-per-node count_dc model: p_v(i) = per_node[v] (or fallback).
inline ActivationModel homogeneous_model(const DirectedGraph& g,
                                         const std::map<NodeId, double>& per_node,
                                         double fallback) {
  auto check = [](double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("homogeneous model: probability outside [0, 1]");
  };
  check(fallback);
  std::vector<std::vector<double>> probs(g.num_nodes());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto it = per_node.find(v);
    const double p = it == per_node.end() ? fallback : it->second;
    check(p);
    probs[v].assign(g.in_degree(v), p);
  }
  return ActivationModel::count_dc(std::move(probs));
}

inline ActivationModel homogeneous_model(const DirectedGraph& g, double p) {
  return homogeneous_model(g, {}, p);
}

/// The edge_ic model that fires (u, v) with v's constant probability. Only
/// defined for count_dc models that are constant per node.
inline ActivationModel matched_edge_ic(const DirectedGraph& g, const ActivationModel& model) {
  if (!model.is_count_dc()) throw Error("matched_edge_ic: expected a count_dc model");
  std::vector<double> per_edge(g.num_edges());
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto probs = model.node_probs(v);
    if (std::adjacent_find(probs.begin(), probs.end(), std::not_equal_to<>()) != probs.end())
      throw Error("matched_edge_ic: node " + std::to_string(v) + " is not homogeneous");
    auto ids = g.in_edge_ids(v);
    for (std::size_t k = 0; k < ids.size(); ++k) per_edge[ids[k]] = probs[k];
  }
  return ActivationModel::edge_ic(std::move(per_edge));
}

/// True when both are count_dc over the same shape and lower <= upper slotwise.
inline bool dominated_by(const ActivationModel& lower, const ActivationModel& upper) {
  if (!lower.is_count_dc() || !upper.is_count_dc()) return false;
  if (lower.num_nodes() != upper.num_nodes()) return false;
  for (NodeId v = 0; v < lower.num_nodes(); ++v) {
    auto a = lower.node_probs(v);
    auto b = upper.node_probs(v);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] > b[i]) return false;
  }
  return true;
}

}  // namespace dcim
