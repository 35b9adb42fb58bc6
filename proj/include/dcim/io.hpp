#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dcim/graph.hpp"
#include "dcim/model.hpp"

namespace dcim {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

inline DirectedGraph load_edge_list_file(const std::filesystem::path& path) {
  return load_edge_list(read_text_file(path));
}

// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

/// count_dc: {"<node id>": [p(1), p(2), ...], ...}; nodes with no entry get
/// an empty sequence. edge_ic: [{"u": .., "v": .., "p": ..}, ...].
inline nlohmann::json model_to_json(const DirectedGraph& g, const ActivationModel& model) {
  if (model.is_count_dc()) {
    nlohmann::json out = nlohmann::json::object();
    for (NodeId v = 0; v < model.num_nodes(); ++v) {
      auto probs = model.node_probs(v);
      out[std::to_string(v)] = std::vector<double>(probs.begin(), probs.end());
    }
    return out;
  }
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t id = 0; id < g.num_edges(); ++id)
    out.push_back({{"u", g.edges()[id].from}, {"v", g.edges()[id].to}, {"p", model.edge_prob(id)}});
  return out;
}

inline ActivationModel model_from_json(const DirectedGraph& g, const nlohmann::json& doc) {
  ActivationModel model;
  if (doc.is_object()) {
    std::vector<std::vector<double>> probs(g.num_nodes());
    for (const auto& [key, value] : doc.items()) {
      std::size_t used = 0;
      unsigned long id = 0;
      try {
        id = std::stoul(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || id >= g.num_nodes())
        throw Error("probability file: bad node key '" + key + "'");
      probs[id] = value.get<std::vector<double>>();
    }
    model = ActivationModel::count_dc(std::move(probs));
  } else if (doc.is_array()) {
    std::vector<double> per_edge(g.num_edges(), -1.0);
    for (const auto& item : doc) {
      const auto u = item.at("u").get<NodeId>();
      const auto v = item.at("v").get<NodeId>();
      auto id = g.edge_id(u, v);
      if (!id) throw Error("probability file: (" + std::to_string(u) + "," + std::to_string(v) + ") is not an edge");
      per_edge[*id] = item.at("p").get<double>();
    }
    for (std::size_t id = 0; id < per_edge.size(); ++id)
      if (per_edge[id] < 0.0)
        throw Error("probability file: no probability for edge (" + std::to_string(g.edges()[id].from) +
                    "," + std::to_string(g.edges()[id].to) + ")");
    model = ActivationModel::edge_ic(std::move(per_edge));
  } else {
    throw Error("probability file: expected a JSON object or array");
  }
  require_valid(g, model);
  return model;
}

inline ActivationModel load_model_file(const DirectedGraph& g, const std::filesystem::path& path) {
  try {
    return model_from_json(g, nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

inline NodeSet parse_node_list(std::string_view text) {
  std::vector<NodeId> ids;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t used = 0;
    unsigned long id = 0;
    try {
      id = std::stoul(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw Error("bad node id '" + token + "'");
    ids.push_back(static_cast<NodeId>(id));
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\n') flush();
    else token += c;
  }
  flush();
  return NodeSet(std::move(ids));
}

}  // namespace dcim
