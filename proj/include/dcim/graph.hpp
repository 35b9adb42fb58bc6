#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcim/rng.hpp"

namespace dcim {

using NodeId = std::uint32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Sorted, duplicate-free set of node ids.
class NodeSet {
 public:
  NodeSet() = default;
  NodeSet(std::initializer_list<NodeId> ids) : NodeSet(std::vector<NodeId>(ids)) {}
  explicit NodeSet(std::vector<NodeId> ids) : members_(std::move(ids)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  bool contains(NodeId v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
  }
  void insert(NodeId v) {
    auto it = std::lower_bound(members_.begin(), members_.end(), v);
    if (it == members_.end() || *it != v) members_.insert(it, v);
  }
  NodeSet with(NodeId v) const {
    NodeSet out = *this;
    out.insert(v);
    return out;
  }

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  NodeId operator[](std::size_t i) const { return members_[i]; }
  const std::vector<NodeId>& ids() const noexcept { return members_; }

  // Lexicographic on the sorted member lists.
  auto operator<=>(const NodeSet&) const = default;

 private:
  std::vector<NodeId> members_;
};

inline std::string to_string(const NodeSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + "}";
}

struct Edge {
  NodeId from;
  NodeId to;
  auto operator<=>(const Edge&) const = default;
};

/// Immutable directed graph in CSR form.
///
/// Edges are stored sorted by (from, to); an edge's position in that order is
/// its edge id. In-neighbor lists are sorted ascending, and the position of
/// (u, v) inside the in-CSR doubles as the index of attempt slots: slot
/// `slot(v, i)` addresses the i-th attempt on v for i in [1, in_degree(v)].
class DirectedGraph {
 public:
  DirectedGraph() = default;

  // Throws on self-loops and out-of-range ids; duplicate edges are dropped.
  DirectedGraph(std::size_t num_nodes, std::vector<Edge> edges) : n_(num_nodes) {
    if (num_nodes > std::numeric_limits<NodeId>::max())
      throw Error("node count exceeds id range");
    for (const Edge& e : edges) {
      if (e.from >= n_ || e.to >= n_)
        throw Error("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) +
                    ") references a node outside [0, " + std::to_string(n_) + ")");
      if (e.from == e.to) throw Error("self-loop on node " + std::to_string(e.from));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    out_offsets_.assign(n_ + 1, 0);
    in_offsets_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      ++out_offsets_[e.from + 1];
      ++in_offsets_[e.to + 1];
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());

    out_nbrs_.resize(edges_.size());
    in_nbrs_.resize(edges_.size());
    in_edge_ids_.resize(edges_.size());
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    // Edges are sorted by (from, to), so both fills come out ascending.
    for (std::size_t id = 0; id < edges_.size(); ++id) {
      const Edge& e = edges_[id];
      out_nbrs_[out_fill[e.from]++] = e.to;
      in_nbrs_[in_fill[e.to]] = e.from;
      in_edge_ids_[in_fill[e.to]++] = id;
    }
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const NodeId> in_neighbors(NodeId v) const {
    return {in_nbrs_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }
  std::span<const NodeId> out_neighbors(NodeId u) const {
    return {out_nbrs_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
  }
  // Edge id of the k-th out-neighbor of u is out_edge_begin(u) + k.
  std::size_t out_edge_begin(NodeId u) const { return out_offsets_[u]; }
  // Edge ids parallel to in_neighbors(v).
  std::span<const std::size_t> in_edge_ids(NodeId v) const {
    return {in_edge_ids_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }
  std::size_t in_degree(NodeId v) const { return in_offsets_[v + 1] - in_offsets_[v]; }
  std::size_t out_degree(NodeId u) const { return out_offsets_[u + 1] - out_offsets_[u]; }

  // Total number of attempt slots; equals num_edges().
  std::size_t num_slots() const noexcept { return in_nbrs_.size(); }
  std::size_t slot(NodeId v, std::size_t attempt) const { return in_offsets_[v] + attempt - 1; }
  std::size_t slot_begin(NodeId v) const { return in_offsets_[v]; }

  std::optional<std::size_t> edge_id(NodeId from, NodeId to) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{from, to});
    if (it == edges_.end() || *it != Edge{from, to}) return std::nullopt;
    return static_cast<std::size_t>(it - edges_.begin());
  }

  bool valid(const NodeSet& s) const { return s.empty() || s.ids().back() < n_; }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<std::size_t> in_offsets_{0};
  std::vector<NodeId> out_nbrs_;
  std::vector<NodeId> in_nbrs_;
  std::vector<std::size_t> in_edge_ids_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Reads one unsigned id token starting at pos; advances pos past it.
inline std::optional<std::uint64_t> next_id(std::string_view line, std::size_t& pos,
                                            std::size_t line_no) {
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  if (pos >= line.size()) return std::nullopt;
  std::uint64_t value = 0;
  const char* first = line.data() + pos;
  const char* last = line.data() + line.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range) throw ParseError(line_no, "id overflow");
  if (ec != std::errc() || (ptr != last && *ptr != ' ' && *ptr != '\t'))
    throw ParseError(line_no, "expected a non-negative integer id");
  pos += static_cast<std::size_t>(ptr - first);
  return value;
}

}  // namespace detail

/// Parses "u v" lines. '#' lines are comments, except a header of the form
/// "# nodes <count>" which fixes the node count (otherwise 1 + max id).
inline DirectedGraph load_edge_list(std::string_view text) {
  std::vector<Edge> edges;
  std::optional<std::uint64_t> header_nodes;
  std::uint64_t max_id = 0;
  bool any = false;
  std::size_t line_no = 0;
  constexpr std::uint64_t id_limit = std::numeric_limits<NodeId>::max();

  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = detail::trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view body = detail::trim(line.substr(1));
      if (body.starts_with("nodes ")) {
        std::size_t pos = 6;
        auto count = detail::next_id(body, pos, line_no);
        if (!count || !detail::trim(body.substr(pos)).empty())
          throw ParseError(line_no, "malformed nodes header");
        if (*count > id_limit) throw ParseError(line_no, "id overflow");
        header_nodes = *count;
      }
      continue;
    }
    std::size_t pos = 0;
    auto u = detail::next_id(line, pos, line_no);
    auto v = detail::next_id(line, pos, line_no);
    if (!u || !v || !detail::trim(line.substr(pos)).empty())
      throw ParseError(line_no, "expected exactly two ids");
    if (*u >= id_limit || *v >= id_limit) throw ParseError(line_no, "id overflow");
    if (*u == *v) throw ParseError(line_no, "self-loop on node " + std::to_string(*u));
    max_id = std::max({max_id, *u, *v});
    any = true;
    edges.push_back({static_cast<NodeId>(*u), static_cast<NodeId>(*v)});
  }

  std::size_t n = any ? static_cast<std::size_t>(max_id) + 1 : 0;
  if (header_nodes) {
    if (any && *header_nodes <= max_id)
      throw Error("id overflow: id " + std::to_string(max_id) + " exceeds header node count " +
                  std::to_string(*header_nodes));
    n = static_cast<std::size_t>(*header_nodes);
  }
  return DirectedGraph(n, std::move(edges));
}

inline std::string write_edge_list(const DirectedGraph& g) {
  std::ostringstream out;
  out << "# nodes " << g.num_nodes() << '\n';
  for (const Edge& e : g.edges()) out << e.from << ' ' << e.to << '\n';
  return out.str();
}

/// Each ordered pair (u, v), u != v, is included independently with
/// probability edge_prob. Pairs are visited in (u, v) order so the result is a
/// pure function of the stream.
inline DirectedGraph generate_erdos_renyi(std::size_t n, double edge_prob, Stream& rng) {
  if (n < 1) throw Error("erdos-renyi: n must be at least 1");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw Error("erdos-renyi: edge probability must lie in [0, 1]");
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v && rng.bernoulli(edge_prob)) edges.push_back({u, v});
  return DirectedGraph(n, std::move(edges));
}

struct Extraction {
  DirectedGraph graph;
  std::vector<NodeId> old_ids;  // new id -> id in the source graph
  NodeSet pivots;               // in source ids
};

inline std::string write_relabel_map(const Extraction& ex) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ex.old_ids.size(); ++i) out << ex.old_ids[i] << ' ' << i << '\n';
  return out.str();
}

/// Dense-subgraph recipe: filter nodes by in+out degree, sample pivots
/// uniformly without replacement, keep every edge touching a pivot, then
/// return the largest weakly connected component relabeled densely in
/// ascending source-id order. Size ties go to the component with the smallest
/// minimum source id.
inline Extraction extract_dense_subgraph(const DirectedGraph& g, std::size_t degree_lo,
                                         std::size_t degree_hi, std::size_t num_pivots,
                                         Stream& rng) {
  if (degree_lo > degree_hi) throw Error("extract: degree_lo exceeds degree_hi");
  if (num_pivots < 1) throw Error("extract: need at least one pivot");

  std::vector<NodeId> qualifying;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const std::size_t deg = g.in_degree(v) + g.out_degree(v);
    if (deg >= degree_lo && deg <= degree_hi) qualifying.push_back(v);
  }
  if (qualifying.empty())
    throw Error("extract: no node has degree in [" + std::to_string(degree_lo) + ", " +
                std::to_string(degree_hi) + "]");
  if (qualifying.size() < num_pivots)
    throw Error("extract: only " + std::to_string(qualifying.size()) +
                " qualifying nodes for " + std::to_string(num_pivots) + " pivots");

  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < num_pivots; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(qualifying.size() - i));
    std::swap(qualifying[i], qualifying[j]);
  }
  NodeSet pivots(std::vector<NodeId>(qualifying.begin(), qualifying.begin() + num_pivots));

  std::vector<Edge> kept;
  for (const Edge& e : g.edges())
    if (pivots.contains(e.from) || pivots.contains(e.to)) kept.push_back(e);

  // Undirected adjacency over the intermediate graph.
  std::vector<std::vector<NodeId>> adj(g.num_nodes());
  std::vector<char> present(g.num_nodes(), 0);
  for (NodeId p : pivots) present[p] = 1;
  for (const Edge& e : kept) {
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
    present[e.from] = present[e.to] = 1;
  }

  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<NodeId> best;
  for (NodeId start = 0; start < g.num_nodes(); ++start) {
    if (!present[start] || seen[start]) continue;
    std::vector<NodeId> comp{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head)
      for (NodeId w : adj[comp[head]])
        if (!seen[w]) {
          seen[w] = 1;
          comp.push_back(w);
        }
    // Starts are visited in ascending id, so a strictly larger size is needed
    // to displace an earlier component.
    if (comp.size() > best.size()) best = std::move(comp);
  }
  std::sort(best.begin(), best.end());

  std::vector<NodeId> new_id(g.num_nodes(), std::numeric_limits<NodeId>::max());
  for (std::size_t i = 0; i < best.size(); ++i) new_id[best[i]] = static_cast<NodeId>(i);
  std::vector<Edge> relabeled;
  for (const Edge& e : kept)
    if (new_id[e.from] != std::numeric_limits<NodeId>::max() &&
        new_id[e.to] != std::numeric_limits<NodeId>::max())
      relabeled.push_back({new_id[e.from], new_id[e.to]});

  return Extraction{DirectedGraph(best.size(), std::move(relabeled)), std::move(best),
                    std::move(pivots)};
}

namespace detail {

template <class Next>
std::vector<char> bfs_mark(std::size_t n, const NodeSet& sources, Next&& next) {
  std::vector<char> mark(n, 0);
  std::vector<NodeId> queue;
  for (NodeId s : sources) {
    mark[s] = 1;
    queue.push_back(s);
  }
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (NodeId w : next(queue[head]))
      if (!mark[w]) {
        mark[w] = 1;
        queue.push_back(w);
      }
  return mark;
}

inline NodeSet marked(const std::vector<char>& mark) {
  std::vector<NodeId> ids;
  for (std::size_t v = 0; v < mark.size(); ++v)
    if (mark[v]) ids.push_back(static_cast<NodeId>(v));
  return NodeSet(std::move(ids));
}

}  // namespace detail

inline std::vector<char> reachable_mask(const DirectedGraph& g, const NodeSet& s) {
  return detail::bfs_mark(g.num_nodes(), s, [&](NodeId u) { return g.out_neighbors(u); });
}

/// Nodes reachable from s by a directed path of length >= 0.
inline NodeSet reachable_set(const DirectedGraph& g, const NodeSet& s) {
  return detail::marked(reachable_mask(g, s));
}

/// Nodes lying on some directed path from s to v.
inline NodeSet vertices_on_paths(const DirectedGraph& g, const NodeSet& s, NodeId v) {
  auto from_s = reachable_mask(g, s);
  if (!from_s[v]) return {};
  auto to_v = detail::bfs_mark(g.num_nodes(), NodeSet{v},
                               [&](NodeId w) { return g.in_neighbors(w); });
  for (std::size_t i = 0; i < from_s.size(); ++i) from_s[i] = from_s[i] && to_v[i];
  return detail::marked(from_s);
}

/// Largest single-source reach, the source itself included.
inline std::size_t max_reach(const DirectedGraph& g) {
  std::size_t best = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto mark = reachable_mask(g, NodeSet{u});
    best = std::max<std::size_t>(best, std::count(mark.begin(), mark.end(), 1));
  }
  return best;
}

inline bool weakly_connected(const DirectedGraph& g) {
  if (g.num_nodes() == 0) return true;
  auto mark = detail::bfs_mark(g.num_nodes(), NodeSet{0}, [&](NodeId w) {
    std::vector<NodeId> nbrs(g.out_neighbors(w).begin(), g.out_neighbors(w).end());
    nbrs.insert(nbrs.end(), g.in_neighbors(w).begin(), g.in_neighbors(w).end());
    return nbrs;
  });
  return std::all_of(mark.begin(), mark.end(), [](char c) { return c != 0; });
}

}  // namespace dcim
