#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evenspace/edge_vector.hpp"

namespace evenspace {

using VertexId = std::uint32_t;

// Distance value for vertices that cannot be reached.
inline constexpr int kUnreachable = -1;

struct Edge {
  VertexId u;
  VertexId v;
};

struct Incidence {
  VertexId neighbor;
  EdgeId edge;
};

// Immutable finite simple graph. Edge ids are 0..edge_count()-1 in the order
// the edges were supplied; each adjacency list is sorted by edge id.
class Graph {
 public:
  Graph() = default;
  // Throws std::invalid_argument on self-loops, parallel edges or endpoints
  // out of range.
  Graph(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Incidence> neighbors(VertexId v) const {
    return {incidences_.data() + offsets_.at(v), incidences_.data() + offsets_.at(v + 1)};
  }
  std::size_t degree(VertexId v) const { return offsets_.at(v + 1) - offsets_.at(v); }
  std::size_t max_degree() const noexcept;

  std::optional<EdgeId> find_edge(VertexId u, VertexId v) const;

  EdgeVector no_edges() const { return EdgeVector(edge_count()); }
  EdgeVector all_edges() const { return EdgeVector::all(edge_count()); }

 private:
  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidences_;
};

// Spanning subgraph of a host graph: every vertex, only the open edges.
// Holds a non-owning reference to the host, which must outlive the view.
class GraphView {
 public:
  GraphView(const Graph& g);  // NOLINT: every edge open
  GraphView(const Graph& g, EdgeVector open);
  GraphView(const Graph&&) = delete;
  GraphView(const Graph&&, EdgeVector) = delete;

  const Graph& graph() const noexcept { return *graph_; }
  std::size_t vertex_count() const noexcept { return graph_->vertex_count(); }
  std::size_t edge_count() const noexcept { return graph_->edge_count(); }
  std::size_t open_edge_count() const noexcept { return open_.count(); }

  bool is_open(EdgeId e) const { return open_.test(e); }
  const EdgeVector& open_edges() const noexcept { return open_; }

  template <class F>
  void for_each_open_neighbor(VertexId v, F&& f) const {
    for (const Incidence& inc : graph_->neighbors(v)) {
      if (open_.test(inc.edge)) f(inc);
    }
  }

 private:
  const Graph* graph_;
  EdgeVector open_;
};

GraphView restrict(const Graph& g, EdgeVector open_edges);

// Unweighted shortest-path distances over open edges, kUnreachable elsewhere.
std::vector<int> bfs_distances(const GraphView& gv, VertexId source);

// Multi-source variant: distance to the nearest source.
std::vector<int> bfs_distances(const GraphView& gv, std::span<const VertexId> sources);

struct Components {
  std::vector<std::uint32_t> label;  // labels are 0..count-1, by lowest member
  std::size_t count = 0;

  std::vector<std::size_t> sizes() const;
};

Components connected_components(const GraphView& gv);

// Maximal spanning forest grown by BFS from the lowest unvisited vertex,
// scanning incidences in edge-id order. Size is V - k.
EdgeVector spanning_forest(const GraphView& gv);

}  // namespace evenspace
