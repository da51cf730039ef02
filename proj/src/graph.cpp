#include "evenspace/graph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace evenspace {

Graph::Graph(std::size_t vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  std::vector<std::size_t> degree(vertex_count_, 0);
  for (const Edge& e : edges_) {
    if (e.u >= vertex_count_ || e.v >= vertex_count_) {
      throw std::invalid_argument("Graph: edge endpoint out of range");
    }
    if (e.u == e.v) throw std::invalid_argument("Graph: self-loop");
    const std::uint64_t key = (std::uint64_t{std::min(e.u, e.v)} << 32) | std::max(e.u, e.v);
    if (!seen.insert(key).second) throw std::invalid_argument("Graph: parallel edge");
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(vertex_count_ + 1, 0);
  for (std::size_t v = 0; v < vertex_count_; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  incidences_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    incidences_[fill[e.u]++] = {e.v, id};
    incidences_[fill[e.v]++] = {e.u, id};
  }
}

std::size_t Graph::max_degree() const noexcept {
  std::size_t best = 0;
  for (std::size_t v = 0; v < vertex_count_; ++v) best = std::max(best, offsets_[v + 1] - offsets_[v]);
  return best;
}

std::optional<EdgeId> Graph::find_edge(VertexId u, VertexId v) const {
  if (u >= vertex_count_ || v >= vertex_count_) return std::nullopt;
  if (degree(u) > degree(v)) std::swap(u, v);
  for (const Incidence& inc : neighbors(u)) {
    if (inc.neighbor == v) return inc.edge;
  }
  return std::nullopt;
}

GraphView::GraphView(const Graph& g) : graph_(&g), open_(g.all_edges()) {}

GraphView::GraphView(const Graph& g, EdgeVector open) : graph_(&g), open_(std::move(open)) {
  if (open_.size() != g.edge_count()) {
    throw std::invalid_argument("GraphView: edge vector length does not match graph");
  }
}

GraphView restrict(const Graph& g, EdgeVector open_edges) { return GraphView(g, std::move(open_edges)); }

std::vector<int> bfs_distances(const GraphView& gv, VertexId source) {
  const VertexId sources[] = {source};
  return bfs_distances(gv, sources);
}

std::vector<int> bfs_distances(const GraphView& gv, std::span<const VertexId> sources) {
  std::vector<int> dist(gv.vertex_count(), kUnreachable);
  std::vector<VertexId> queue;
  queue.reserve(gv.vertex_count());
  for (VertexId s : sources) {
    if (s >= gv.vertex_count()) throw std::out_of_range("bfs_distances: source out of range");
    if (dist[s] == kUnreachable) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const VertexId u = queue[head];
    gv.for_each_open_neighbor(u, [&](const Incidence& inc) {
      if (dist[inc.neighbor] == kUnreachable) {
        dist[inc.neighbor] = dist[u] + 1;
        queue.push_back(inc.neighbor);
      }
    });
  }
  return dist;
}

std::vector<std::size_t> Components::sizes() const {
  std::vector<std::size_t> out(count, 0);
  for (std::uint32_t l : label) ++out[l];
  return out;
}

Components connected_components(const GraphView& gv) {
  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  Components c;
  c.label.assign(gv.vertex_count(), kUnset);
  std::vector<VertexId> stack;
  for (VertexId root = 0; root < gv.vertex_count(); ++root) {
    if (c.label[root] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(c.count++);
    c.label[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      const VertexId u = stack.back();
      stack.pop_back();
      gv.for_each_open_neighbor(u, [&](const Incidence& inc) {
        if (c.label[inc.neighbor] == kUnset) {
          c.label[inc.neighbor] = id;
          stack.push_back(inc.neighbor);
        }
      });
    }
  }
  return c;
}

EdgeVector spanning_forest(const GraphView& gv) {
  EdgeVector forest(gv.edge_count());
  std::vector<bool> seen(gv.vertex_count(), false);
  std::vector<VertexId> queue;
  queue.reserve(gv.vertex_count());
  for (VertexId root = 0; root < gv.vertex_count(); ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    queue.clear();
    queue.push_back(root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const VertexId u = queue[head];
      gv.for_each_open_neighbor(u, [&](const Incidence& inc) {
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = true;
          forest.set(inc.edge);
          queue.push_back(inc.neighbor);
        }
      });
    }
  }
  return forest;
}

}  // namespace evenspace
