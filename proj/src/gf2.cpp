#include "evenspace/gf2.hpp"

#include <algorithm>
#include <stdexcept>

#include "evenspace/errors.hpp"

namespace evenspace {

Cycle::Cycle(std::vector<VertexId> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw std::invalid_argument("Cycle: need at least 3 vertices");
  std::vector<VertexId> sorted = vertices_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("Cycle: repeated vertex");
  }
  const auto min_it = std::min_element(vertices_.begin(), vertices_.end());
  std::rotate(vertices_.begin(), min_it, vertices_.end());
  if (vertices_[1] > vertices_.back()) std::reverse(vertices_.begin() + 1, vertices_.end());
}

std::string Cycle::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(vertices_[i]);
  }
  return out;
}

std::strong_ordering operator<=>(const Cycle& a, const Cycle& b) {
  if (auto c = a.vertices_.size() <=> b.vertices_.size(); c != 0) return c;
  return a.vertices_ <=> b.vertices_;
}

bool is_cycle_of(const Cycle& c, const GraphView& gv) {
  const std::size_t len = c.length();
  for (std::size_t i = 0; i < len; ++i) {
    const auto e = gv.graph().find_edge(c[i], c[(i + 1) % len]);
    if (!e || !gv.is_open(*e)) return false;
  }
  return true;
}

EdgeVector cycle_edges(const Cycle& c, const Graph& g) {
  EdgeVector out(g.edge_count());
  const std::size_t len = c.length();
  for (std::size_t i = 0; i < len; ++i) {
    const auto e = g.find_edge(c[i], c[(i + 1) % len]);
    if (!e) throw std::invalid_argument("cycle_edges: consecutive vertices not adjacent");
    out.set(*e);
  }
  return out;
}

EdgeVector xor_sum(std::span<const EdgeVector> vs, std::size_t length) {
  EdgeVector out(length);
  for (const EdgeVector& v : vs) out ^= v;
  return out;
}

EdgeVector xor_sum(std::span<const EdgeVector> vs) {
  if (vs.empty()) throw std::invalid_argument("xor_sum: empty input needs an explicit length");
  return xor_sum(vs, vs.front().size());
}

EdgeVector Gf2Basis::reduce(EdgeVector v) const {
  if (v.size() != length_) throw std::invalid_argument("Gf2Basis: length mismatch");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (v.test(pivots_[i])) v ^= rows_[i];
  }
  return v;
}

bool Gf2Basis::insert(const EdgeVector& v) {
  EdgeVector r = reduce(v);
  const auto pivot = r.first();
  if (!pivot) return false;
  for (EdgeVector& row : rows_) {
    if (row.test(*pivot)) row ^= r;
  }
  rows_.push_back(std::move(r));
  pivots_.push_back(*pivot);
  return true;
}

std::vector<EdgeVector> fundamental_cycles(const GraphView& gv, const EdgeVector& forest) {
  const Graph& g = gv.graph();
  if (forest.size() != g.edge_count() || !forest.is_subset_of(gv.open_edges())) {
    throw std::invalid_argument("fundamental_cycles: forest is not a subgraph of the view");
  }
  const GraphView tree(g, forest);
  const std::size_t k = connected_components(gv).count;
  const std::size_t forest_components = connected_components(tree).count;
  if (forest_components != k || forest.count() != g.vertex_count() - k) {
    throw std::invalid_argument("fundamental_cycles: not a spanning forest");
  }

  constexpr EdgeId kRoot = ~EdgeId{0};
  std::vector<EdgeId> parent_edge(g.vertex_count(), kRoot);
  std::vector<VertexId> parent(g.vertex_count());
  std::vector<int> depth(g.vertex_count(), -1);
  std::vector<VertexId> queue;
  for (VertexId root = 0; root < g.vertex_count(); ++root) {
    if (depth[root] >= 0) continue;
    depth[root] = 0;
    parent[root] = root;
    queue.assign(1, root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const VertexId u = queue[head];
      tree.for_each_open_neighbor(u, [&](const Incidence& inc) {
        if (depth[inc.neighbor] < 0) {
          depth[inc.neighbor] = depth[u] + 1;
          parent[inc.neighbor] = u;
          parent_edge[inc.neighbor] = inc.edge;
          queue.push_back(inc.neighbor);
        }
      });
    }
  }

  std::vector<EdgeVector> out;
  const EdgeVector chords = gv.open_edges() ^ forest;
  chords.for_each([&](EdgeId e) {
    EdgeVector c(g.edge_count());
    c.set(e);
    VertexId a = g.edge(e).u;
    VertexId b = g.edge(e).v;
    while (a != b) {
      if (depth[a] < depth[b]) std::swap(a, b);
      c.flip(parent_edge[a]);
      a = parent[a];
    }
    out.push_back(std::move(c));
  });
  return out;
}

bool is_even(const EdgeVector& v, const Graph& g) {
  if (v.size() != g.edge_count()) throw std::invalid_argument("is_even: length mismatch");
  std::vector<std::uint8_t> parity(g.vertex_count(), 0);
  v.for_each([&](EdgeId e) {
    parity[g.edge(e).u] ^= 1;
    parity[g.edge(e).v] ^= 1;
  });
  return std::none_of(parity.begin(), parity.end(), [](std::uint8_t p) { return p != 0; });
}

std::size_t cycle_space_dim(const GraphView& gv) {
  return gv.open_edge_count() + connected_components(gv).count - gv.vertex_count();
}

namespace {

// DFS over simple paths starting at `root`, closing back to it. Only vertices
// accepted by `allowed` are entered; `dist` holds distances back to root and
// prunes paths that cannot close within max_len.
class CycleSearch {
 public:
  CycleSearch(const GraphView& gv, std::size_t max_len, std::size_t budget, std::vector<Cycle>& out)
      : gv_(gv), max_len_(max_len), budget_(budget), out_(out), on_path_(gv.vertex_count(), false) {}

  template <class Allowed>
  void run(VertexId root, Allowed allowed) {
    // distances to root within the allowed set
    dist_.assign(gv_.vertex_count(), kUnreachable);
    std::vector<VertexId> queue{root};
    dist_[root] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const VertexId u = queue[head];
      if (static_cast<std::size_t>(dist_[u]) * 2 >= max_len_) continue;
      gv_.for_each_open_neighbor(u, [&](const Incidence& inc) {
        if (dist_[inc.neighbor] == kUnreachable && allowed(inc.neighbor)) {
          dist_[inc.neighbor] = dist_[u] + 1;
          queue.push_back(inc.neighbor);
        }
      });
    }
    root_ = root;
    path_.assign(1, root);
    on_path_[root] = true;
    extend(allowed);
    on_path_[root] = false;
  }

 private:
  template <class Allowed>
  void extend(Allowed& allowed) {
    const VertexId u = path_.back();
    const std::size_t edges_so_far = path_.size() - 1;
    gv_.for_each_open_neighbor(u, [&](const Incidence& inc) {
      const VertexId w = inc.neighbor;
      if (w == root_) {
        if (path_.size() >= 3 && path_.size() <= max_len_ && path_[1] < path_.back()) {
          if (out_.size() >= budget_) throw BudgetExceeded("cycle enumeration budget exceeded");
          out_.emplace_back(path_);
        }
        return;
      }
      if (on_path_[w] || !allowed(w) || dist_[w] == kUnreachable) return;
      if (edges_so_far + 1 + static_cast<std::size_t>(dist_[w]) > max_len_) return;
      path_.push_back(w);
      on_path_[w] = true;
      extend(allowed);
      on_path_[w] = false;
      path_.pop_back();
    });
  }

  const GraphView& gv_;
  std::size_t max_len_;
  std::size_t budget_;
  std::vector<Cycle>& out_;
  std::vector<bool> on_path_;
  std::vector<int> dist_;
  std::vector<VertexId> path_;
  VertexId root_ = 0;
};

}  // namespace

std::vector<Cycle> enumerate_cycles(const GraphView& gv, std::size_t max_len, std::size_t budget) {
  if (max_len < 3) throw std::invalid_argument("enumerate_cycles: max_len must be at least 3");
  std::vector<Cycle> out;
  CycleSearch search(gv, max_len, budget, out);
  for (VertexId root = 0; root < gv.vertex_count(); ++root) {
    search.run(root, [root](VertexId w) { return w > root; });
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Cycle> enumerate_cycles_through(const GraphView& gv, VertexId v, std::size_t max_len,
                                            std::size_t budget) {
  if (max_len < 3) throw std::invalid_argument("enumerate_cycles_through: max_len must be at least 3");
  if (v >= gv.vertex_count()) throw std::out_of_range("enumerate_cycles_through: vertex out of range");
  std::vector<Cycle> out;
  CycleSearch search(gv, max_len, budget, out);
  search.run(v, [](VertexId) { return true; });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace evenspace
