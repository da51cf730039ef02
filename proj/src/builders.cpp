#include "evenspace/builders.hpp"

#include <stdexcept>

namespace evenspace {

namespace {

VertexId vid(std::size_t v) { return static_cast<VertexId>(v); }

}  // namespace

Graph build_grid_patch(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("grid: rows and cols must be positive");
  std::vector<Edge> edges;
  edges.reserve(2 * rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      if (c + 1 < cols) edges.push_back({vid(v), vid(v + 1)});
      if (r + 1 < rows) edges.push_back({vid(v), vid(v + cols)});
    }
  }
  return Graph(rows * cols, std::move(edges));
}

Graph build_torus(std::size_t rows, std::size_t cols) {
  if (rows < 3 || cols < 3) throw std::invalid_argument("torus: rows and cols must be at least 3");
  std::vector<Edge> edges;
  edges.reserve(2 * rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t v = r * cols + c;
      edges.push_back({vid(v), vid(r * cols + (c + 1) % cols)});
      edges.push_back({vid(v), vid(((r + 1) % rows) * cols + c)});
    }
  }
  return Graph(rows * cols, std::move(edges));
}

Graph build_triangle() { return build_cycle(3); }

Graph build_complete(std::size_t n) {
  if (n == 0) throw std::invalid_argument("complete graph: need at least one vertex");
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) edges.push_back({vid(u), vid(v)});
  }
  return Graph(n, std::move(edges));
}

Graph build_path(std::size_t length) {
  if (length == 0) throw std::invalid_argument("path: length must be positive");
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < length; ++v) edges.push_back({vid(v), vid(v + 1)});
  return Graph(length + 1, std::move(edges));
}

Graph build_cycle(std::size_t length) {
  if (length < 3) throw std::invalid_argument("cycle: length must be at least 3");
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < length; ++v) edges.push_back({vid(v), vid((v + 1) % length)});
  return Graph(length, std::move(edges));
}

Graph build_theta() { return Graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}}); }

Graph build_binary_tree(std::size_t depth) {
  if (depth == 0) throw std::invalid_argument("binary_tree: depth must be positive");
  if (depth > 24) throw std::invalid_argument("binary_tree: depth too large");
  const std::size_t n = (std::size_t{1} << (depth + 1)) - 1;
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (std::size_t v = 1; v < n; ++v) edges.push_back({vid((v - 1) / 2), vid(v)});
  return Graph(n, std::move(edges));
}

}  // namespace evenspace
