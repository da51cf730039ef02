#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evenspace/graph.hpp"

namespace evenspace {

// Finite region of the Diestel-Leader graph DL(2,2).
//
// Both trees are binary family trees. A vertex is a pair (v1, v2) sitting at a
// single level L: v1 is a node of T1 and v2 a node of T2, and both coordinates
// are placed at L. A down-step (L -> L-1) moves v1 to one of its two children
// and v2 to its parent; an up-step moves v1 to its parent and v2 to one of its
// two children. Every interior vertex therefore has degree 4.
//
// Anchoring: o1 is a T1 node at level 0 and o2 a T2 node at level 0; o2_hat
// is the ancestor of o2 at distance n (level -n). With margin m the box is
// rooted at a1 (the ancestor of o1 at distance m, level m) and r2 (the
// ancestor of o2_hat at distance m, level -n-m), and contains every pair of
// descendants (v1 of a1, v2 of r2) whose levels match. The core (m = 0) has
// levels -n..0.
//
// Coordinates are margin independent: a node is stored as the binary path of
// child choices from the box root with the first choice in the most
// significant bit. The chain from a1 to o1 and from r2 to o2 is all zeros, so
// prepending margin never changes the integer value and (level, addr1, addr2)
// names the same vertex in every box that contains it.
struct DLVertex {
  int level = 0;
  std::uint64_t addr1 = 0;
  std::uint64_t addr2 = 0;

  friend bool operator==(const DLVertex&, const DLVertex&) = default;
};

// Node of one of the two trees: `depth` below the box root, `path` the
// depth-bit address.
struct TreeNode {
  int depth = 0;
  std::uint64_t path = 0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

inline constexpr std::size_t kDefaultDlVertexBudget = std::size_t{1} << 22;

class DLBox {
 public:
  const Graph& graph() const noexcept { return graph_; }
  int depth() const noexcept { return n_; }
  int margin() const noexcept { return margin_; }
  // n + 2 * margin: depth of each tree inside the box.
  int span_depth() const noexcept { return n_ + 2 * margin_; }

  const DLVertex& coords(VertexId v) const { return coords_.at(v); }
  int level(VertexId v) const { return coords_.at(v).level; }
  TreeNode coord1(VertexId v) const;
  TreeNode coord2(VertexId v) const;

  std::optional<VertexId> find(const DLVertex& c) const;
  // Throws std::out_of_range when the box does not contain c.
  VertexId at(const DLVertex& c) const;

  bool in_core(VertexId v) const;

  VertexId origin() const noexcept { return origin_; }
  TreeNode o1() const noexcept { return {margin_, 0}; }
  TreeNode o2() const noexcept { return {n_ + margin_, 0}; }
  TreeNode o2_hat() const noexcept { return {margin_, 0}; }

  // (l, o2_hat) for the depth-n descendants l of o1 below its first child,
  // resp. its second child; ordered by T1 address.
  std::span<const VertexId> l1() const noexcept { return l1_; }
  std::span<const VertexId> l1_prime() const noexcept { return l1_prime_; }
  // (o1, x) for x in L2: depth-n descendants of o2_hat on the side away
  // from o2; ordered by T2 address.
  std::span<const VertexId> l2() const noexcept { return l2_; }
  // T2 nodes of the o2 -> o2_hat path, n + 1 entries.
  std::span<const TreeNode> spine() const noexcept { return spine_; }

 private:
  friend DLBox build_dl_box(int n, int margin, std::size_t max_vertices);

  std::uint64_t dense_index(const DLVertex& c) const;

  int n_ = 0;
  int margin_ = 0;
  Graph graph_;
  std::vector<DLVertex> coords_;
  std::vector<VertexId> by_dense_;
  VertexId origin_ = 0;
  std::vector<VertexId> l1_;
  std::vector<VertexId> l1_prime_;
  std::vector<VertexId> l2_;
  std::vector<TreeNode> spine_;
};

// Vertex ids follow BFS order from o (down-neighbours before up-neighbours,
// child 0 before child 1); an edge gets its id when first scanned.
// Throws BudgetExceeded if (n + 2m + 1) * 2^(n + 2m) > max_vertices and
// std::invalid_argument if n < 1 or margin < 0.
DLBox build_dl_box(int n, int margin, std::size_t max_vertices = kDefaultDlVertexBudget);

}  // namespace evenspace
