#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evenspace/edge_vector.hpp"
#include "evenspace/graph.hpp"

namespace evenspace {

// Simple cycle stored in canonical form: rotated so the smallest vertex id
// comes first, oriented so the second vertex is smaller than the last.
// Two cycles with the same vertex cycle compare equal whatever the input
// rotation or direction.
class Cycle {
 public:
  // Throws std::invalid_argument for fewer than 3 vertices or a repeat.
  explicit Cycle(std::vector<VertexId> vertices);

  std::span<const VertexId> vertices() const noexcept { return vertices_; }
  std::size_t length() const noexcept { return vertices_.size(); }
  VertexId operator[](std::size_t i) const { return vertices_[i]; }

  // "v0,v1,...": the CSV representation.
  std::string to_string() const;

  friend bool operator==(const Cycle&, const Cycle&) = default;
  // Shorter cycles first, then lexicographic in canonical form.
  friend std::strong_ordering operator<=>(const Cycle& a, const Cycle& b);

 private:
  std::vector<VertexId> vertices_;
};

// True iff consecutive vertices (wrapping) are joined by open edges of gv.
bool is_cycle_of(const Cycle& c, const GraphView& gv);

// Throws std::invalid_argument if a consecutive pair is not an edge of g.
EdgeVector cycle_edges(const Cycle& c, const Graph& g);

// Coordinatewise parity; empty input gives a zero vector of `length`.
EdgeVector xor_sum(std::span<const EdgeVector> vs, std::size_t length);
EdgeVector xor_sum(std::span<const EdgeVector> vs);  // requires non-empty input

// Row-reduced basis over GF(2). Each row owns one pivot edge (its lowest set
// bit at insertion time) and no other row has that bit set.
class Gf2Basis {
 public:
  explicit Gf2Basis(std::size_t length = 0) : length_(length) {}

  std::size_t length() const noexcept { return length_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  std::span<const EdgeVector> rows() const noexcept { return rows_; }
  std::span<const EdgeId> pivots() const noexcept { return pivots_; }

  // v minus its projection onto the span; zero iff v is in the span.
  EdgeVector reduce(EdgeVector v) const;
  bool contains(const EdgeVector& v) const { return reduce(v).none(); }

  // Returns false and leaves the basis untouched iff v is already spanned.
  bool insert(const EdgeVector& v);

 private:
  std::size_t length_;
  std::vector<EdgeVector> rows_;
  std::vector<EdgeId> pivots_;
};

// One vector per open non-forest edge e (in edge-id order): e plus the forest
// path between its endpoints. Throws std::invalid_argument unless `forest` is
// a spanning forest of gv (open, acyclic, V - k edges).
std::vector<EdgeVector> fundamental_cycles(const GraphView& gv, const EdgeVector& forest);

bool is_even(const EdgeVector& v, const Graph& g);

// E(gv) - V + k(gv).
std::size_t cycle_space_dim(const GraphView& gv);

inline constexpr std::size_t kDefaultCycleBudget = 2'000'000;

// All simple cycles of length <= max_len over open edges, each once, sorted
// (length, then canonical vertex order). Throws BudgetExceeded if more than
// `budget` cycles would be produced.
std::vector<Cycle> enumerate_cycles(const GraphView& gv, std::size_t max_len,
                                    std::size_t budget = kDefaultCycleBudget);

// Cycles of enumerate_cycles() that pass through v, found directly by DFS
// from v.
std::vector<Cycle> enumerate_cycles_through(const GraphView& gv, VertexId v, std::size_t max_len,
                                            std::size_t budget = kDefaultCycleBudget);

}  // namespace evenspace
