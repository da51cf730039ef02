#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evenspace/edge_vector.hpp"
#include "evenspace/gf2.hpp"
#include "evenspace/graph.hpp"

namespace evenspace {

// All cycles of the host graph of length <= k, with a per-edge index of the
// generators containing each edge.
struct GeneratorFamily {
  const Graph* graph = nullptr;
  int k = 0;
  std::vector<Cycle> cycles;
  std::vector<EdgeVector> vectors;
  std::vector<std::vector<std::uint32_t>> edge_index;

  std::size_t size() const noexcept { return cycles.size(); }
};

// Throws std::invalid_argument for k < 3 and BudgetExceeded if the
// enumeration budget is exceeded. The graph must outlive the family.
GeneratorFamily relator_cycles(const Graph& g, int k, std::size_t budget = kDefaultCycleBudget);

inline constexpr std::size_t kDefaultSearchBudget = 5'000'000;

struct Decomposition {
  // Smallest number of generators summing to the target; nullopt if more
  // than n_max are needed.
  std::optional<int> k;
  // A witness, as generator ids in ascending order.
  std::vector<std::uint32_t> generators;
};

// Iterative deepening over sets of distinct generators, always branching on
// the generators through the lowest edge left to cancel. Throws
// BudgetExceeded after `node_budget` search nodes.
Decomposition minimal_decomposition(const EdgeVector& target, const GeneratorFamily& fam, int n_max,
                                    std::size_t node_budget = kDefaultSearchBudget);

// Every set of exactly `size` generators summing to target, each sorted,
// in lexicographic order; at most `limit` sets.
std::vector<std::vector<std::uint32_t>> all_decompositions(const EdgeVector& target, const GeneratorFamily& fam,
                                                           int size, std::size_t limit = 10'000,
                                                           std::size_t node_budget = kDefaultSearchBudget);

// True iff the union of the given generators is a connected subgraph.
bool union_is_connected(std::span<const std::uint32_t> generators, const GeneratorFamily& fam);

// k(C) for a cycle of the host graph.
std::optional<int> k_of_cycle(const Cycle& c, const GeneratorFamily& fam, int n_max,
                              std::size_t node_budget = kDefaultSearchBudget);
// Same value; additionally requires c to lie in omega (std::invalid_argument
// otherwise).
std::optional<int> k_of_cycle_in(const Cycle& c, const GraphView& omega, const GeneratorFamily& fam, int n_max,
                                 std::size_t node_budget = kDefaultSearchBudget);

struct CPrimeOptions {
  int n_max = 4;
  // false: a level-n cycle enters when it is outside the span of levels
  // 1..n-1 (all such cycles enter). true: when it is outside the span of
  // everything accepted so far, including earlier cycles of its own level.
  bool running_basis = false;
  std::size_t node_budget = kDefaultSearchBudget;
  std::size_t cycle_budget = kDefaultCycleBudget;
  unsigned workers = 1;
};

struct Candidate {
  Cycle cycle;
  EdgeVector vector;
  std::optional<int> k;
};

struct CPrimeResult {
  int k = 0;
  int n_max = 0;
  std::size_t max_len = 0;  // k * n_max
  bool running_basis = false;
  // Cycles of omega of length <= max_len in canonical order, with k(C).
  std::vector<Candidate> candidates;
  // levels[n - 1]: candidate indices added at level n.
  std::vector<std::vector<std::size_t>> levels;
  Gf2Basis basis;

  std::size_t cycle_count() const noexcept;
  std::vector<Cycle> level_cycles(int n) const;
};

CPrimeResult build_cprime(const Graph& g, const EdgeVector& omega, const GeneratorFamily& fam,
                          const CPrimeOptions& options = {});

struct MultiplicityProfile {
  std::vector<std::uint32_t> per_edge;
  std::uint32_t max = 0;
};

MultiplicityProfile multiplicity_profile(const CPrimeResult& res, std::size_t edge_count);

// Distance between distinct edges e, f. midpoint: 1 + the smallest distance
// between an endpoint of e and one of f (adjacent edges are at distance 1).
// endpoint: the smallest endpoint distance itself (adjacent edges at 0). An
// edge is at distance 0 from itself under both.
enum class EdgeDistance { midpoint, endpoint };

std::string_view to_string(EdgeDistance d) noexcept;

struct KClosure {
  EdgeVector edges;
  std::size_t component_count = 0;
  // Vertex count of the largest component of the subgraph formed by the
  // closure edges.
  std::size_t largest_component = 0;
};

// Edges of g within distance k (in g) of some edge closed in omega.
KClosure k_closure(const Graph& g, const EdgeVector& omega, int k, EdgeDistance convention = EdgeDistance::midpoint);

struct SpanningReport {
  std::size_t rank = 0;
  std::size_t dim = 0;
  std::size_t cycles_checked = 0;
  std::size_t cycles_in_span = 0;
  std::size_t interior_checked = 0;
  std::size_t interior_in_span = 0;
  // Candidates with k(C) <= n_max missing from the span. Must be zero.
  std::size_t completeness_violations = 0;
  double interior_fraction() const noexcept;
};

// Checks every cycle of omega of length <= l_check against the span of C'.
// A cycle is interior when all its vertices are farther than
// interior_margin from the boundary (vertices below the maximum degree).
SpanningReport spanning_report(const Graph& g, const EdgeVector& omega, const CPrimeResult& res, std::size_t l_check,
                               int interior_margin, std::size_t cycle_budget = kDefaultCycleBudget);

// Re-derives every level: k(C) = n, C inside omega, length <= k * n, and C
// outside the span it was tested against. Returns one message per failure.
std::vector<std::string> verify_levels(const CPrimeResult& res, const EdgeVector& omega, const GeneratorFamily& fam);

// For every cycle at level n >= 2 and every minimal decomposition of it,
// counts generators that lie entirely inside omega. Must be zero.
struct DecompositionAudit {
  std::size_t cycles = 0;
  std::size_t decompositions = 0;
  std::size_t generators_inside_omega = 0;
};

DecompositionAudit audit_decompositions(const CPrimeResult& res, const EdgeVector& omega, const GeneratorFamily& fam);

}  // namespace evenspace
