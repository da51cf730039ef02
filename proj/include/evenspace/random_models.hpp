#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "evenspace/edge_vector.hpp"
#include "evenspace/graph.hpp"

namespace evenspace {

// Reproducible random stream. Identical (seed, stream) pairs replay identical
// draws; the stream id is the trial index in every experiment, so trials can
// run on any worker without changing results.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  bool coin() { return (engine_() >> 63) != 0; }
  // Uniform on [0, n), n > 0, unbiased.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

inline constexpr std::size_t kDefaultEdgeCap = 20;

// Law on the 2^m edge subsets of a graph with m edges; subset s is the mask
// whose bit e says edge e is present. Weights are kept unnormalized in long
// double together with their sum.
class SubsetDistribution {
 public:
  using Real = long double;

  // Throws std::invalid_argument if weights.size() != 2^edge_count, a weight
  // is negative, or all weights vanish.
  SubsetDistribution(std::size_t edge_count, std::vector<Real> weights);

  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t support_size() const noexcept { return weights_.size(); }
  Real weight(std::uint64_t subset) const { return weights_.at(subset); }
  Real normalizer() const noexcept { return normalizer_; }
  Real probability(std::uint64_t subset) const { return weights_.at(subset) / normalizer_; }
  Real marginal(EdgeId e) const;

  std::uint64_t sample(RngStream& rng) const;

  // Header "subset,weight,probability", one row per subset, subsets as hex.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t edge_count_;
  std::vector<Real> weights_;
  std::vector<Real> cumulative_;
  Real normalizer_ = 0;
};

// Counts of observed subsets for graphs with at most kDefaultEdgeCap edges.
class EmpiricalHistogram {
 public:
  explicit EmpiricalHistogram(std::size_t edge_count);

  void add(std::uint64_t subset) { ++counts_.at(subset), ++total_; }
  void add(const EdgeVector& v) { add(v.to_mask()); }

  std::size_t edge_count() const noexcept { return edge_count_; }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t count(std::uint64_t subset) const { return counts_.at(subset); }
  double frequency(std::uint64_t subset) const;

 private:
  std::size_t edge_count_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// Half the L1 distance. Throws std::invalid_argument on different edge counts.
double tv_distance(const SubsetDistribution& a, const SubsetDistribution& b);
double tv_distance(const SubsetDistribution& a, const EmpiricalHistogram& b);

// --- Bernoulli percolation -------------------------------------------------

// One uniform per edge in edge-id order, edge open iff uniform < p. Feeding
// the same stream with different p gives the standard monotone coupling.
EdgeVector bernoulli_sample(const Graph& g, double p, RngStream& rng);

// Per-edge uniform labels, and the configuration {e : label_e < p}.
std::vector<double> uniform_labels(std::size_t edge_count, RngStream& rng);
EdgeVector threshold_labels(std::span<const double> labels, double p);

SubsetDistribution bernoulli_exact(const Graph& g, double p, std::size_t edge_cap = kDefaultEdgeCap);

// --- FK-Ising (random-cluster, q = 2) ---------------------------------------

// weight(w) = (p / (1 - p))^|w| * 2^k(w). p = 0 and p = 1 give point masses.
// Throws BudgetExceeded above the edge cap.
SubsetDistribution fk_exact(const Graph& g, double p, std::size_t edge_cap = kDefaultEdgeCap);

// Heat-bath probability that an edge is open given the rest: p if its
// endpoints are joined off the edge, p / (2 - p) otherwise.
double fk_conditional_open_probability(double p, bool endpoints_connected);

// Single-bond heat-bath chain, started from all-open. Each update picks an
// edge uniformly at random and resamples it from its conditional law.
class FkGlauberChain {
 public:
  FkGlauberChain(const Graph& g, double p);

  const EdgeVector& state() const noexcept { return state_; }
  void reset_open();
  void update(RngStream& rng);
  // edge_count() updates.
  void sweep(RngStream& rng);

  // True iff u and v are joined by open edges other than `skip`.
  bool connected_without(VertexId u, VertexId v, EdgeId skip);

 private:
  const Graph* graph_;
  double p_;
  EdgeVector state_;
  // Scratch for the two-sided search.
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<VertexId> queue_a_;
  std::vector<VertexId> queue_b_;
};

// State after sweeps * E updates from all-open.
EdgeVector fk_glauber(const Graph& g, double p, int sweeps, RngStream& rng);

// --- Loop O(1) and uniform even subgraphs -----------------------------------

// weight(w) = x^|w| on even subgraphs, zero elsewhere.
SubsetDistribution loop_o1_exact(const Graph& g, double x, std::size_t edge_cap = kDefaultEdgeCap);

// Generator set used by the spanning-tree sampler: the fundamental cycles of
// spanning_forest(gv).
std::vector<EdgeVector> ues_spanning_tree_generators(const GraphView& gv);

// XOR of gens[i] over the set bits i of `pattern`. Requires gens.size() <= 64.
EdgeVector combine_by_coins(std::span<const EdgeVector> gens, std::uint64_t pattern, std::size_t edge_count);

// One fair coin per generator, in order; XOR of the selected ones.
EdgeVector ues_coinflip(const GraphView& gv, std::span<const EdgeVector> gens, RngStream& rng);
EdgeVector ues_spanning_tree(const GraphView& gv, RngStream& rng);

// Law of (uniform even subgraph of w) when w is drawn from `config_law`,
// computed exactly by enumerating the cycle space of every configuration.
SubsetDistribution ues_pushforward(const SubsetDistribution& config_law, const Graph& g);

enum class UesMethod { spanning_tree, coinflip };
enum class FkSampling { exact, glauber };

using GeneratorProvider = std::function<std::vector<EdgeVector>(const GraphView&)>;

struct LoopViaFkOptions {
  UesMethod method = UesMethod::spanning_tree;
  // Required for UesMethod::coinflip.
  GeneratorProvider generators;
  FkSampling fk = FkSampling::exact;
  int sweeps = 50;
  std::size_t edge_cap = kDefaultEdgeCap;
};

// Loop O(1) sampler: draw w from FK-Ising at p = 2x / (1 + x), then a uniform
// even subgraph of w.
class LoopViaFkSampler {
 public:
  LoopViaFkSampler(const Graph& g, double x, LoopViaFkOptions options = {});

  double fk_parameter() const noexcept { return p_; }
  EdgeVector sample(RngStream& rng) const;

 private:
  const Graph* graph_;
  double p_;
  LoopViaFkOptions options_;
  std::optional<SubsetDistribution> fk_law_;
};

EdgeVector loop_via_fk(const Graph& g, double x, RngStream& rng, const LoopViaFkOptions& options = {});

// --- Stochastic domination ---------------------------------------------------

struct DominationOptions {
  double tolerance = 1e-12;
  // Above kMaxExhaustiveEdges, fall back to a fixed family of increasing
  // events instead of throwing. The result is then marked non-exhaustive.
  bool allow_heuristic = false;
};

inline constexpr std::size_t kMaxExhaustiveEdges = 5;

struct DominationResult {
  bool dominates = false;
  bool exhaustive = true;
  std::size_t events_checked = 0;
  // min over checked events of first(A) - second(A)
  long double worst_margin = 0;
  // Minimal elements of the worst event, as subset masks.
  std::vector<std::uint64_t> worst_event_generators;

  explicit operator bool() const noexcept { return dominates; }
};

// Whether `first` stochastically dominates `second`: first(A) >= second(A)
// for every increasing event A. Exhaustive over all up-sets of the subset
// lattice for up to 5 edges (7581 events at m = 5).
DominationResult check_domination(const SubsetDistribution& first, const SubsetDistribution& second,
                                  const DominationOptions& options = {});

// --- Binary-tree survival ----------------------------------------------------

// Probability that the root of a binary tree (two children per node) is joined
// to depth `depth` under Bernoulli(p) bond percolation, via
// s_0 = 1, s_j = 1 - (1 - p s_{j-1})^2. With no depth, the infinite-tree
// value max(0, (2p - 1) / p^2).
double tree_survival(double p, std::optional<int> depth);

}  // namespace evenspace
