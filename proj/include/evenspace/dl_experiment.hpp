#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evenspace/dl_box.hpp"
#include "evenspace/edge_vector.hpp"
#include "evenspace/geodesics.hpp"
#include "evenspace/gf2.hpp"

namespace evenspace {

enum class PercolationModel { bernoulli, fk_glauber };

// Which witness (l1, l1', x2) is reported when several exist. Lexicographic
// takes the smallest tree addresses, reverse the largest. Whether a witness
// exists does not depend on the rule.
enum class ChoiceRule { lexicographic, reverse };

std::string_view to_string(PercolationModel m) noexcept;
std::string_view to_string(ChoiceRule r) noexcept;
// Accepts "bernoulli", "fk", "fk-glauber", "fk_glauber".
PercolationModel parse_percolation_model(std::string_view s);

struct TrialOutcome {
  std::uint64_t trial = 0;
  int n = 0;
  double p = 0;
  PercolationModel model = PercolationModel::bernoulli;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  bool found_l1 = false;
  bool found_l1_prime = false;
  bool x2_found = false;
  std::optional<VertexId> l1;
  std::optional<VertexId> l1_prime;
  std::optional<VertexId> x2;  // the vertex (o1, x2)
  std::optional<Cycle> cycle;
  std::size_t cycle_length = 0;

  Verdict geodesic_ambient = Verdict::indeterminate;
  Verdict geodesic_omega = Verdict::indeterminate;
  Verdict diagonal = Verdict::indeterminate;

  // Set when assemble_cycle rejected the cycle; this is a bug, not chance.
  std::optional<std::string> violation;

  bool success() const noexcept { return cycle.has_value(); }
};

// The four-tree construction on a fixed box: T_o (descendants of o1 paired
// with the o2 -> o2_hat path) and, for every l in L1 and L1', the tree T_l
// (descendants of o2_hat paired with the l -> o1 path).
class DlConstruction {
 public:
  // The box must outlive the construction.
  explicit DlConstruction(const DLBox& box);

  const DLBox& box() const noexcept { return *box_; }
  int depth() const noexcept { return box_->depth(); }

  const EdgeVector& t_o() const noexcept { return t_o_; }
  // l must be a member of L1 or L1'.
  EdgeVector t_ell(VertexId l) const;

  // Members of L1 (second = false) or L1' (second = true) joined to o
  // inside omega restricted to T_o, in address order.
  std::vector<VertexId> omega_l(const EdgeVector& omega, bool second) const;
  // Vertices (o1, x) of L2 joined to l inside omega restricted to T_l, in
  // address order.
  std::vector<VertexId> x_set(const EdgeVector& omega, VertexId l) const;

  // Union of the four tree paths o -> l1 -> x2 -> l1' -> o. Throws
  // StructuralViolation if the result is not a simple 4n-cycle through o made
  // of four pairwise edge-disjoint paths inside omega.
  Cycle assemble_cycle(const EdgeVector& omega, VertexId l1, VertexId l1_prime, VertexId x2) const;

  // Runs the construction on omega and fills the existence flags, the chosen
  // witness and the cycle. Geodesic verdicts are left indeterminate.
  TrialOutcome analyze(const EdgeVector& omega, ChoiceRule rule = ChoiceRule::lexicographic) const;

 private:
  std::uint64_t address1(VertexId l) const;
  std::size_t ell_index(VertexId l) const;
  // Vertex ids of the tree path inside T_l from l (level -n) up to (o1, x).
  std::vector<VertexId> ell_path(std::uint64_t a, std::uint64_t x) const;
  // Vertex ids of the T_o path from o down to (a, o2_hat).
  std::vector<VertexId> o_path(std::uint64_t a) const;

  const DLBox* box_;
  EdgeVector t_o_;
  // T_o edge from the parent of (level -j, address a) to it, at
  // to_edge_[(1 << j) + a] for 1 <= j <= n.
  std::vector<EdgeId> to_edge_;
  // For each l (by T1 address) the T_l edge into (level L, t2 address x)
  // from below, at ell_edge_[l][(1 << (n + L)) + x] for -n < L <= 0.
  std::vector<std::vector<EdgeId>> ell_edge_;
};

// (p * s_{n-1}(p))^2 * p^2 * s_{n-1}(p^2) with s the finite-depth tree
// survival. Equals p^4 at n = 1.
double theoretical_bound(int n, double p);
// p^2 * theta(p)^2 * theta(p^2) with the infinite-tree survival theta.
double limiting_bound(double p);

struct DlExperimentConfig {
  int n = 2;
  double p = 0.75;
  PercolationModel model = PercolationModel::bernoulli;
  std::size_t trials = 1000;
  int margin = 1;
  // Highest lower margin used by the stabilized distance oracle; defaults to
  // margin + 1.
  std::optional<int> max_margin;
  std::uint64_t seed = 0;
  int sweeps = 50;
  unsigned workers = 0;  // 0: hardware concurrency
  ChoiceRule rule = ChoiceRule::lexicographic;
  bool verify_geodesics = true;
};

struct WilsonInterval {
  double low = 0;
  double high = 0;
};

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct DlExperimentSummary {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double frequency = 0;
  WilsonInterval wilson;
  double bound = 0;
  double limiting_bound = 0;
  // sqrt(b (1 - b) / trials) for the bound b.
  double sigma = 0;
  std::size_t geodesic_pass = 0;
  std::size_t geodesic_indeterminate = 0;
  std::size_t geodesic_fail = 0;
  std::size_t omega_geodesic_pass = 0;
  std::size_t diagonal_pass = 0;
  std::size_t violations = 0;
  std::size_t unstable_distances = 0;
  bool mcmc_approximate = false;
};

struct DlExperimentResult {
  std::vector<TrialOutcome> outcomes;  // trial-index order
  DlExperimentSummary summary;
};

// Trial i samples omega on the whole box from RngStream(seed, i), so results
// do not depend on the number of workers. Throws BudgetExceeded if a box
// exceeds the vertex budget.
DlExperimentResult run_trials(const DlExperimentConfig& config);

}  // namespace evenspace
