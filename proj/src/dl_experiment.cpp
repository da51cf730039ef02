#include "evenspace/dl_experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "evenspace/errors.hpp"
#include "evenspace/random_models.hpp"

namespace evenspace {

std::string_view to_string(PercolationModel m) noexcept {
  return m == PercolationModel::bernoulli ? "bernoulli" : "fk-glauber";
}

std::string_view to_string(ChoiceRule r) noexcept {
  return r == ChoiceRule::lexicographic ? "lexicographic" : "reverse";
}

PercolationModel parse_percolation_model(std::string_view s) {
  if (s == "bernoulli") return PercolationModel::bernoulli;
  if (s == "fk" || s == "fk-glauber" || s == "fk_glauber") return PercolationModel::fk_glauber;
  throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

DlConstruction::DlConstruction(const DLBox& box) : box_(&box), t_o_(box.graph().edge_count()) {
  const int n = box.depth();
  const Graph& g = box.graph();
  auto edge_between = [&](const DLVertex& a, const DLVertex& b) {
    const auto e = g.find_edge(box.at(a), box.at(b));
    if (!e) throw StructuralViolation("DlConstruction: expected tree edge missing from box");
    return *e;
  };

  to_edge_.assign(std::size_t{1} << (n + 1), 0);
  for (int j = 1; j <= n; ++j) {
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << j); ++a) {
      const EdgeId e = edge_between({-j + 1, a >> 1, 0}, {-j, a, 0});
      to_edge_[(std::size_t{1} << j) + a] = e;
      t_o_.set(e);
    }
  }

  ell_edge_.resize(std::size_t{1} << n);
  for (std::uint64_t a = 0; a < ell_edge_.size(); ++a) {
    auto& edges = ell_edge_[a];
    edges.assign(std::size_t{1} << (n + 1), 0);
    for (int d = 1; d <= n; ++d) {
      const int level = d - n;
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << d); ++x) {
        edges[(std::size_t{1} << d) + x] = edge_between({level - 1, a >> (d - 1), x >> 1}, {level, a >> d, x});
      }
    }
  }
}

std::uint64_t DlConstruction::address1(VertexId l) const {
  const DLVertex& c = box_->coords(l);
  if (c.level != -depth() || c.addr2 != 0 || c.addr1 >> depth() != 0) {
    throw std::invalid_argument("DlConstruction: vertex is not in L1 or L1'");
  }
  return c.addr1;
}

std::size_t DlConstruction::ell_index(VertexId l) const { return static_cast<std::size_t>(address1(l)); }

EdgeVector DlConstruction::t_ell(VertexId l) const {
  const auto& edges = ell_edge_[ell_index(l)];
  EdgeVector out(box_->graph().edge_count());
  for (std::size_t i = 2; i < edges.size(); ++i) out.set(edges[i]);
  return out;
}

namespace {

// Reachability from the root of a complete binary tree of depth n whose edge
// into heap slot i is edges[i]; returns the reached leaves' addresses.
std::vector<std::uint64_t> reached_leaves(const EdgeVector& omega, const std::vector<EdgeId>& edges, int n) {
  std::vector<std::uint8_t> reach(edges.size(), 0);
  reach[1] = 1;
  for (int d = 1; d <= n; ++d) {
    const std::size_t base = std::size_t{1} << d;
    for (std::size_t x = 0; x < base; ++x) {
      reach[base + x] = reach[(base >> 1) + (x >> 1)] && omega.test(edges[base + x]);
    }
  }
  std::vector<std::uint64_t> out;
  const std::size_t leaves = std::size_t{1} << n;
  for (std::size_t x = 0; x < leaves; ++x) {
    if (reach[leaves + x]) out.push_back(x);
  }
  return out;
}

}  // namespace

std::vector<VertexId> DlConstruction::omega_l(const EdgeVector& omega, bool second) const {
  const std::uint64_t half = std::uint64_t{1} << (depth() - 1);
  std::vector<VertexId> out;
  for (std::uint64_t a : reached_leaves(omega, to_edge_, depth())) {
    if (!second && a < half) out.push_back(box_->l1()[a]);
    if (second && a >= half) out.push_back(box_->l1_prime()[a - half]);
  }
  return out;
}

std::vector<VertexId> DlConstruction::x_set(const EdgeVector& omega, VertexId l) const {
  const std::uint64_t half = std::uint64_t{1} << (depth() - 1);
  std::vector<VertexId> out;
  for (std::uint64_t x : reached_leaves(omega, ell_edge_[ell_index(l)], depth())) {
    if (x >= half) out.push_back(box_->l2()[x - half]);
  }
  return out;
}

std::vector<VertexId> DlConstruction::o_path(std::uint64_t a) const {
  const int n = depth();
  std::vector<VertexId> out;
  for (int j = 0; j <= n; ++j) out.push_back(box_->at({-j, a >> (n - j), 0}));
  return out;
}

std::vector<VertexId> DlConstruction::ell_path(std::uint64_t a, std::uint64_t x) const {
  const int n = depth();
  std::vector<VertexId> out;
  for (int d = 0; d <= n; ++d) out.push_back(box_->at({d - n, a >> d, x >> (n - d)}));
  return out;
}

Cycle DlConstruction::assemble_cycle(const EdgeVector& omega, VertexId l1, VertexId l1_prime, VertexId x2) const {
  const int n = depth();
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  const std::uint64_t a1 = address1(l1);
  const std::uint64_t a1p = address1(l1_prime);
  const DLVertex& xc = box_->coords(x2);
  if (a1 >= half || a1p < half) throw std::invalid_argument("assemble_cycle: l1 must be in L1 and l1' in L1'");
  if (xc.level != 0 || xc.addr1 != 0 || xc.addr2 < half || xc.addr2 >= 2 * half) {
    throw std::invalid_argument("assemble_cycle: x2 is not in L2");
  }
  const Graph& g = box_->graph();
  const std::vector<VertexId> legs[4] = {o_path(a1), ell_path(a1, xc.addr2), ell_path(a1p, xc.addr2), o_path(a1p)};
  const EdgeVector* trees[4] = {&t_o_, nullptr, nullptr, &t_o_};
  const EdgeVector t1 = t_ell(l1);
  const EdgeVector t1p = t_ell(l1_prime);
  trees[1] = &t1;
  trees[2] = &t1p;

  std::vector<EdgeVector> leg_edges;
  for (int i = 0; i < 4; ++i) {
    EdgeVector edges(g.edge_count());
    for (std::size_t j = 0; j + 1 < legs[i].size(); ++j) {
      const auto e = g.find_edge(legs[i][j], legs[i][j + 1]);
      if (!e) throw StructuralViolation("assemble_cycle: path step is not an edge");
      if (!omega.test(*e)) throw StructuralViolation("assemble_cycle: path edge is closed in omega");
      if (!trees[i]->test(*e)) throw StructuralViolation("assemble_cycle: path leaves its tree");
      edges.set(*e);
    }
    if (edges.count() != static_cast<std::size_t>(n)) throw StructuralViolation("assemble_cycle: leg length is not n");
    for (const EdgeVector& other : leg_edges) {
      if (edges.intersects(other)) throw StructuralViolation("assemble_cycle: legs share an edge");
    }
    leg_edges.push_back(std::move(edges));
  }

  // o -> l1 -> x2 -> l1' -> o
  std::vector<VertexId> seq = legs[0];
  seq.insert(seq.end(), legs[1].begin() + 1, legs[1].end());
  seq.insert(seq.end(), legs[2].rbegin() + 1, legs[2].rend());
  seq.insert(seq.end(), legs[3].rbegin() + 1, legs[3].rend() - 1);
  if (seq.size() != static_cast<std::size_t>(4 * n)) throw StructuralViolation("assemble_cycle: length is not 4n");
  if (std::find(seq.begin(), seq.end(), box_->origin()) == seq.end()) {
    throw StructuralViolation("assemble_cycle: cycle misses o");
  }
  try {
    return Cycle(std::move(seq));
  } catch (const std::invalid_argument& e) {
    throw StructuralViolation(std::string("assemble_cycle: not a simple cycle: ") + e.what());
  }
}

TrialOutcome DlConstruction::analyze(const EdgeVector& omega, ChoiceRule rule) const {
  TrialOutcome out;
  out.n = depth();
  std::vector<VertexId> first = omega_l(omega, false);
  std::vector<VertexId> second = omega_l(omega, true);
  out.found_l1 = !first.empty();
  out.found_l1_prime = !second.empty();
  if (!out.found_l1 || !out.found_l1_prime) return out;
  if (rule == ChoiceRule::reverse) {
    std::reverse(first.begin(), first.end());
    std::reverse(second.begin(), second.end());
  }

  const std::uint64_t half = std::uint64_t{1} << (depth() - 1);
  auto x_bits = [&](VertexId l) {
    EdgeVector bits(half);
    for (VertexId v : x_set(omega, l)) bits.set(static_cast<EdgeId>(box_->coords(v).addr2 - half));
    return bits;
  };
  std::vector<EdgeVector> second_bits;
  second_bits.reserve(second.size());
  for (VertexId l : second) second_bits.push_back(x_bits(l));

  for (VertexId l1 : first) {
    const EdgeVector xs = x_bits(l1);
    if (xs.none()) continue;
    for (std::size_t j = 0; j < second.size(); ++j) {
      const EdgeVector common = xs & second_bits[j];
      if (common.none()) continue;
      const EdgeId bit = rule == ChoiceRule::lexicographic ? *common.first() : common.ones().back();
      out.x2_found = true;
      out.l1 = l1;
      out.l1_prime = second[j];
      out.x2 = box_->l2()[bit];
      try {
        out.cycle = assemble_cycle(omega, l1, second[j], *out.x2);
        out.cycle_length = out.cycle->length();
      } catch (const StructuralViolation& e) {
        out.violation = e.what();
      }
      return out;
    }
  }
  return out;
}

double theoretical_bound(int n, double p) {
  if (n < 1) throw std::invalid_argument("theoretical_bound: n must be at least 1");
  const double s = tree_survival(p, n - 1);
  const double s2 = tree_survival(p * p, n - 1);
  return (p * s) * (p * s) * p * p * s2;
}

double limiting_bound(double p) {
  const double t = tree_survival(p, std::nullopt);
  return p * p * t * t * tree_survival(p * p, std::nullopt);
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(trials);
  const double f = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double centre = (f + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(f * (1 - f) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

DlExperimentResult run_trials(const DlExperimentConfig& config) {
  if (config.n < 1) throw std::invalid_argument("run_trials: n must be at least 1");
  if (!(config.p >= 0.0 && config.p <= 1.0)) throw std::invalid_argument("run_trials: p must lie in [0, 1]");
  if (config.sweeps < 1) throw std::invalid_argument("run_trials: sweeps must be positive");

  const DLBox box = build_dl_box(config.n, config.margin);
  const DlConstruction construction(box);
  const DlMarginOracle oracle(box, config.max_margin);
  const Graph& g = box.graph();

  DlExperimentResult result;
  result.outcomes.resize(config.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < config.trials; i = next.fetch_add(1)) {
        RngStream rng(config.seed, i);
        const EdgeVector omega = config.model == PercolationModel::bernoulli
                                     ? bernoulli_sample(g, config.p, rng)
                                     : fk_glauber(g, config.p, config.sweeps, rng);
        TrialOutcome out = construction.analyze(omega, config.rule);
        out.trial = i;
        out.p = config.p;
        out.model = config.model;
        out.seed = config.seed;
        out.stream = i;
        if (out.cycle && config.verify_geodesics) {
          out.geodesic_ambient = is_geodesic_cycle(*out.cycle, oracle);
          out.diagonal = diagonal_criterion(*out.cycle, oracle);
          const BfsOracle in_omega(GraphView(g, omega));
          out.geodesic_omega = is_geodesic_cycle(*out.cycle, in_omega);
        }
        result.outcomes[i] = std::move(out);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(config.trials);
    }
  };

  unsigned workers = config.workers != 0 ? config.workers : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(config.trials, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  DlExperimentSummary& s = result.summary;
  s.trials = config.trials;
  for (const TrialOutcome& o : result.outcomes) {
    if (o.violation) ++s.violations;
    if (!o.success()) continue;
    ++s.successes;
    switch (o.geodesic_ambient) {
      case Verdict::yes:
        ++s.geodesic_pass;
        break;
      case Verdict::no:
        ++s.geodesic_fail;
        break;
      case Verdict::indeterminate:
        ++s.geodesic_indeterminate;
        break;
    }
    if (o.geodesic_omega == Verdict::yes) ++s.omega_geodesic_pass;
    if (o.diagonal == Verdict::yes) ++s.diagonal_pass;
  }
  s.frequency = s.trials == 0 ? 0.0 : static_cast<double>(s.successes) / static_cast<double>(s.trials);
  s.wilson = wilson_interval(s.successes, s.trials);
  s.bound = theoretical_bound(config.n, config.p);
  s.limiting_bound = limiting_bound(config.p);
  s.sigma = s.trials == 0 ? 0.0 : std::sqrt(s.bound * (1 - s.bound) / static_cast<double>(s.trials));
  s.unstable_distances = oracle.unstable_count();
  s.mcmc_approximate = config.model == PercolationModel::fk_glauber;
  return result;
}

}  // namespace evenspace
