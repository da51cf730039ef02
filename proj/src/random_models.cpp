#include "evenspace/random_models.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "evenspace/errors.hpp"
#include "evenspace/gf2.hpp"

namespace evenspace {

namespace {

using Real = SubsetDistribution::Real;

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + ": parameter must lie in [0, 1]");
}

void require_cap(const Graph& g, std::size_t cap, const char* what) {
  if (g.edge_count() > cap || g.edge_count() > 30) {
    throw BudgetExceeded(std::string(what) + ": " + std::to_string(g.edge_count()) + " edges exceed cap " +
                         std::to_string(cap));
  }
}

std::vector<Real> point_mass(std::size_t m, std::uint64_t subset) {
  std::vector<Real> w(std::size_t{1} << m, 0);
  w[subset] = 1;
  return w;
}

std::uint64_t full_mask(std::size_t m) { return m == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1; }

// Number of connected components of the spanning subgraph `mask`.
class SmallComponentCounter {
 public:
  explicit SmallComponentCounter(const Graph& g) : graph_(g), parent_(g.vertex_count()) {}

  std::size_t count(std::uint64_t mask) {
    for (std::size_t v = 0; v < parent_.size(); ++v) parent_[v] = static_cast<VertexId>(v);
    std::size_t k = parent_.size();
    while (mask != 0) {
      const auto e = static_cast<EdgeId>(__builtin_ctzll(mask));
      mask &= mask - 1;
      const VertexId a = find(graph_.edge(e).u);
      const VertexId b = find(graph_.edge(e).v);
      if (a != b) {
        parent_[a] = b;
        --k;
      }
    }
    return k;
  }

 private:
  VertexId find(VertexId v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  const Graph& graph_;
  std::vector<VertexId> parent_;
};

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6576656eU};
  engine_.seed(seq);
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::below: n must be positive");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % n;
  }
}

SubsetDistribution::SubsetDistribution(std::size_t edge_count, std::vector<Real> weights)
    : edge_count_(edge_count), weights_(std::move(weights)) {
  if (edge_count_ > 30 || weights_.size() != (std::size_t{1} << edge_count_)) {
    throw std::invalid_argument("SubsetDistribution: need 2^m weights");
  }
  cumulative_.resize(weights_.size());
  Real acc = 0;
  for (std::size_t s = 0; s < weights_.size(); ++s) {
    if (!(weights_[s] >= 0)) throw std::invalid_argument("SubsetDistribution: negative weight");
    acc += weights_[s];
    cumulative_[s] = acc;
  }
  if (!(acc > 0)) throw std::invalid_argument("SubsetDistribution: weights vanish");
  normalizer_ = acc;
}

Real SubsetDistribution::marginal(EdgeId e) const {
  if (e >= edge_count_) throw std::out_of_range("SubsetDistribution::marginal: edge out of range");
  Real acc = 0;
  for (std::size_t s = 0; s < weights_.size(); ++s) {
    if ((s >> e) & 1U) acc += weights_[s];
  }
  return acc / normalizer_;
}

std::uint64_t SubsetDistribution::sample(RngStream& rng) const {
  const Real target = static_cast<Real>(rng.uniform()) * normalizer_;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // rounding at the top end: last subset with positive weight
    for (std::size_t s = weights_.size(); s-- > 0;) {
      if (weights_[s] > 0) return s;
    }
  }
  return static_cast<std::uint64_t>(it - cumulative_.begin());
}

void SubsetDistribution::write_csv(std::ostream& out) const {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << "subset,weight,probability\n" << std::setprecision(std::numeric_limits<Real>::max_digits10);
  for (std::size_t s = 0; s < weights_.size(); ++s) {
    out << EdgeVector::from_mask(edge_count_, s).to_hex() << ',' << weights_[s] << ',' << probability(s) << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

EmpiricalHistogram::EmpiricalHistogram(std::size_t edge_count) : edge_count_(edge_count) {
  if (edge_count > 24) throw BudgetExceeded("EmpiricalHistogram: too many edges");
  counts_.assign(std::size_t{1} << edge_count, 0);
}

double EmpiricalHistogram::frequency(std::uint64_t subset) const {
  return total_ == 0 ? 0.0 : static_cast<double>(count(subset)) / static_cast<double>(total_);
}

double tv_distance(const SubsetDistribution& a, const SubsetDistribution& b) {
  if (a.edge_count() != b.edge_count()) throw std::invalid_argument("tv_distance: different edge counts");
  Real acc = 0;
  for (std::size_t s = 0; s < a.support_size(); ++s) acc += std::fabs(a.probability(s) - b.probability(s));
  return static_cast<double>(acc / 2);
}

double tv_distance(const SubsetDistribution& a, const EmpiricalHistogram& b) {
  if (a.edge_count() != b.edge_count()) throw std::invalid_argument("tv_distance: different edge counts");
  Real acc = 0;
  for (std::size_t s = 0; s < a.support_size(); ++s) acc += std::fabs(a.probability(s) - b.frequency(s));
  return static_cast<double>(acc / 2);
}

EdgeVector bernoulli_sample(const Graph& g, double p, RngStream& rng) {
  require_probability(p, "bernoulli_sample");
  EdgeVector out(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (rng.uniform() < p) out.set(e);
  }
  return out;
}

std::vector<double> uniform_labels(std::size_t edge_count, RngStream& rng) {
  std::vector<double> labels(edge_count);
  for (double& u : labels) u = rng.uniform();
  return labels;
}

EdgeVector threshold_labels(std::span<const double> labels, double p) {
  EdgeVector out(labels.size());
  for (std::size_t e = 0; e < labels.size(); ++e) {
    if (labels[e] < p) out.set(static_cast<EdgeId>(e));
  }
  return out;
}

SubsetDistribution bernoulli_exact(const Graph& g, double p, std::size_t edge_cap) {
  require_probability(p, "bernoulli_exact");
  require_cap(g, edge_cap, "bernoulli_exact");
  const std::size_t m = g.edge_count();
  std::vector<Real> w(std::size_t{1} << m);
  const Real po = p;
  const Real pc = 1 - po;
  for (std::size_t s = 0; s < w.size(); ++s) {
    const int open = __builtin_popcountll(s);
    w[s] = std::pow(po, open) * std::pow(pc, static_cast<int>(m) - open);
  }
  return SubsetDistribution(m, std::move(w));
}

SubsetDistribution fk_exact(const Graph& g, double p, std::size_t edge_cap) {
  require_probability(p, "fk_exact");
  require_cap(g, edge_cap, "fk_exact");
  const std::size_t m = g.edge_count();
  if (p == 0.0) return SubsetDistribution(m, point_mass(m, 0));
  if (p == 1.0) return SubsetDistribution(m, point_mass(m, full_mask(m)));
  const Real ratio = static_cast<Real>(p) / (1 - static_cast<Real>(p));
  std::vector<Real> w(std::size_t{1} << m);
  SmallComponentCounter counter(g);
  for (std::size_t s = 0; s < w.size(); ++s) {
    w[s] = std::pow(ratio, __builtin_popcountll(s)) * std::ldexp(Real{1}, static_cast<int>(counter.count(s)));
  }
  return SubsetDistribution(m, std::move(w));
}

double fk_conditional_open_probability(double p, bool endpoints_connected) {
  return endpoints_connected ? p : p / (2.0 - p);
}

FkGlauberChain::FkGlauberChain(const Graph& g, double p)
    : graph_(&g), p_(p), state_(g.all_edges()), mark_(g.vertex_count(), 0) {
  require_probability(p, "FkGlauberChain");
  if (g.edge_count() == 0) throw std::invalid_argument("FkGlauberChain: graph has no edges");
}

void FkGlauberChain::reset_open() { state_ = graph_->all_edges(); }

bool FkGlauberChain::connected_without(VertexId u, VertexId v, EdgeId skip) {
  if (stamp_ >= std::numeric_limits<std::uint32_t>::max() - 2) {
    std::fill(mark_.begin(), mark_.end(), 0);
    stamp_ = 0;
  }
  stamp_ += 2;
  const std::uint32_t side_a = stamp_;
  const std::uint32_t side_b = stamp_ + 1;
  mark_[u] = side_a;
  mark_[v] = side_b;
  queue_a_.assign(1, u);
  queue_b_.assign(1, v);
  std::size_t head_a = 0;
  std::size_t head_b = 0;

  // Expands one vertex of `queue`; true if the other side was touched.
  auto expand = [&](std::vector<VertexId>& queue, std::size_t& head, std::uint32_t own, std::uint32_t other) {
    const VertexId x = queue[head++];
    for (const Incidence& inc : graph_->neighbors(x)) {
      if (inc.edge == skip || !state_.test(inc.edge)) continue;
      const std::uint32_t m = mark_[inc.neighbor];
      if (m == other) return true;
      if (m != own) {
        mark_[inc.neighbor] = own;
        queue.push_back(inc.neighbor);
      }
    }
    return false;
  };

  // Alternate sides; whichever component is exhausted first proves the split.
  while (head_a < queue_a_.size() && head_b < queue_b_.size()) {
    if (expand(queue_a_, head_a, side_a, side_b)) return true;
    if (head_a >= queue_a_.size()) break;
    if (expand(queue_b_, head_b, side_b, side_a)) return true;
  }
  return false;
}

void FkGlauberChain::update(RngStream& rng) {
  const auto e = static_cast<EdgeId>(rng.below(graph_->edge_count()));
  const Edge& edge = graph_->edge(e);
  const bool connected = connected_without(edge.u, edge.v, e);
  state_.set(e, rng.uniform() < fk_conditional_open_probability(p_, connected));
}

void FkGlauberChain::sweep(RngStream& rng) {
  for (std::size_t i = 0; i < graph_->edge_count(); ++i) update(rng);
}

EdgeVector fk_glauber(const Graph& g, double p, int sweeps, RngStream& rng) {
  if (sweeps < 1) throw std::invalid_argument("fk_glauber: sweeps must be positive");
  FkGlauberChain chain(g, p);
  for (int s = 0; s < sweeps; ++s) chain.sweep(rng);
  return chain.state();
}

SubsetDistribution loop_o1_exact(const Graph& g, double x, std::size_t edge_cap) {
  require_probability(x, "loop_o1_exact");
  require_cap(g, edge_cap, "loop_o1_exact");
  const std::size_t m = g.edge_count();
  std::vector<Real> w(std::size_t{1} << m, 0);
  std::vector<std::uint8_t> parity(g.vertex_count());
  for (std::size_t s = 0; s < w.size(); ++s) {
    std::fill(parity.begin(), parity.end(), 0);
    for (std::uint64_t bits = s; bits != 0; bits &= bits - 1) {
      const Edge& e = g.edge(static_cast<EdgeId>(__builtin_ctzll(bits)));
      parity[e.u] ^= 1;
      parity[e.v] ^= 1;
    }
    if (std::find(parity.begin(), parity.end(), 1) == parity.end()) {
      w[s] = std::pow(static_cast<Real>(x), __builtin_popcountll(s));
    }
  }
  return SubsetDistribution(m, std::move(w));
}

std::vector<EdgeVector> ues_spanning_tree_generators(const GraphView& gv) {
  return fundamental_cycles(gv, spanning_forest(gv));
}

EdgeVector combine_by_coins(std::span<const EdgeVector> gens, std::uint64_t pattern, std::size_t edge_count) {
  if (gens.size() > 64) throw std::invalid_argument("combine_by_coins: more than 64 generators");
  EdgeVector out(edge_count);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if ((pattern >> i) & 1U) out ^= gens[i];
  }
  return out;
}

EdgeVector ues_coinflip(const GraphView& gv, std::span<const EdgeVector> gens, RngStream& rng) {
  EdgeVector out(gv.edge_count());
  for (const EdgeVector& gen : gens) {
    if (rng.coin()) out ^= gen;
  }
  return out;
}

EdgeVector ues_spanning_tree(const GraphView& gv, RngStream& rng) {
  const auto gens = ues_spanning_tree_generators(gv);
  return ues_coinflip(gv, gens, rng);
}

SubsetDistribution ues_pushforward(const SubsetDistribution& config_law, const Graph& g) {
  const std::size_t m = g.edge_count();
  if (config_law.edge_count() != m) throw std::invalid_argument("ues_pushforward: edge count mismatch");
  std::vector<Real> out(std::size_t{1} << m, 0);
  std::vector<std::uint64_t> gens;
  for (std::uint64_t s = 0; s < out.size(); ++s) {
    const Real mass = config_law.probability(s);
    if (mass == 0) continue;
    const GraphView view(g, EdgeVector::from_mask(m, s));
    gens.clear();
    for (const EdgeVector& c : ues_spanning_tree_generators(view)) gens.push_back(c.to_mask());
    const Real share = std::ldexp(mass, -static_cast<int>(gens.size()));
    // Gray-code walk over the whole cycle space of the configuration.
    std::uint64_t current = 0;
    out[0] += share;
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << gens.size()); ++i) {
      current ^= gens[static_cast<std::size_t>(__builtin_ctzll(i))];
      out[current] += share;
    }
  }
  return SubsetDistribution(m, std::move(out));
}

LoopViaFkSampler::LoopViaFkSampler(const Graph& g, double x, LoopViaFkOptions options)
    : graph_(&g), p_(0), options_(std::move(options)) {
  require_probability(x, "loop_via_fk");
  p_ = 2.0 * x / (1.0 + x);
  if (options_.method == UesMethod::coinflip && !options_.generators) {
    throw std::invalid_argument("loop_via_fk: coinflip method needs a generator provider");
  }
  if (options_.fk == FkSampling::exact) fk_law_.emplace(fk_exact(g, p_, options_.edge_cap));
}

EdgeVector LoopViaFkSampler::sample(RngStream& rng) const {
  const std::size_t m = graph_->edge_count();
  EdgeVector omega = fk_law_ ? EdgeVector::from_mask(m, fk_law_->sample(rng))
                             : fk_glauber(*graph_, p_, options_.sweeps, rng);
  const GraphView view(*graph_, std::move(omega));
  const auto gens = options_.method == UesMethod::spanning_tree ? ues_spanning_tree_generators(view)
                                                                : options_.generators(view);
  return ues_coinflip(view, gens, rng);
}

EdgeVector loop_via_fk(const Graph& g, double x, RngStream& rng, const LoopViaFkOptions& options) {
  return LoopViaFkSampler(g, x, options).sample(rng);
}

namespace {

// Enumerates every up-set of the subset lattice on m <= 5 elements. Masks are
// decided from the top down; a mask may join only if all of its one-larger
// supersets already did, which keeps every partial choice extendable.
class UpsetWalker {
 public:
  UpsetWalker(std::size_t m, std::vector<Real> diff) : m_(m), diff_(std::move(diff)), in_(diff_.size(), false) {}

  void run() {
    best_ = std::numeric_limits<Real>::infinity();
    visit(static_cast<long>(diff_.size()) - 1, 0);
  }

  std::size_t events() const noexcept { return events_; }
  Real worst() const noexcept { return best_; }
  const std::vector<bool>& worst_set() const noexcept { return best_set_; }

 private:
  void visit(long idx, Real acc) {
    if (idx < 0) {
      ++events_;
      if (acc < best_) {
        best_ = acc;
        best_set_ = in_;
      }
      return;
    }
    const auto s = static_cast<std::size_t>(idx);
    visit(idx - 1, acc);
    for (std::size_t b = 0; b < m_; ++b) {
      if (!((s >> b) & 1U) && !in_[s | (std::size_t{1} << b)]) return;
    }
    in_[s] = true;
    visit(idx - 1, acc + diff_[s]);
    in_[s] = false;
  }

  std::size_t m_;
  std::vector<Real> diff_;
  std::vector<bool> in_;
  std::size_t events_ = 0;
  Real best_ = 0;
  std::vector<bool> best_set_;
};

std::vector<std::uint64_t> minimal_elements(const std::vector<bool>& upset, std::size_t m) {
  std::vector<std::uint64_t> out;
  for (std::size_t s = 0; s < upset.size(); ++s) {
    if (!upset[s]) continue;
    bool minimal = true;
    for (std::size_t b = 0; b < m && minimal; ++b) {
      if (((s >> b) & 1U) && upset[s & ~(std::size_t{1} << b)]) minimal = false;
    }
    if (minimal) out.push_back(s);
  }
  return out;
}

}  // namespace

DominationResult check_domination(const SubsetDistribution& first, const SubsetDistribution& second,
                                  const DominationOptions& options) {
  if (first.edge_count() != second.edge_count()) {
    throw std::invalid_argument("check_domination: different edge counts");
  }
  const std::size_t m = first.edge_count();
  const std::size_t n = first.support_size();
  std::vector<Real> diff(n);
  for (std::size_t s = 0; s < n; ++s) diff[s] = first.probability(s) - second.probability(s);

  DominationResult result;
  if (m <= kMaxExhaustiveEdges) {
    UpsetWalker walker(m, std::move(diff));
    walker.run();
    result.events_checked = walker.events();
    result.worst_margin = walker.worst();
    result.worst_event_generators = minimal_elements(walker.worst_set(), m);
  } else {
    if (!options.allow_heuristic) {
      throw BudgetExceeded("check_domination: " + std::to_string(m) + " edges exceed exhaustive limit of " +
                           std::to_string(kMaxExhaustiveEdges));
    }
    // Non-exhaustive: principal filters {w >= S}, hitting events
    // {w meets S} and size thresholds {|w| >= j}.
    result.exhaustive = false;
    std::vector<Real> up = diff;    // sum over supersets
    std::vector<Real> down = diff;  // sum over subsets
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t bit = std::size_t{1} << b;
      for (std::size_t s = 0; s < n; ++s) {
        if (s & bit) {
          up[s ^ bit] += up[s];
        } else {
          down[s ^ bit] += down[s];
        }
      }
    }
    Real worst = std::numeric_limits<Real>::infinity();
    std::vector<std::uint64_t> generators;
    auto consider = [&](Real margin, std::vector<std::uint64_t> gens) {
      ++result.events_checked;
      if (margin < worst) {
        worst = margin;
        generators = std::move(gens);
      }
    };
    const std::size_t full = n - 1;
    for (std::size_t s = 0; s < n; ++s) {
      consider(up[s], {s});
      std::vector<std::uint64_t> singles;
      for (std::size_t b = 0; b < m; ++b) {
        if ((s >> b) & 1U) singles.push_back(std::uint64_t{1} << b);
      }
      consider(-down[full ^ s], std::move(singles));
    }
    std::vector<Real> by_size(m + 1, 0);
    for (std::size_t s = 0; s < n; ++s) by_size[static_cast<std::size_t>(__builtin_popcountll(s))] += diff[s];
    Real tail = 0;
    for (std::size_t j = m + 1; j-- > 0;) {
      tail += by_size[j];
      consider(tail, {});
    }
    result.worst_margin = worst;
    result.worst_event_generators = std::move(generators);
  }
  result.dominates = result.worst_margin >= -static_cast<Real>(options.tolerance);
  return result;
}

double tree_survival(double p, std::optional<int> depth) {
  require_probability(p, "tree_survival");
  if (!depth) return p <= 0.5 ? 0.0 : (2.0 * p - 1.0) / (p * p);
  if (*depth < 0) throw std::invalid_argument("tree_survival: depth must be nonnegative");
  double s = 1.0;
  for (int j = 0; j < *depth; ++j) {
    const double miss = 1.0 - p * s;
    s = 1.0 - miss * miss;
  }
  return s;
}

}  // namespace evenspace
