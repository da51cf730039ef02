#include "evenspace/gensets.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "evenspace/errors.hpp"

namespace evenspace {

GeneratorFamily relator_cycles(const Graph& g, int k, std::size_t budget) {
  if (k < 3) throw std::invalid_argument("relator_cycles: k must be at least 3");
  GeneratorFamily fam;
  fam.graph = &g;
  fam.k = k;
  fam.cycles = enumerate_cycles(GraphView(g), static_cast<std::size_t>(k), budget);
  fam.edge_index.resize(g.edge_count());
  for (std::uint32_t i = 0; i < fam.cycles.size(); ++i) {
    fam.vectors.push_back(cycle_edges(fam.cycles[i], g));
    fam.vectors.back().for_each([&](EdgeId e) { fam.edge_index[e].push_back(i); });
  }
  return fam;
}

namespace {

// Depth-first search for sets of distinct generators cancelling `residual`.
class DecompositionSearch {
 public:
  DecompositionSearch(const GeneratorFamily& fam, std::size_t budget) : fam_(fam), budget_(budget) {
    for (const EdgeVector& v : fam.vectors) max_len_ = std::max(max_len_, v.count());
  }

  // First set of exactly `size` generators, or empty if none.
  bool find(EdgeVector residual, int size, std::vector<std::uint32_t>& chosen) {
    chosen.clear();
    collect_ = nullptr;
    return visit(residual, size, chosen);
  }

  void find_all(EdgeVector residual, int size, std::set<std::vector<std::uint32_t>>& out, std::size_t limit) {
    std::vector<std::uint32_t> chosen;
    collect_ = &out;
    limit_ = limit;
    visit(residual, size, chosen);
  }

 private:
  bool visit(EdgeVector& residual, int remaining, std::vector<std::uint32_t>& chosen) {
    if (residual.none()) {
      if (remaining != 0) return false;
      if (!collect_) return true;
      std::vector<std::uint32_t> set = chosen;
      std::sort(set.begin(), set.end());
      collect_->insert(std::move(set));
      return collect_->size() >= limit_;
    }
    if (remaining == 0) return false;
    if (residual.count() > static_cast<std::size_t>(remaining) * max_len_) return false;
    if (++nodes_ > budget_) throw BudgetExceeded("decomposition search budget exceeded");
    const EdgeId e = *residual.first();
    for (std::uint32_t g : fam_.edge_index[e]) {
      if (std::find(chosen.begin(), chosen.end(), g) != chosen.end()) continue;
      residual ^= fam_.vectors[g];
      chosen.push_back(g);
      const bool done = visit(residual, remaining - 1, chosen);
      residual ^= fam_.vectors[g];
      // a successful single search leaves its witness in `chosen`
      if (done && !collect_) return true;
      chosen.pop_back();
      if (done) return true;
    }
    return false;
  }

  const GeneratorFamily& fam_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  std::size_t max_len_ = 0;
  std::set<std::vector<std::uint32_t>>* collect_ = nullptr;
  std::size_t limit_ = 0;
};

void check_target(const EdgeVector& target, const GeneratorFamily& fam) {
  if (!fam.graph || target.size() != fam.graph->edge_count()) {
    throw std::invalid_argument("decomposition: target length does not match the family's graph");
  }
}

}  // namespace

Decomposition minimal_decomposition(const EdgeVector& target, const GeneratorFamily& fam, int n_max,
                                    std::size_t node_budget) {
  check_target(target, fam);
  Decomposition out;
  if (target.none()) {
    out.k = 0;
    return out;
  }
  DecompositionSearch search(fam, node_budget);
  std::vector<std::uint32_t> chosen;
  for (int size = 1; size <= n_max; ++size) {
    if (search.find(target, size, chosen)) {
      out.k = size;
      out.generators = chosen;
      std::sort(out.generators.begin(), out.generators.end());
      return out;
    }
  }
  return out;
}

std::vector<std::vector<std::uint32_t>> all_decompositions(const EdgeVector& target, const GeneratorFamily& fam,
                                                           int size, std::size_t limit, std::size_t node_budget) {
  check_target(target, fam);
  std::set<std::vector<std::uint32_t>> found;
  if (size < 0 || limit == 0) return {};
  DecompositionSearch(fam, node_budget).find_all(target, size, found, limit);
  return {found.begin(), found.end()};
}

bool union_is_connected(std::span<const std::uint32_t> generators, const GeneratorFamily& fam) {
  const Graph& g = *fam.graph;
  EdgeVector edges(g.edge_count());
  for (std::uint32_t i : generators) edges |= fam.vectors.at(i);
  if (edges.none()) return true;
  const GraphView view(g, edges);
  const Components comps = connected_components(view);
  std::optional<std::uint32_t> label;
  bool connected = true;
  edges.for_each([&](EdgeId e) {
    const std::uint32_t l = comps.label[g.edge(e).u];
    if (!label) label = l;
    if (*label != l) connected = false;
  });
  return connected;
}

std::optional<int> k_of_cycle(const Cycle& c, const GeneratorFamily& fam, int n_max, std::size_t node_budget) {
  return minimal_decomposition(cycle_edges(c, *fam.graph), fam, n_max, node_budget).k;
}

std::optional<int> k_of_cycle_in(const Cycle& c, const GraphView& omega, const GeneratorFamily& fam, int n_max,
                                 std::size_t node_budget) {
  if (!is_cycle_of(c, omega)) throw std::invalid_argument("k_of_cycle_in: cycle is not contained in omega");
  return k_of_cycle(c, fam, n_max, node_budget);
}

std::size_t CPrimeResult::cycle_count() const noexcept {
  std::size_t total = 0;
  for (const auto& level : levels) total += level.size();
  return total;
}

std::vector<Cycle> CPrimeResult::level_cycles(int n) const {
  std::vector<Cycle> out;
  if (n < 1 || n > static_cast<int>(levels.size())) return out;
  for (std::size_t i : levels[static_cast<std::size_t>(n - 1)]) out.push_back(candidates[i].cycle);
  return out;
}

CPrimeResult build_cprime(const Graph& g, const EdgeVector& omega, const GeneratorFamily& fam,
                          const CPrimeOptions& options) {
  if (options.n_max < 1) throw std::invalid_argument("build_cprime: n_max must be at least 1");
  if (fam.graph != &g) throw std::invalid_argument("build_cprime: family was built on a different graph");
  if (omega.size() != g.edge_count()) throw std::invalid_argument("build_cprime: omega length mismatch");

  CPrimeResult res;
  res.k = fam.k;
  res.n_max = options.n_max;
  res.max_len = static_cast<std::size_t>(fam.k) * static_cast<std::size_t>(options.n_max);
  res.running_basis = options.running_basis;
  res.basis = Gf2Basis(g.edge_count());
  res.levels.resize(static_cast<std::size_t>(options.n_max));

  const GraphView view(g, omega);
  for (Cycle& c : enumerate_cycles(view, res.max_len, options.cycle_budget)) {
    EdgeVector v = cycle_edges(c, g);
    res.candidates.push_back({std::move(c), std::move(v), std::nullopt});
  }

  // k(C) per candidate; order of completion does not matter.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < res.candidates.size(); i = next.fetch_add(1)) {
        Candidate& cand = res.candidates[i];
        cand.k = minimal_decomposition(cand.vector, fam, options.n_max, options.node_budget).k;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(res.candidates.size());
    }
  };
  const unsigned workers = std::max(1U, options.workers);
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (int n = 1; n <= options.n_max; ++n) {
    const Gf2Basis frozen = res.basis;
    auto& level = res.levels[static_cast<std::size_t>(n - 1)];
    for (std::size_t i = 0; i < res.candidates.size(); ++i) {
      const Candidate& cand = res.candidates[i];
      if (cand.k != n) continue;
      const Gf2Basis& reference = options.running_basis ? res.basis : frozen;
      if (reference.contains(cand.vector)) continue;
      level.push_back(i);
      res.basis.insert(cand.vector);
    }
  }
  return res;
}

MultiplicityProfile multiplicity_profile(const CPrimeResult& res, std::size_t edge_count) {
  MultiplicityProfile out;
  out.per_edge.assign(edge_count, 0);
  for (const auto& level : res.levels) {
    for (std::size_t i : level) {
      const EdgeVector& v = res.candidates[i].vector;
      if (v.size() != edge_count) throw std::invalid_argument("multiplicity_profile: edge count mismatch");
      v.for_each([&](EdgeId e) { ++out.per_edge[e]; });
    }
  }
  for (std::uint32_t m : out.per_edge) out.max = std::max(out.max, m);
  return out;
}

std::string_view to_string(EdgeDistance d) noexcept { return d == EdgeDistance::midpoint ? "midpoint" : "endpoint"; }

KClosure k_closure(const Graph& g, const EdgeVector& omega, int k, EdgeDistance convention) {
  if (k < 0) throw std::invalid_argument("k_closure: k must be nonnegative");
  if (omega.size() != g.edge_count()) throw std::invalid_argument("k_closure: omega length mismatch");
  KClosure out;
  out.edges = EdgeVector(g.edge_count());
  const EdgeVector closed = ~omega;
  if (closed.none()) return out;

  std::vector<VertexId> sources;
  closed.for_each([&](EdgeId e) {
    sources.push_back(g.edge(e).u);
    sources.push_back(g.edge(e).v);
  });
  const std::vector<int> dist = bfs_distances(GraphView(g), sources);
  const int shift = convention == EdgeDistance::midpoint ? 1 : 0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (closed.test(e)) {
      out.edges.set(e);
      continue;
    }
    const int du = dist[g.edge(e).u];
    const int dv = dist[g.edge(e).v];
    int d = du == kUnreachable ? dv : (dv == kUnreachable ? du : std::min(du, dv));
    if (d != kUnreachable && d + shift <= k) out.edges.set(e);
  }

  const Components comps = connected_components(GraphView(g, out.edges));
  std::vector<std::size_t> sizes(comps.count, 0);
  std::vector<bool> touched(g.vertex_count(), false);
  out.edges.for_each([&](EdgeId e) {
    touched[g.edge(e).u] = true;
    touched[g.edge(e).v] = true;
  });
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (touched[v]) ++sizes[comps.label[v]];
  }
  for (std::size_t s : sizes) {
    if (s > 0) ++out.component_count;
    out.largest_component = std::max(out.largest_component, s);
  }
  return out;
}

double SpanningReport::interior_fraction() const noexcept {
  return interior_checked == 0 ? 1.0 : static_cast<double>(interior_in_span) / static_cast<double>(interior_checked);
}

SpanningReport spanning_report(const Graph& g, const EdgeVector& omega, const CPrimeResult& res, std::size_t l_check,
                               int interior_margin, std::size_t cycle_budget) {
  SpanningReport out;
  const GraphView view(g, omega);
  out.rank = res.basis.rank();
  out.dim = cycle_space_dim(view);

  std::vector<VertexId> boundary;
  const std::size_t top = g.max_degree();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) < top) boundary.push_back(v);
  }
  const std::vector<int> to_boundary =
      boundary.empty() ? std::vector<int>(g.vertex_count(), kUnreachable) : bfs_distances(GraphView(g), boundary);
  auto interior = [&](const Cycle& c) {
    for (VertexId v : c.vertices()) {
      if (to_boundary[v] != kUnreachable && to_boundary[v] <= interior_margin) return false;
    }
    return true;
  };

  if (l_check >= 3) {
    for (const Cycle& c : enumerate_cycles(view, l_check, cycle_budget)) {
      const bool in_span = res.basis.contains(cycle_edges(c, g));
      ++out.cycles_checked;
      if (in_span) ++out.cycles_in_span;
      if (interior(c)) {
        ++out.interior_checked;
        if (in_span) ++out.interior_in_span;
      }
    }
  }
  for (const Candidate& cand : res.candidates) {
    if (cand.k && *cand.k <= res.n_max && !res.basis.contains(cand.vector)) ++out.completeness_violations;
  }
  return out;
}

std::vector<std::string> verify_levels(const CPrimeResult& res, const EdgeVector& omega, const GeneratorFamily& fam) {
  std::vector<std::string> problems;
  const Graph& g = *fam.graph;
  const GraphView view(g, omega);
  Gf2Basis basis(g.edge_count());
  for (int n = 1; n <= static_cast<int>(res.levels.size()); ++n) {
    const Gf2Basis frozen = basis;
    for (std::size_t i : res.levels[static_cast<std::size_t>(n - 1)]) {
      const Candidate& cand = res.candidates[i];
      const std::string name = "level " + std::to_string(n) + " cycle " + cand.cycle.to_string();
      if (!is_cycle_of(cand.cycle, view)) problems.push_back(name + ": not inside omega");
      if (cand.cycle.length() > static_cast<std::size_t>(fam.k) * static_cast<std::size_t>(n)) {
        problems.push_back(name + ": longer than k * n");
      }
      const auto k = minimal_decomposition(cand.vector, fam, res.n_max).k;
      if (k != n) problems.push_back(name + ": k(C) is " + (k ? std::to_string(*k) : std::string("above n_max")));
      const Gf2Basis& reference = res.running_basis ? basis : frozen;
      if (reference.contains(cand.vector)) problems.push_back(name + ": already in the span it was tested against");
      basis.insert(cand.vector);
    }
  }
  return problems;
}

DecompositionAudit audit_decompositions(const CPrimeResult& res, const EdgeVector& omega, const GeneratorFamily& fam) {
  DecompositionAudit audit;
  for (int n = 2; n <= static_cast<int>(res.levels.size()); ++n) {
    for (std::size_t i : res.levels[static_cast<std::size_t>(n - 1)]) {
      ++audit.cycles;
      for (const auto& set : all_decompositions(res.candidates[i].vector, fam, n)) {
        ++audit.decompositions;
        for (std::uint32_t gen : set) {
          if (fam.vectors[gen].is_subset_of(omega)) ++audit.generators_inside_omega;
        }
      }
    }
  }
  return audit;
}

}  // namespace evenspace
