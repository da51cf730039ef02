// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "evenspace/builders.hpp"
#include "evenspace/cli.hpp"
#include "evenspace/dl_experiment.hpp"
#include "evenspace/geodesics.hpp"
#include "evenspace/gensets.hpp"
#include "evenspace/gf2.hpp"
#include "evenspace/random_models.hpp"
#include "oracles.hpp"

using namespace evenspace;

namespace {

// Tolerances and sizes
constexpr double kIdentityTol = 1e-10;
constexpr double kIdentitySeconds = 5;
constexpr double kDominationSeconds = 60;
constexpr double kGlauberTv = 0.01;
constexpr std::uint64_t kGlauberStates = 1'000'000;
constexpr std::size_t kTreeTrials = 100'000;
constexpr double kTreeLimitTol = 1e-6;
constexpr std::size_t kDlTrials = 10'000;
constexpr double kDlSeconds = 600;
constexpr std::size_t kFkTrials = 10'000;
constexpr std::size_t kMinEvenCycles = 1000;
constexpr std::size_t kGensetTrials = 100;
constexpr std::size_t kPipelineSamples = 100'000;
constexpr double kPipelineTv = 0.02;
constexpr double kSigmas = 3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

const std::vector<Graph>& small_graphs() {
  static const std::vector<Graph> graphs = oracle::connected_graphs_up_to(6);
  return graphs;
}

Outcome identity() {
  const Timer timer;
  double worst = 0;
  std::size_t cases = 0;
  for (const Graph& g : small_graphs()) {
    if (g.edge_count() == 0) continue;
    for (double p : {0.3, 0.6, 0.9}) {
      worst = std::max(worst, tv_distance(loop_o1_exact(g, p / (2 - p)), ues_pushforward(fk_exact(g, p), g)));
      ++cases;
    }
  }
  const double secs = timer.seconds();
  return {worst <= kIdentityTol && secs < kIdentitySeconds,
          "cases=" + std::to_string(cases) + " max_tv=" + fmt(worst) + " seconds=" + fmt(secs, 3)};
}

Outcome triangle_ratio() {
  const double p = 0.6;
  const Graph tri = build_triangle();
  const auto law = ues_pushforward(fk_exact(tri, p), tri);
  const double ratio = static_cast<double>(law.probability(0b111) / law.probability(0));
  const double expected = std::pow(p / (2 - p), 3);
  const double err = std::abs(ratio - expected);
  return {err <= 1e-10, "ratio=" + fmt(ratio, 12) + " expected=" + fmt(expected, 12) + " err=" + fmt(err)};
}

Outcome ues_uniformity() {
  const Graph k4 = build_complete(4);
  const GraphView view(k4);
  auto tally = [&](const std::vector<EdgeVector>& gens) {
    std::map<std::uint64_t, std::size_t> hits;
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << gens.size()); ++pattern)
      ++hits[combine_by_coins(gens, pattern, k4.edge_count()).to_mask()];
    return hits;
  };
  auto uniform = [&](const std::map<std::uint64_t, std::size_t>& hits, std::size_t each) {
    if (hits.size() != 8) return false;
    for (const auto& [mask, n] : hits)
      if (n != each || !oracle::is_even_mask(k4, mask)) return false;
    return true;
  };
  const auto tree_gens = ues_spanning_tree_generators(view);
  std::vector<EdgeVector> all_cycles;
  for (const Cycle& c : enumerate_cycles(view, 4)) all_cycles.push_back(cycle_edges(c, k4));
  const bool tree_ok = tree_gens.size() == 3 && uniform(tally(tree_gens), 1);
  const bool all_ok = all_cycles.size() == 7 && uniform(tally(all_cycles), 16);
  return {tree_ok && all_ok, "spanning_tree_generators=" + std::to_string(tree_gens.size()) +
                                 (tree_ok ? " uniform" : " NOT uniform") + " cycles=" +
                                 std::to_string(all_cycles.size()) + (all_ok ? " uniform" : " NOT uniform")};
}

Outcome domination() {
  const Timer timer;
  std::size_t checks = 0, failures = 0;
  long double worst = 1;
  for (const Graph& g : small_graphs()) {
    if (g.edge_count() == 0 || g.edge_count() > kMaxExhaustiveEdges) continue;
    for (double p : {0.3, 0.5, 0.7, 0.9}) {
      const auto res = check_domination(fk_exact(g, p), bernoulli_exact(g, p / (2 - p)));
      ++checks;
      if (!res.dominates || !res.exhaustive) ++failures;
      worst = std::min(worst, res.worst_margin);
    }
  }
  const Graph tri = build_triangle();
  const auto control = check_domination(fk_exact(tri, 0.6), bernoulli_exact(tri, 0.6));
  const double secs = timer.seconds();
  return {failures == 0 && !control.dominates && secs < kDominationSeconds,
          "checks=" + std::to_string(checks) + " failures=" + std::to_string(failures) +
              " worst_margin=" + fmt(static_cast<double>(worst)) +
              " control_dominates=" + (control.dominates ? "true" : "false") + " seconds=" + fmt(secs, 3)};
}

Outcome glauber() {
  const double p = 0.6;
  std::ostringstream detail;
  bool pass = true;
  const std::pair<const char*, Graph> cases[] = {{"triangle", build_triangle()}, {"path3", build_path(3)}};
  for (const auto& [name, g] : cases) {
    FkGlauberChain chain(g, p);
    RngStream rng(5, 0);
    // burn-in: half of all updates
    for (std::uint64_t i = 0; i < kGlauberStates; ++i) chain.update(rng);
    EmpiricalHistogram hist(g.edge_count());
    for (std::uint64_t i = 0; i < kGlauberStates; ++i) {
      chain.update(rng);
      hist.add(chain.state());
    }
    const double tv = tv_distance(fk_exact(g, p), hist);
    pass = pass && tv < kGlauberTv;
    detail << name << "_tv=" << fmt(tv) << " ";
  }
  detail << "states=" << kGlauberStates;
  return {pass, detail.str()};
}

Outcome tree_survival_check() {
  const double p = 0.8;
  const double exact = tree_survival(p, 20);
  std::size_t survived = 0;
  for (std::size_t t = 0; t < kTreeTrials; ++t) {
    RngStream rng(6, t);
    survived += oracle::tree_survives(p, 20, rng);
  }
  const double freq = static_cast<double>(survived) / kTreeTrials;
  const double sigma = std::sqrt(exact * (1 - exact) / kTreeTrials);
  bool monotone = true;
  for (int n = 1; n <= 60; ++n) monotone = monotone && tree_survival(p, n) <= tree_survival(p, n - 1);
  const double limit = tree_survival(p, std::nullopt);
  const double gap = std::abs(tree_survival(p, 60) - 0.9375);
  const bool pass = std::abs(freq - exact) <= kSigmas * sigma && monotone && gap <= kTreeLimitTol &&
                    std::abs(limit - 0.9375) <= 1e-12;
  return {pass, "mc=" + fmt(freq, 6) + " exact20=" + fmt(exact, 6) + " sigma=" + fmt(sigma, 3) +
                    " monotone=" + (monotone ? "true" : "false") + " gap60=" + fmt(gap, 3)};
}

Outcome dl_experiment() {
  std::ostringstream detail;
  bool pass = true;
  double slowest = 0;
  for (int n = 1; n <= 4; ++n) {
    for (double p : {0.75, 0.9}) {
      DlExperimentConfig cfg;
      cfg.n = n;
      cfg.p = p;
      cfg.trials = kDlTrials;
      cfg.seed = 7000 + static_cast<std::uint64_t>(n);
      const Timer timer;
      const auto res = run_trials(cfg);
      slowest = std::max(slowest, timer.seconds());
      const auto& s = res.summary;
      // (a) every constructed cycle is sound and geodesic with stable distances
      const bool hard = s.violations == 0 && s.geodesic_pass == s.successes && s.geodesic_fail == 0 &&
                        s.geodesic_indeterminate == 0 && s.unstable_distances == 0;
      // (b)
      const bool above = s.frequency >= s.bound - kSigmas * s.sigma;
      // (c)
      bool exact = true;
      if (n == 1) {
        const double q = std::pow(p, 4);
        exact = std::abs(s.frequency - q) <= kSigmas * std::sqrt(q * (1 - q) / kDlTrials);
      }
      pass = pass && hard && above && exact;
      detail << "[n=" << n << " p=" << p << " freq=" << fmt(s.frequency) << " bound=" << fmt(s.bound)
             << (hard ? "" : " HARD-FAIL") << (above ? "" : " BELOW") << (exact ? "" : " OFF-P4") << "] ";
    }
  }
  pass = pass && slowest < kDlSeconds;
  detail << "slowest_seconds=" << fmt(slowest, 3);
  return {pass, detail.str()};
}

Outcome dl_fk_variant() {
  const double p = 0.9;
  DlExperimentConfig fk;
  fk.n = 2;
  fk.p = p;
  fk.model = PercolationModel::fk_glauber;
  fk.trials = kFkTrials;
  fk.seed = 8001;
  DlExperimentConfig bern = fk;
  bern.model = PercolationModel::bernoulli;
  bern.p = p / (2 - p);
  bern.seed = 8002;
  const auto f = run_trials(fk).summary;
  const auto b = run_trials(bern).summary;
  const double sigma = std::sqrt(b.frequency * (1 - b.frequency) / kFkTrials);
  return {f.frequency >= b.frequency - kSigmas * sigma && f.violations == 0,
          "fk_freq=" + fmt(f.frequency) + " bernoulli_freq=" + fmt(b.frequency) + " sigma=" + fmt(sigma, 3) +
              " sweeps=" + std::to_string(fk.sweeps)};
}

VertexId grid_at(std::size_t cols, std::size_t r, std::size_t c) { return static_cast<VertexId>(r * cols + c); }

Outcome geodesic_predicates() {
  const Graph g = build_grid_patch(5, 5);
  const BfsOracle ambient{GraphView(g)};
  std::size_t cycles = 0, diagonal_yes = 0, violations = 0;
  for (std::uint64_t round = 0; cycles < kMinEvenCycles || round < 40; ++round) {
    RngStream rng(9, round);
    const EdgeVector omega = bernoulli_sample(g, 0.75, rng);
    const GraphView view(g, omega);
    const BfsOracle local(view);
    for (const Cycle& c : enumerate_cycles(view, 12)) {
      if (c.length() % 2) continue;
      ++cycles;
      for (const DistanceOracle* o : {static_cast<const DistanceOracle*>(&ambient),
                                      static_cast<const DistanceOracle*>(&local)}) {
        if (diagonal_criterion(c, *o) != Verdict::yes) continue;
        ++diagonal_yes;
        if (is_geodesic_cycle(c, *o) != Verdict::yes) ++violations;
      }
    }
  }
  const std::size_t cols = 4;
  const Graph g4 = build_grid_patch(4, 4);
  const BfsOracle o4{GraphView(g4)};
  const Cycle tromino({grid_at(cols, 0, 0), grid_at(cols, 0, 1), grid_at(cols, 0, 2), grid_at(cols, 1, 2),
                       grid_at(cols, 1, 1), grid_at(cols, 2, 1), grid_at(cols, 2, 0), grid_at(cols, 1, 0)});
  const Verdict tromino_v = is_geodesic_cycle(tromino, o4);

  const Graph g3 = build_grid_patch(3, 3);
  const Cycle block({0, 1, 2, 5, 8, 7, 6, 3});
  const Verdict block_ambient = is_geodesic_cycle(block, BfsOracle{GraphView(g3)});
  EdgeVector ring = g3.all_edges();
  for (VertexId nb : {1u, 3u, 5u, 7u}) ring.set(*g3.find_edge(4, nb), false);
  const Verdict block_omega = is_geodesic_cycle(block, BfsOracle{GraphView(g3, ring)});

  // The block boundary is not geodesic in the full grid (its side midpoints
  // meet through the centre); it is accepted once the centre spokes are absent.
  const bool pass = cycles >= kMinEvenCycles && violations == 0 && tromino_v == Verdict::no &&
                    block_ambient == Verdict::no && block_omega == Verdict::yes;
  return {pass, "even_cycles=" + std::to_string(cycles) + " diagonal_yes=" + std::to_string(diagonal_yes) +
                    " violations=" + std::to_string(violations) + " tromino=" + std::string(to_string(tromino_v)) +
                    " block_ambient=" + std::string(to_string(block_ambient)) +
                    " block_without_spokes=" + std::string(to_string(block_omega))};
}

Outcome feasible_gensets() {
  std::ostringstream detail;
  CPrimeOptions opt;
  opt.n_max = 3;

  // (a)
  const Graph g6 = build_grid_patch(6, 6);
  const auto fam6 = relator_cycles(g6, 4);
  const auto full = build_cprime(g6, g6.all_edges(), fam6, opt);
  const bool a = full.level_cycles(1) == fam6.cycles && full.cycle_count() == fam6.cycles.size();
  detail << "full_grid_cycles=" << full.cycle_count() << " ";

  // (b)
  const Graph g4 = build_grid_patch(4, 4);
  const auto fam4 = relator_cycles(g4, 4);
  EdgeVector omega4 = g4.all_edges();
  omega4.set(*g4.find_edge(grid_at(4, 1, 1), grid_at(4, 1, 2)), false);
  const auto miss = build_cprime(g4, omega4, fam4, opt);
  const Cycle domino({grid_at(4, 0, 1), grid_at(4, 0, 2), grid_at(4, 1, 2), grid_at(4, 2, 2), grid_at(4, 2, 1),
                      grid_at(4, 1, 1)});
  const auto level2 = miss.level_cycles(2);
  const bool b = level2.size() == 1 && level2[0] == domino && miss.level_cycles(3).empty();
  detail << "domino_level2=" << level2.size() << " ";

  // (c), (d)
  std::size_t level_failures = 0, completeness = 0, inside = 0, audited = 0;
  for (std::uint64_t t = 0; t < kGensetTrials; ++t) {
    RngStream rng(10, t);
    const EdgeVector omega = bernoulli_sample(g6, 0.9, rng);
    const auto res = build_cprime(g6, omega, fam6, opt);
    level_failures += verify_levels(res, omega, fam6).size();
    completeness += spanning_report(g6, omega, res, res.max_len, 1).completeness_violations;
    const auto audit = audit_decompositions(res, omega, fam6);
    inside += audit.generators_inside_omega;
    audited += audit.cycles;
  }
  const bool c = level_failures == 0 && completeness == 0;
  const bool d = inside == 0 && audited > 0;
  detail << "level_failures=" << level_failures << " completeness_violations=" << completeness
         << " audited_cycles=" << audited << " generators_inside_omega=" << inside << " ";

  // (e)
  const Graph g10 = build_grid_patch(10, 10);
  std::size_t closure_violations = 0;
  for (std::uint64_t t = 0; t < kGensetTrials; ++t) {
    RngStream rng(11, t);
    const auto labels = uniform_labels(g10.edge_count(), rng);
    const double ps[] = {0.8, 0.9, 0.95};
    for (int k : {1, 2, 4}) {
      for (int i = 0; i + 1 < 3; ++i) {
        const auto lo = k_closure(g10, threshold_labels(labels, ps[i]), k);
        const auto hi = k_closure(g10, threshold_labels(labels, ps[i + 1]), k);
        if (!hi.edges.is_subset_of(lo.edges) || hi.largest_component > lo.largest_component) ++closure_violations;
      }
    }
  }
  const bool e = closure_violations == 0;
  detail << "closure_violations=" << closure_violations;
  return {a && b && c && d && e, detail.str()};
}

Outcome end_to_end() {
  const double p = 0.9;
  const double x = p / (2 - p);
  const Graph k4 = build_complete(4);
  const auto fam = relator_cycles(k4, 3);
  LoopViaFkOptions opt;
  opt.method = UesMethod::coinflip;
  opt.fk = FkSampling::exact;
  opt.generators = [&](const GraphView& gv) {
    const auto res = build_cprime(k4, gv.open_edges(), fam);
    std::vector<EdgeVector> gens;
    for (const auto& level : res.levels)
      for (std::size_t i : level) gens.push_back(res.candidates[i].vector);
    return gens;
  };
  const LoopViaFkSampler sampler(k4, x, opt);
  RngStream rng(12, 0);
  EmpiricalHistogram hist(k4.edge_count());
  for (std::size_t i = 0; i < kPipelineSamples; ++i) hist.add(sampler.sample(rng));
  const double tv = tv_distance(loop_o1_exact(k4, x), hist);
  return {tv < kPipelineTv && std::abs(sampler.fk_parameter() - p) < 1e-12,
          "tv=" + fmt(tv) + " samples=" + std::to_string(kPipelineSamples)};
}

Outcome cli_determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"verify-identity", "--graph", "k4", "--p", "0.3,0.6,0.9"},
      {"dl-experiment", "--n", "3", "--p", "0.85", "--trials", "500", "--seed", "13"},
      {"dl-experiment", "--n", "2", "--p", "0.9", "--model", "fk-glauber", "--trials", "50", "--seed", "13"},
      {"gensets", "--graph", "grid:6x6", "--k", "4", "--p", "0.9", "--trials", "10", "--seed", "13"},
      {"domination", "--graph", "k4", "--p", "0.5", "--heuristic"},
      {"enumerate-geodesics", "--graph", "dl:n=2,margin=1", "--vertex", "o", "--max-len", "8"},
      {"enumerate-geodesics", "--graph", "grid:6x6", "--vertex", "center", "--notion", "omega", "--p", "0.8",
       "--seed", "13"},
      {"sample", "--model", "fk-glauber", "--graph", "theta", "--p", "0.6", "--trials", "2000", "--seed", "13"},
      {"sample", "--model", "loop", "--graph", "k4", "--p", "0.6", "--trials", "2000", "--seed", "13"},
      {"distribution", "--model", "ues-of-fk", "--graph", "k4", "--p", "0.5", "--format", "json"},
  };
  std::size_t identical = 0;
  std::string first_bad;
  for (auto args : commands) {
    args.push_back("--no-timestamp");
    std::ostringstream out1, err1, out2, err2;
    const int c1 = cli::run(args, out1, err1);
    const int c2 = cli::run(args, out2, err2);
    if (c1 == c2 && c1 != cli::kUsageError && out1.str() == out2.str() && !out1.str().empty())
      ++identical;
    else if (first_bad.empty())
      first_bad = args[0];
  }
  return {identical == commands.size(), "identical=" + std::to_string(identical) + "/" +
                                            std::to_string(commands.size()) +
                                            (first_bad.empty() ? "" : " first_mismatch=" + first_bad)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"loop-fk identity on small graphs", identity},
      {"triangle full/empty ratio", triangle_ratio},
      {"uniform even subgraphs on k4", ues_uniformity},
      {"stochastic domination", domination},
      {"glauber chain validity", glauber},
      {"binary tree survival", tree_survival_check},
      {"dl experiment", dl_experiment},
      {"dl experiment under fk", dl_fk_variant},
      {"geodesic predicates", geodesic_predicates},
      {"feasible generating sets", feasible_gensets},
      {"end-to-end loop sampler on k4", end_to_end},
      {"cli determinism", cli_determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << index << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << "  " << o.detail
              << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (12 - failed) << "/12" << std::endl;
  return failed ? 1 : 0;
}
