#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "evenspace/dl_box.hpp"
#include "evenspace/dl_experiment.hpp"
#include "evenspace/errors.hpp"
#include "evenspace/random_models.hpp"

using namespace evenspace;

namespace {

// s_0 = 1, s_j = 1 - (1 - p s_{j-1})^2, written out again for the checks below.
double survival(double p, int depth) {
  double s = 1;
  for (int j = 0; j < depth; ++j) s = 1 - (1 - p * s) * (1 - p * s);
  return s;
}

bool is_tree(const Graph& g, const EdgeVector& edges) {
  std::set<VertexId> vs;
  for (EdgeId e : edges.ones()) {
    vs.insert(g.edge(e).u);
    vs.insert(g.edge(e).v);
  }
  if (vs.size() != edges.count() + 1) return false;
  const auto comps = connected_components(GraphView(g, edges));
  const auto root = comps.label[*vs.begin()];
  return std::all_of(vs.begin(), vs.end(), [&](VertexId v) { return comps.label[v] == root; });
}

DlExperimentConfig config(int n, double p, std::size_t trials, std::uint64_t seed) {
  DlExperimentConfig c;
  c.n = n;
  c.p = p;
  c.trials = trials;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("model and rule names") {
  CHECK(parse_percolation_model("bernoulli") == PercolationModel::bernoulli);
  CHECK(parse_percolation_model("fk") == PercolationModel::fk_glauber);
  CHECK(parse_percolation_model("fk-glauber") == PercolationModel::fk_glauber);
  CHECK_THROWS_AS(parse_percolation_model("ising"), std::invalid_argument);
  CHECK(to_string(PercolationModel::fk_glauber) == "fk-glauber");
  CHECK(to_string(ChoiceRule::lexicographic) == "lexicographic");
}

TEST_CASE("subtree T_o") {
  for (int n = 1; n <= 4; ++n) {
    const DLBox box = build_dl_box(n, 1);
    const DlConstruction dc(box);
    CHECK(dc.t_o().count() == (std::size_t{2} << n) - 2);
    CHECK(is_tree(box.graph(), dc.t_o()));
    // every T_o vertex pairs a descendant of o1 with the o2 -> o2_hat path
    for (EdgeId e : dc.t_o().ones()) {
      for (VertexId v : {box.graph().edge(e).u, box.graph().edge(e).v}) {
        CHECK(box.level(v) <= 0);
        CHECK(box.level(v) >= -n);
      }
    }
  }
}

TEST_CASE("subtrees T_l are disjoint trees") {
  for (int n = 1; n <= 4; ++n) {
    const DLBox box = build_dl_box(n, 1);
    const DlConstruction dc(box);
    CHECK(box.l1().size() == std::size_t{1} << (n - 1));
    CHECK(box.l1_prime().size() == std::size_t{1} << (n - 1));
    CHECK(box.l2().size() == std::size_t{1} << (n - 1));
    for (auto side : {box.l1(), box.l1_prime()}) {
      for (VertexId l : side) {
        const EdgeVector t = dc.t_ell(l);
        CHECK(t.count() == (std::size_t{2} << n) - 2);
        CHECK(is_tree(box.graph(), t));
        // they share the path from o down to (l, o2_hat)
        CHECK((t & dc.t_o()).count() == std::size_t(n));
      }
    }
    for (VertexId a : box.l1())
      for (VertexId b : box.l1_prime()) CHECK_FALSE(dc.t_ell(a).intersects(dc.t_ell(b)));
  }
  const DLBox box = build_dl_box(2, 0);
  const DlConstruction dc(box);
  CHECK_THROWS_AS(dc.t_ell(box.origin()), std::invalid_argument);
}

TEST_CASE("all-open and empty configurations") {
  for (int n = 1; n <= 4; ++n) {
    const DLBox box = build_dl_box(n, 1);
    const DlConstruction dc(box);
    const EdgeVector all = box.graph().all_edges();
    const EdgeVector none = box.graph().no_edges();
    CHECK(dc.omega_l(all, false).size() == box.l1().size());
    CHECK(dc.omega_l(all, true).size() == box.l1_prime().size());
    CHECK(dc.omega_l(none, false).empty());
    for (VertexId l : box.l1()) {
      CHECK(dc.x_set(all, l).size() == box.l2().size());
      CHECK(dc.x_set(none, l).empty());
    }
    const TrialOutcome full = dc.analyze(all);
    REQUIRE(full.success());
    CHECK(full.cycle_length == std::size_t(4 * n));
    CHECK(full.cycle->length() == std::size_t(4 * n));
    CHECK_FALSE(dc.analyze(none).success());
    CHECK_FALSE(dc.analyze(none).found_l1);
  }
}

TEST_CASE("n = 1 succeeds exactly when the four box edges are open") {
  const DLBox box = build_dl_box(1, 1);
  const DlConstruction dc(box);
  const TrialOutcome full = dc.analyze(box.graph().all_edges());
  REQUIRE(full.success());
  const EdgeVector square = cycle_edges(*full.cycle, box.graph());
  CHECK(square.count() == 4);
  RngStream rng(51, 0);
  for (int i = 0; i < 2000; ++i) {
    const EdgeVector omega = bernoulli_sample(box.graph(), 0.6, rng);
    CHECK(dc.analyze(omega).success() == square.is_subset_of(omega));
  }
  const DLBox tight = build_dl_box(1, 0);
  CHECK(tight.graph().edge_count() == 4);
  const DlConstruction dt(tight);
  CHECK(dt.analyze(tight.graph().all_edges()).cycle->length() == 4);
}

TEST_CASE("assembled cycles are deterministic and structurally sound") {
  const DLBox box = build_dl_box(2, 1);
  const DlConstruction dc(box);
  const EdgeVector all = box.graph().all_edges();
  const TrialOutcome a = dc.analyze(all), b = dc.analyze(all);
  REQUIRE(a.success());
  CHECK(*a.cycle == *b.cycle);
  CHECK(a.l1 == box.l1().front());
  CHECK(a.l1_prime == box.l1_prime().front());
  CHECK(a.x2 == box.l2().front());
  const TrialOutcome r = dc.analyze(all, ChoiceRule::reverse);
  CHECK(r.l1 == box.l1().back());
  CHECK(r.x2 == box.l2().back());

  const Cycle c = dc.assemble_cycle(all, box.l1().back(), box.l1_prime().front(), box.l2().back());
  CHECK(c.length() == 8);
  const auto vs = c.vertices();
  CHECK(std::find(vs.begin(), vs.end(), box.origin()) != vs.end());

  const EdgeVector none = box.graph().no_edges();
  CHECK_THROWS_AS(dc.assemble_cycle(none, box.l1().front(), box.l1_prime().front(), box.l2().front()),
                  StructuralViolation);
  CHECK_THROWS_AS(dc.assemble_cycle(all, box.l1_prime().front(), box.l1().front(), box.l2().front()),
                  std::invalid_argument);
}

TEST_CASE("random configurations: structure, geodesy and rule independence") {
  for (int n = 2; n <= 4; ++n) {
    const DLBox box = build_dl_box(n, 1);
    const DlConstruction dc(box);
    const DlMarginOracle oracle(box);
    RngStream rng(53, n);
    int successes = 0;
    for (int i = 0; i < 300; ++i) {
      const EdgeVector omega = bernoulli_sample(box.graph(), 0.8, rng);
      const TrialOutcome lex = dc.analyze(omega);
      const TrialOutcome rev = dc.analyze(omega, ChoiceRule::reverse);
      CHECK(lex.success() == rev.success());
      CHECK(lex.found_l1 == rev.found_l1);
      CHECK(lex.x2_found == rev.x2_found);
      CHECK_FALSE(lex.violation);
      if (!lex.success()) continue;
      ++successes;
      CHECK(lex.cycle->length() == std::size_t(4 * n));
      CHECK(cycle_edges(*lex.cycle, box.graph()).is_subset_of(omega));
      CHECK(diagonal_criterion(*lex.cycle, oracle) == Verdict::yes);
      CHECK(is_geodesic_cycle(*lex.cycle, oracle) == Verdict::yes);
      CHECK(is_geodesic_cycle(*rev.cycle, oracle) == Verdict::yes);
    }
    CHECK(successes > 0);
  }
}

TEST_CASE("bounds") {
  for (double p : {0.3, 0.75, 0.9}) CHECK(theoretical_bound(1, p) == doctest::Approx(std::pow(p, 4)));
  const double p = 0.75;
  const double expected = std::pow(p * survival(p, 2), 2) * p * p * survival(p * p, 2);
  CHECK(theoretical_bound(3, p) == doctest::Approx(expected).epsilon(1e-12));
  MESSAGE("bound(n=3, p=0.75) = " << theoretical_bound(3, p));
  CHECK(limiting_bound(1 / std::sqrt(2.0)) == doctest::Approx(0.0));
  CHECK(limiting_bound(0.6) == 0.0);
  const double theta = (2 * 0.9 - 1) / (0.81);
  const double theta2 = (2 * 0.81 - 1) / (0.81 * 0.81);
  CHECK(limiting_bound(0.9) == doctest::Approx(0.81 * theta * theta * theta2));
  // Finite-depth bounds decrease to p^4 theta(p)^2 theta(p^2): both the
  // step into L2 and the steps into L1, L1' carry a factor of p or p^2.
  const double own_limit = 0.81 * 0.81 * theta * theta * theta2;
  double prev = 1;
  for (int n = 1; n <= 200; ++n) {
    const double b = theoretical_bound(n, 0.9);
    CHECK(b <= prev + 1e-15);
    CHECK(b >= own_limit - 1e-12);
    prev = b;
  }
  CHECK(prev == doctest::Approx(own_limit).epsilon(1e-9));
  CHECK(prev < limiting_bound(0.9));
}

TEST_CASE("wilson interval") {
  const auto w = wilson_interval(50, 100);
  CHECK(w.low == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(w.high == doctest::Approx(0.5962).epsilon(1e-3));
  const auto z = wilson_interval(0, 10);
  CHECK(z.low == doctest::Approx(0.0));
  CHECK(z.high == doctest::Approx(1.96 * 1.96 / (10 + 1.96 * 1.96)));
}

TEST_CASE("event frequencies against tree recursions") {
  const int trials = 10000;
  {
    const DLBox box = build_dl_box(4, 0);
    const DlConstruction dc(box);
    const double p = 0.8;
    int hits = 0;
    for (int i = 0; i < trials; ++i) {
      RngStream rng(57, i);
      hits += !dc.omega_l(bernoulli_sample(box.graph(), p, rng), false).empty();
    }
    const double target = p * survival(p, 3);
    const double sigma = std::sqrt(target * (1 - target) / trials);
    MESSAGE("omega(L1) nonempty: " << hits / double(trials) << " vs " << target);
    CHECK(std::abs(hits / double(trials) - target) < 3 * sigma);
  }
  {
    const DLBox box = build_dl_box(3, 0);
    const DlConstruction dc(box);
    const double p = 0.8;
    int hits = 0;
    for (int i = 0; i < trials; ++i) {
      RngStream rng(59, i);
      const EdgeVector omega = bernoulli_sample(box.graph(), p, rng);
      const auto x = dc.x_set(omega, box.l1().front());
      const auto xp = dc.x_set(omega, box.l1_prime().front());
      hits += std::any_of(x.begin(), x.end(), [&](VertexId v) { return std::find(xp.begin(), xp.end(), v) != xp.end(); });
    }
    const double target = p * p * survival(p * p, 2);
    const double sigma = std::sqrt(target * (1 - target) / trials);
    MESSAGE("X and X' meet: " << hits / double(trials) << " vs bound " << target);
    CHECK(hits / double(trials) >= target - 3 * sigma);
  }
}

TEST_CASE("run_trials") {
  auto c = config(2, 1.0, 50, 1);
  const auto sure = run_trials(c);
  CHECK(sure.summary.successes == 50);
  CHECK(sure.summary.geodesic_pass == 50);
  CHECK(sure.summary.omega_geodesic_pass == 50);
  CHECK(sure.summary.diagonal_pass == 50);

  for (int n = 1; n <= 3; ++n) {
    const auto r = run_trials(config(n, 0.75, 10000, 61));
    const auto& s = r.summary;
    CHECK(s.trials == 10000);
    CHECK(r.outcomes.size() == 10000);
    CHECK(s.bound == doctest::Approx(theoretical_bound(n, 0.75)));
    CHECK(s.frequency >= s.bound - 3 * s.sigma);
    CHECK(s.geodesic_pass == s.successes);
    CHECK(s.violations == 0);
    CHECK(s.unstable_distances == 0);
    CHECK(s.wilson.low <= s.frequency);
    CHECK(s.wilson.high >= s.frequency);
    MESSAGE("n=" << n << " frequency=" << s.frequency << " bound=" << s.bound);
  }
}

TEST_CASE("run_trials is deterministic and independent of the worker count") {
  auto c = config(3, 0.8, 400, 7);
  c.workers = 1;
  const auto a = run_trials(c);
  c.workers = 3;
  const auto b = run_trials(c);
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    CHECK(a.outcomes[i].success() == b.outcomes[i].success());
    CHECK(a.outcomes[i].cycle == b.outcomes[i].cycle);
    CHECK(a.outcomes[i].stream == i);
  }
  CHECK(a.summary.successes == b.summary.successes);
}

TEST_CASE("coupled trials are monotone in p") {
  const auto lo = run_trials(config(3, 0.7, 1000, 11));
  const auto hi = run_trials(config(3, 0.85, 1000, 11));
  for (std::size_t i = 0; i < lo.outcomes.size(); ++i)
    if (lo.outcomes[i].success()) CHECK(hi.outcomes[i].success());
  CHECK(hi.summary.successes >= lo.summary.successes);
}

TEST_CASE("fk-glauber trials dominate the matching bernoulli trials") {
  auto fk = config(2, 0.9, 1500, 13);
  fk.model = PercolationModel::fk_glauber;
  fk.sweeps = 20;
  const auto f = run_trials(fk);
  CHECK(f.summary.mcmc_approximate);
  const auto b = run_trials(config(2, 0.9 / 1.1, 1500, 13));
  const double sigma = std::sqrt(b.summary.frequency * (1 - b.summary.frequency) / 1500);
  MESSAGE("fk " << f.summary.frequency << " vs bernoulli(p/(2-p)) " << b.summary.frequency);
  CHECK(f.summary.frequency >= b.summary.frequency - 3 * sigma);
  CHECK(f.summary.geodesic_pass == f.summary.successes);
}
