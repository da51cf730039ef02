#include "evenspace/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "evenspace/dl_experiment.hpp"
#include "evenspace/errors.hpp"
#include "evenspace/geodesics.hpp"
#include "evenspace/gensets.hpp"
#include "evenspace/graph_spec.hpp"
#include "evenspace/random_models.hpp"

namespace evenspace::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Report {
  std::vector<std::pair<std::string, Json>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  int exit_code = kOk;

  void note(std::string key, Json value) { summary.emplace_back(std::move(key), std::move(value)); }
};

struct OutputSettings {
  std::string out;
  std::string format = "csv";
  bool no_timestamp = false;
  std::uint64_t seed = 0;
};

std::string cell_text(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Resolved option values of a subcommand, in declaration order.
std::vector<std::pair<std::string, std::string>> resolved_config(const CLI::App& sub) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->get_expected_max() == 0) {
      value = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      value = opt->results().back();  // flags given after the config file win
    } else {
      value = opt->get_default_str();
    }
    out.emplace_back(name, value);
  }
  return out;
}

void write_report(std::ostream& os, const std::string& command, const CLI::App& sub, const OutputSettings& settings,
                  const Report& report) {
  const auto config = resolved_config(sub);
  if (settings.format == "json") {
    Json doc;
    doc["version"] = std::string(kVersion);
    doc["command"] = command;
    if (!settings.no_timestamp) doc["timestamp"] = utc_timestamp();
    Json cfg = Json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    doc["config"] = cfg;
    doc["seed"] = settings.seed;
    Json summary = Json::object();
    for (const auto& [k, v] : report.summary) summary[k] = v;
    doc["summary"] = summary;
    doc["columns"] = report.columns;
    Json rows = Json::array();
    for (const auto& row : report.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[report.columns[i]] = row[i];
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    os << doc.dump(2) << '\n';
    return;
  }
  os << "# evenspace " << kVersion << '\n';
  os << "# command: " << command << '\n';
  if (!settings.no_timestamp) os << "# timestamp: " << utc_timestamp() << '\n';
  for (const auto& [k, v] : config) os << "# config." << k << " = " << v << '\n';
  os << "# seed: " << settings.seed << '\n';
  for (const auto& [k, v] : report.summary) os << "# summary." << k << " = " << cell_text(v) << '\n';
  for (std::size_t i = 0; i < report.columns.size(); ++i) os << (i ? "," : "") << report.columns[i];
  os << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(row[i]));
    os << '\n';
  }
}

std::filesystem::path resolve_out(const std::string& out) {
  std::filesystem::path path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) path = std::filesystem::path(dir) / path;
  }
  return path;
}

std::string hex_subset(std::size_t m, std::uint64_t s) { return EdgeVector::from_mask(m, s).to_hex(); }

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty parameter list");
  return out;
}

template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;
  auto work = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    } catch (...) {
      std::lock_guard lock(mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// --- commands ------------------------------------------------------------

struct IdentityArgs {
  std::string graph = "triangle";
  std::string p = "0.3,0.6,0.9";
  double tolerance = 1e-10;
  std::size_t edge_cap = kDefaultEdgeCap;
};

Report verify_identity(const IdentityArgs& a) {
  const HostGraph host = build_from_spec(a.graph);
  const Graph& g = host.graph();
  Report r;
  r.columns = {"p", "x", "tv", "pass"};
  double worst = 0;
  for (double p : parse_list(a.p)) {
    const double x = p / (2.0 - p);
    const SubsetDistribution pushed = ues_pushforward(fk_exact(g, p, a.edge_cap), g);
    const double tv = tv_distance(pushed, loop_o1_exact(g, x, a.edge_cap));
    worst = std::max(worst, tv);
    const bool pass = tv <= a.tolerance;
    if (!pass) r.exit_code = kAssertionFailed;
    r.rows.push_back({p, x, tv, pass});
  }
  r.note("graph", host.spec);
  r.note("edges", g.edge_count());
  r.note("max_tv", worst);
  r.note("pass", r.exit_code == kOk);
  return r;
}

struct DlArgs {
  int n = 3;
  double p = 0.8;
  std::string model = "bernoulli";
  std::size_t trials = 1000;
  int margin = 1;
  int max_margin = -1;
  int sweeps = 50;
  unsigned workers = 0;
  std::string rule = "lexicographic";
  bool no_verify = false;
};

Report dl_experiment(const DlArgs& a, std::uint64_t seed) {
  DlExperimentConfig cfg;
  cfg.n = a.n;
  cfg.p = a.p;
  cfg.model = parse_percolation_model(a.model);
  cfg.trials = a.trials;
  cfg.margin = a.margin;
  if (a.max_margin >= 0) cfg.max_margin = a.max_margin;
  cfg.seed = seed;
  cfg.sweeps = a.sweeps;
  cfg.workers = a.workers;
  if (a.rule == "reverse") {
    cfg.rule = ChoiceRule::reverse;
  } else if (a.rule != "lexicographic") {
    throw std::invalid_argument("unknown rule '" + a.rule + "'");
  }
  cfg.verify_geodesics = !a.no_verify;
  const DlExperimentResult res = run_trials(cfg);

  Report r;
  r.columns = {"trial", "n", "p", "model", "found_l1", "found_l1p", "x2_found", "cycle_found", "cycle_len",
               "geodesic_ambient", "geodesic_omega", "seed", "stream", "diagonal", "cycle"};
  for (const TrialOutcome& o : res.outcomes) {
    r.rows.push_back({o.trial, o.n, o.p, std::string(to_string(o.model)), o.found_l1, o.found_l1_prime, o.x2_found,
                      o.success(), o.cycle_length, std::string(o.success() ? to_string(o.geodesic_ambient) : "na"),
                      std::string(o.success() ? to_string(o.geodesic_omega) : "na"), o.seed, o.stream,
                      std::string(o.success() ? to_string(o.diagonal) : "na"),
                      o.cycle ? o.cycle->to_string() : std::string()});
  }
  const DlExperimentSummary& s = res.summary;
  r.note("sampling", s.mcmc_approximate ? "MCMC-approximate" : "exact");
  r.note("choice_rule", std::string(to_string(cfg.rule)));
  r.note("trials", s.trials);
  r.note("successes", s.successes);
  r.note("frequency", s.frequency);
  r.note("wilson_low", s.wilson.low);
  r.note("wilson_high", s.wilson.high);
  r.note("theoretical_bound", s.bound);
  r.note("limiting_bound", s.limiting_bound);
  r.note("sigma", s.sigma);
  r.note("geodesic_pass", s.geodesic_pass);
  r.note("geodesic_fail", s.geodesic_fail);
  r.note("geodesic_indeterminate", s.geodesic_indeterminate);
  r.note("omega_geodesic_pass", s.omega_geodesic_pass);
  r.note("diagonal_pass", s.diagonal_pass);
  r.note("unstable_distances", s.unstable_distances);
  r.note("structural_violations", s.violations);
  if (s.violations > 0) r.exit_code = kAssertionFailed;
  return r;
}

struct GensetsArgs {
  std::string graph = "grid:8x8";
  int k = 4;
  double p = 0.9;
  int nmax = 3;
  std::size_t trials = 100;
  int lcheck = 0;
  int interior_margin = -1;
  int closure_k = -1;
  std::string distance = "midpoint";
  bool running_basis = false;
  unsigned workers = 0;
};

Report gensets(const GensetsArgs& a, std::uint64_t seed) {
  const HostGraph host = build_from_spec(a.graph);
  const Graph& g = host.graph();
  const GeneratorFamily fam = relator_cycles(g, a.k);
  EdgeDistance convention = EdgeDistance::midpoint;
  if (a.distance == "endpoint") {
    convention = EdgeDistance::endpoint;
  } else if (a.distance != "midpoint") {
    throw std::invalid_argument("unknown distance convention '" + a.distance + "'");
  }
  if (a.nmax < 1) throw std::invalid_argument("nmax must be at least 1");
  const std::size_t l_check =
      a.lcheck > 0 ? static_cast<std::size_t>(a.lcheck) : static_cast<std::size_t>(a.k) * static_cast<std::size_t>(a.nmax);
  const int interior_margin = a.interior_margin >= 0 ? a.interior_margin : 1;
  const int closure_k = a.closure_k >= 0 ? a.closure_k : a.k;

  struct Row {
    std::size_t rank, dim, cprime, max_mult, closure_largest, violations, level_problems, inside;
    double interior;
  };
  std::vector<Row> rows(a.trials);
  CPrimeOptions options;
  options.n_max = a.nmax;
  options.running_basis = a.running_basis;
  parallel_for(a.trials, a.workers, [&](std::size_t i) {
    RngStream rng(seed, i);
    const EdgeVector omega = bernoulli_sample(g, a.p, rng);
    const CPrimeResult res = build_cprime(g, omega, fam, options);
    const SpanningReport rep = spanning_report(g, omega, res, l_check, interior_margin);
    const KClosure closure = k_closure(g, omega, closure_k, convention);
    rows[i] = {rep.rank,
               rep.dim,
               res.cycle_count(),
               multiplicity_profile(res, g.edge_count()).max,
               closure.largest_component,
               rep.completeness_violations,
               verify_levels(res, omega, fam).size(),
               audit_decompositions(res, omega, fam).generators_inside_omega,
               rep.interior_fraction()};
  });

  Report r;
  r.columns = {"trial", "rank", "dim", "max_multiplicity", "closure_largest_component",
               "interior_completeness_fraction", "cprime_size", "completeness_violations"};
  std::size_t violations = 0;
  std::size_t level_problems = 0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    violations += row.violations;
    level_problems += row.level_problems;
    inside += row.inside;
    r.rows.push_back({i, row.rank, row.dim, row.max_mult, row.closure_largest, row.interior, row.cprime,
                      row.violations});
  }
  r.note("graph", host.spec);
  r.note("generators", fam.size());
  r.note("max_candidate_length", static_cast<std::size_t>(a.k) * static_cast<std::size_t>(a.nmax));
  r.note("l_check", l_check);
  r.note("interior_margin", interior_margin);
  r.note("closure_k", closure_k);
  r.note("distance_convention", std::string(to_string(convention)));
  r.note("completeness_violations", violations);
  r.note("level_soundness_failures", level_problems);
  r.note("decomposition_generators_inside_omega", inside);
  if (violations > 0 || level_problems > 0 || inside > 0) r.exit_code = kAssertionFailed;
  return r;
}

struct DominationArgs {
  std::string graph = "triangle";
  double p = 0.6;
  double ptilde = -1;
  double tolerance = 1e-12;
  bool heuristic = false;
  std::size_t edge_cap = kDefaultEdgeCap;
};

Report domination(const DominationArgs& a) {
  const HostGraph host = build_from_spec(a.graph);
  const Graph& g = host.graph();
  const double ptilde = a.ptilde >= 0 ? a.ptilde : a.p / (2.0 - a.p);
  DominationOptions options;
  options.tolerance = a.tolerance;
  options.allow_heuristic = a.heuristic;
  const DominationResult res = check_domination(fk_exact(g, a.p, a.edge_cap), bernoulli_exact(g, ptilde, a.edge_cap), options);
  std::string worst;
  for (std::uint64_t s : res.worst_event_generators) worst += (worst.empty() ? "" : " ") + hex_subset(g.edge_count(), s);

  Report r;
  r.columns = {"graph", "p", "ptilde", "dominates", "exhaustive", "events_checked", "worst_margin", "worst_event"};
  r.rows.push_back({host.spec, a.p, ptilde, res.dominates, res.exhaustive, res.events_checked,
                    static_cast<double>(res.worst_margin), worst});
  r.note("dominates", res.dominates);
  r.note("mode", res.exhaustive ? "exhaustive" : "heuristic (non-exhaustive)");
  if (!res.dominates) r.exit_code = kAssertionFailed;
  return r;
}

struct GeodesicArgs {
  std::string graph = "grid:3x3";
  std::string vertex = "0";
  std::size_t max_len = 4;
  std::string notion = "ambient";
  double p = 1.0;
  int max_margin = -1;
};

Report enumerate_geodesics(const GeodesicArgs& a, std::uint64_t seed) {
  const HostGraph host = build_from_spec(a.graph);
  const Graph& g = host.graph();
  const VertexId v = host.resolve_vertex(a.vertex);
  RngStream rng(seed, 0);
  const EdgeVector omega = a.p >= 1.0 ? g.all_edges() : bernoulli_sample(g, a.p, rng);
  const GraphView view(g, omega);

  std::unique_ptr<DistanceOracle> oracle;
  if (a.notion == "omega") {
    oracle = std::make_unique<BfsOracle>(view);
  } else if (a.notion == "ambient") {
    if (host.is_dl()) {
      oracle = std::make_unique<DlMarginOracle>(*host.box, a.max_margin >= 0 ? std::optional<int>(a.max_margin)
                                                                             : std::nullopt);
    } else {
      oracle = std::make_unique<BfsOracle>(GraphView(g));
    }
  } else {
    throw std::invalid_argument("unknown notion '" + a.notion + "'");
  }
  const GeodesicEnumeration found = enumerate_geodesic_cycles_through(view, v, a.max_len, *oracle);

  Report r;
  r.columns = {"cycle", "length", "verdict"};
  for (const Cycle& c : found.geodesic) r.rows.push_back({c.to_string(), c.length(), "true"});
  for (const Cycle& c : found.indeterminate) r.rows.push_back({c.to_string(), c.length(), "indeterminate"});
  r.note("graph", host.spec);
  r.note("vertex", v);
  r.note("geodesic", found.geodesic.size());
  r.note("indeterminate", found.indeterminate.size());
  r.note("oracle", host.is_dl() && a.notion == "ambient" ? "margin-stabilized" : "exact-bfs");
  return r;
}

struct SampleArgs {
  std::string model = "bernoulli";
  std::string graph = "triangle";
  double p = 0.5;
  double x = -1;
  std::size_t trials = 10000;
  int sweeps = 50;
  std::string method = "spanning-tree";
  std::size_t edge_cap = kDefaultEdgeCap;
};

Report sample(const SampleArgs& a, std::uint64_t seed) {
  const HostGraph host = build_from_spec(a.graph);
  const Graph& g = host.graph();
  const std::size_t m = g.edge_count();
  const double x = a.x >= 0 ? a.x : a.p / (2.0 - a.p);
  const bool small = m <= a.edge_cap;

  std::function<EdgeVector(RngStream&)> draw;
  std::optional<SubsetDistribution> exact;
  std::optional<LoopViaFkSampler> loop;
  if (a.model == "bernoulli") {
    draw = [&](RngStream& rng) { return bernoulli_sample(g, a.p, rng); };
    if (small) exact.emplace(bernoulli_exact(g, a.p, a.edge_cap));
  } else if (a.model == "fk") {
    exact.emplace(fk_exact(g, a.p, a.edge_cap));
    draw = [&](RngStream& rng) { return EdgeVector::from_mask(m, exact->sample(rng)); };
  } else if (a.model == "fk-glauber") {
    draw = [&](RngStream& rng) { return fk_glauber(g, a.p, a.sweeps, rng); };
    if (small) exact.emplace(fk_exact(g, a.p, a.edge_cap));
  } else if (a.model == "loop" || a.model == "loop-glauber") {
    LoopViaFkOptions options;
    options.fk = a.model == "loop" ? FkSampling::exact : FkSampling::glauber;
    options.sweeps = a.sweeps;
    options.edge_cap = a.edge_cap;
    if (a.method == "coinflip") {
      options.method = UesMethod::coinflip;
      options.generators = [](const GraphView& gv) {
        std::vector<EdgeVector> gens;
        for (const Cycle& c : enumerate_cycles(gv, std::max<std::size_t>(3, gv.vertex_count())))
          gens.push_back(cycle_edges(c, gv.graph()));
        return gens;
      };
    } else if (a.method != "spanning-tree") {
      throw std::invalid_argument("unknown method '" + a.method + "'");
    }
    loop.emplace(g, x, options);
    draw = [&](RngStream& rng) { return loop->sample(rng); };
    if (small) exact.emplace(loop_o1_exact(g, x, a.edge_cap));
  } else if (a.model == "ues") {
    draw = [&](RngStream& rng) { return ues_spanning_tree(GraphView(g), rng); };
    if (small) exact.emplace(loop_o1_exact(g, 1.0, a.edge_cap));
  } else {
    throw std::invalid_argument("unknown model '" + a.model + "'");
  }

  Report r;
  r.note("graph", host.spec);
  r.note("model", a.model);
  if (a.model.rfind("loop", 0) == 0) r.note("x", x);
  if (a.model.find("glauber") != std::string::npos) r.note("sampling", "MCMC-approximate");
  if (!small) {
    r.columns = {"trial", "subset"};
    for (std::size_t i = 0; i < a.trials; ++i) {
      RngStream rng(seed, i);
      r.rows.push_back({i, draw(rng).to_hex()});
    }
    return r;
  }
  EmpiricalHistogram hist(m);
  for (std::size_t i = 0; i < a.trials; ++i) {
    RngStream rng(seed, i);
    hist.add(draw(rng));
  }
  r.columns = {"subset", "count", "frequency", "exact_probability"};
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << m); ++s) {
    const double exact_p = exact ? static_cast<double>(exact->probability(s)) : 0.0;
    if (hist.count(s) == 0 && exact_p == 0.0) continue;
    r.rows.push_back({hex_subset(m, s), hist.count(s), hist.frequency(s), exact_p});
  }
  if (exact) r.note("tv_to_exact", tv_distance(*exact, hist));
  return r;
}

struct DistributionArgs {
  std::string model = "fk";
  std::string graph = "triangle";
  double p = 0.5;
  double x = -1;
  std::size_t edge_cap = kDefaultEdgeCap;
};

Report distribution(const DistributionArgs& a) {
  const HostGraph host = build_from_spec(a.graph);
  const Graph& g = host.graph();
  const double x = a.x >= 0 ? a.x : a.p / (2.0 - a.p);
  std::optional<SubsetDistribution> d;
  if (a.model == "fk") {
    d.emplace(fk_exact(g, a.p, a.edge_cap));
  } else if (a.model == "bernoulli") {
    d.emplace(bernoulli_exact(g, a.p, a.edge_cap));
  } else if (a.model == "loop") {
    d.emplace(loop_o1_exact(g, x, a.edge_cap));
  } else if (a.model == "ues-of-fk") {
    d.emplace(ues_pushforward(fk_exact(g, a.p, a.edge_cap), g));
  } else {
    throw std::invalid_argument("unknown model '" + a.model + "'");
  }
  Report r;
  r.columns = {"subset", "weight", "probability"};
  const std::size_t m = g.edge_count();
  for (std::uint64_t s = 0; s < d->support_size(); ++s) {
    r.rows.push_back({hex_subset(m, s), static_cast<double>(d->weight(s)), static_cast<double>(d->probability(s))});
  }
  r.note("graph", host.spec);
  r.note("normalizer", static_cast<double>(d->normalizer()));
  return r;
}

// --- argument handling ---------------------------------------------------

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Pulls "--config FILE" out of args and splices the file's key = value pairs
// in right after the subcommand name, so later command-line flags win.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (path.empty()) return args;
  const auto cmd = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
  if (cmd == args.end()) throw CLI::ValidationError("--config", "a subcommand is required");
  const CLI::App* sub = app.get_subcommand_no_throw(*cmd);
  if (!sub) throw CLI::ValidationError("--config", "unknown subcommand '" + *cmd + "'");

  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--config", path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    key.erase(0, key.find_first_not_of('-'));
    std::replace(key.begin(), key.end(), '_', '-');
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw CLI::ValidationError("--config", path + ": unknown key '" + key + "'");
    if (opt->get_expected_max() == 0) {
      if (value == "true" || value == "1" || value == "yes" || value == "on") extra.push_back("--" + key);
    } else {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  args.insert(cmd + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Even subgraphs, FK-Ising and geodesic cycles: exact oracles and experiments", "evenspace"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  OutputSettings settings;
  std::string config_path;
  auto add_output = [&](CLI::App* sub, bool seeded) {
    sub->add_option("--out", settings.out, "Output file (default: standard output)");
    sub->add_option("--format", settings.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--no-timestamp", settings.no_timestamp, "Omit the timestamp header line");
    sub->add_option("--config", config_path, "File of key = value lines; flags override it");
    if (seeded) sub->add_option("--seed", settings.seed, "Random seed");
  };

  IdentityArgs identity;
  auto* c_identity = app.add_subcommand("verify-identity", "Exact FK to Loop O(1) identity check");
  c_identity->add_option("--graph", identity.graph, "Graph spec");
  c_identity->add_option("--p", identity.p, "Comma-separated FK parameters");
  c_identity->add_option("--tolerance", identity.tolerance, "Total-variation tolerance");
  c_identity->add_option("--edge-cap", identity.edge_cap, "Largest edge count for exact enumeration");
  add_output(c_identity, false);

  DlArgs dl;
  auto* c_dl = app.add_subcommand("dl-experiment", "Geodesic 4n-cycle construction on DL(2,2) boxes");
  c_dl->add_option("--n", dl.n, "Depth parameter")->check(CLI::PositiveNumber);
  c_dl->add_option("--p", dl.p, "Edge parameter")->check(CLI::Range(0.0, 1.0));
  c_dl->add_option("--model", dl.model, "bernoulli or fk-glauber");
  c_dl->add_option("--trials", dl.trials, "Number of trials");
  c_dl->add_option("--margin", dl.margin, "Box margin")->check(CLI::NonNegativeNumber);
  c_dl->add_option("--max-margin", dl.max_margin, "Highest margin for distance checks (default margin + 1)");
  c_dl->add_option("--sweeps", dl.sweeps, "Glauber sweeps per trial")->check(CLI::PositiveNumber);
  c_dl->add_option("--workers", dl.workers, "Worker threads (0: all cores)");
  c_dl->add_option("--rule", dl.rule, "Witness choice: lexicographic or reverse");
  c_dl->add_flag("--no-verify", dl.no_verify, "Skip geodesic verification");
  add_output(c_dl, true);

  GensetsArgs gs;
  auto* c_gs = app.add_subcommand("gensets", "Span-filtered generating sets on percolation configurations");
  c_gs->add_option("--graph", gs.graph, "Graph spec");
  c_gs->add_option("--k", gs.k, "Relator length bound")->check(CLI::Range(3, 64));
  c_gs->add_option("--p", gs.p, "Bernoulli parameter")->check(CLI::Range(0.0, 1.0));
  c_gs->add_option("--nmax", gs.nmax, "Largest decomposition size")->check(CLI::PositiveNumber);
  c_gs->add_option("--trials", gs.trials, "Number of configurations");
  c_gs->add_option("--lcheck", gs.lcheck, "Longest cycle in the spanning check (0: k * nmax)");
  c_gs->add_option("--interior-margin", gs.interior_margin, "Interior cycles stay farther than this from the boundary (-1: 1)");
  c_gs->add_option("--closure-k", gs.closure_k, "k-closure radius (-1: k)");
  c_gs->add_option("--distance", gs.distance, "Edge distance: midpoint or endpoint");
  c_gs->add_flag("--running-basis", gs.running_basis, "Filter each level against everything accepted so far");
  c_gs->add_option("--workers", gs.workers, "Worker threads (0: all cores)");
  add_output(c_gs, true);

  DominationArgs dom;
  auto* c_dom = app.add_subcommand("domination", "Exhaustive check that FK(p) dominates Bernoulli(ptilde)");
  c_dom->add_option("--graph", dom.graph, "Graph spec");
  c_dom->add_option("--p", dom.p, "FK parameter")->check(CLI::Range(0.0, 1.0));
  c_dom->add_option("--ptilde", dom.ptilde, "Bernoulli parameter (default p / (2 - p))");
  c_dom->add_option("--tolerance", dom.tolerance, "Allowed negative margin");
  c_dom->add_flag("--heuristic", dom.heuristic, "Allow the non-exhaustive check above 5 edges");
  c_dom->add_option("--edge-cap", dom.edge_cap, "Largest edge count for exact enumeration");
  add_output(c_dom, false);

  GeodesicArgs geo;
  auto* c_geo = app.add_subcommand("enumerate-geodesics", "Geodesic cycles through a vertex");
  c_geo->add_option("--graph", geo.graph, "Graph spec");
  c_geo->add_option("--vertex", geo.vertex, "Vertex id, 'center' or 'o'");
  c_geo->add_option("--max-len", geo.max_len, "Longest cycle")->check(CLI::Range(3, 64));
  c_geo->add_option("--notion", geo.notion, "ambient or omega");
  c_geo->add_option("--p", geo.p, "Bernoulli parameter for omega (1: all edges)")->check(CLI::Range(0.0, 1.0));
  c_geo->add_option("--max-margin", geo.max_margin, "Highest margin for DL distance checks");
  add_output(c_geo, true);

  SampleArgs smp;
  auto* c_smp = app.add_subcommand("sample", "Draw configurations and tabulate them");
  c_smp->add_option("--model", smp.model, "bernoulli, fk, fk-glauber, loop, loop-glauber or ues");
  c_smp->add_option("--graph", smp.graph, "Graph spec");
  c_smp->add_option("--p", smp.p, "Edge parameter")->check(CLI::Range(0.0, 1.0));
  c_smp->add_option("--x", smp.x, "Loop parameter (default p / (2 - p))");
  c_smp->add_option("--trials", smp.trials, "Number of samples");
  c_smp->add_option("--sweeps", smp.sweeps, "Glauber sweeps per sample")->check(CLI::PositiveNumber);
  c_smp->add_option("--method", smp.method, "Even-subgraph sampler: spanning-tree or coinflip");
  c_smp->add_option("--edge-cap", smp.edge_cap, "Largest edge count for histograms");
  add_output(c_smp, true);

  DistributionArgs dist;
  auto* c_dist = app.add_subcommand("distribution", "Exact law over all edge subsets");
  c_dist->add_option("--model", dist.model, "fk, bernoulli, loop or ues-of-fk");
  c_dist->add_option("--graph", dist.graph, "Graph spec");
  c_dist->add_option("--p", dist.p, "Edge parameter")->check(CLI::Range(0.0, 1.0));
  c_dist->add_option("--x", dist.x, "Loop parameter (default p / (2 - p))");
  c_dist->add_option("--edge-cap", dist.edge_cap, "Largest edge count for exact enumeration");
  add_output(c_dist, false);

  try {
    std::vector<std::string> expanded = expand_config(app, args);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  Report report;
  try {
    if (sub == c_identity) report = verify_identity(identity);
    if (sub == c_dl) report = dl_experiment(dl, settings.seed);
    if (sub == c_gs) report = gensets(gs, settings.seed);
    if (sub == c_dom) report = domination(dom);
    if (sub == c_geo) report = enumerate_geodesics(geo, settings.seed);
    if (sub == c_smp) report = sample(smp, settings.seed);
    if (sub == c_dist) report = distribution(dist);
  } catch (const BudgetExceeded& e) {
    err << "evenspace " << command << ": budget exceeded: " << e.what() << '\n';
    return kUsageError;
  } catch (const StructuralViolation& e) {
    err << "evenspace " << command << ": structural violation: " << e.what() << '\n';
    return kAssertionFailed;
  } catch (const std::exception& e) {
    err << "evenspace " << command << ": " << e.what() << '\n';
    return kUsageError;
  }

  if (settings.out.empty()) {
    write_report(out, command, *sub, settings, report);
  } else {
    const auto path = resolve_out(settings.out);
    std::ofstream file(path, std::ios::binary);
    if (!file) {
      err << "evenspace " << command << ": cannot open " << path.string() << '\n';
      return kUsageError;
    }
    write_report(file, command, *sub, settings, report);
  }
  if (report.exit_code != kOk) err << "evenspace " << command << ": assertion failed\n";
  return report.exit_code;
}

}  // namespace evenspace::cli
