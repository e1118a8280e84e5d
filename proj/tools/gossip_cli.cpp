// Command-line front end: analytical ages, equilibrium search, analytics vs
// simulation comparison, parameter sweeps, and raw simulation runs.
//
// Output is CSV on stdout (comment lines carry the run spec for provenance);
// --csv and --json write the same content to files. Exit codes: 0 success,
// 2 invalid parameters or usage, 3 comparison failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gossip/equilibrium.hpp"
#include "gossip/fc.hpp"
#include "gossip/line.hpp"
#include "gossip/params.hpp"
#include "gossip/sim.hpp"

using nlohmann::json;
using namespace gossip;

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json json_number(double v) {
  // Non-finite values have no JSON literal; emit null explicitly.
  if (std::isfinite(v)) return v;
  return nullptr;
}

struct SimArgs {
  std::uint64_t slots = 200'000;
  std::uint64_t iterations = 4;
  std::int64_t burn_in = -1;  // negative: derive from the parameters
  std::uint64_t seed = 1;
  int threads = 4;
  std::string mode = "time-average";
};

struct Shared {
  double pe = 0, p = 0, beta = 0, L = 0;
  int m = 0, n = 0, cells = 1;
  double cost_a = 80.0, cost_q = 2.0;
  std::string eq_mode = "server-preferred";
  SimArgs sim;
  bool simulate = false;
  bool stability = false;
  bool paper_scale = false;
  double self_test_bias = 0.0;
  std::string over, range, graph_file;
  std::string csv_path, json_path, config_path;
  int exit_code = 0;
};

SimConfig make_sim_config(const Shared& s, const GameParams& params) {
  SimConfig config;
  config.slots = s.sim.slots;
  config.iterations = s.sim.iterations;
  config.seed = s.sim.seed;
  config.threads = s.sim.threads;
  config.mode = s.sim.mode == "ensemble" ? SimMode::EnsembleAtT
                                         : SimMode::TimeAverage;
  config.burn_in = s.sim.burn_in >= 0
                       ? static_cast<std::uint64_t>(s.sim.burn_in)
                       : default_burn_in(params);
  if (s.paper_scale) {
    // Full-scale replication protocol: ensemble statistics at the published
    // horizon and iteration count. Slow; intended for one-off verification.
    config.mode = SimMode::EnsembleAtT;
    config.slots = 10'000;
    config.iterations = 200'000;
  }
  if (config.mode == SimMode::EnsembleAtT) config.burn_in = 0;
  return config;
}

json sim_spec_json(const SimConfig& config) {
  return json{
      {"mode", config.mode == SimMode::EnsembleAtT ? "ensemble"
                                                   : "time-average"},
      {"slots", config.slots},
      {"iterations", config.iterations},
      {"burn_in", config.burn_in},
      {"seed", config.seed},
      {"threads", config.threads},
  };
}

std::string spec_comment(const json& run_spec) {
  return "# run_spec: " + run_spec.dump() + "\n# library_version: " +
         kLibraryVersion + "\n";
}

void emit(const Shared& s, const std::string& csv_text, const json& doc) {
  std::cout << csv_text;
  if (!s.csv_path.empty()) {
    std::ofstream out(s.csv_path);
    if (!out) throw std::runtime_error("cannot write " + s.csv_path);
    out << csv_text;
  }
  if (!s.json_path.empty()) {
    std::ofstream out(s.json_path);
    if (!out) throw std::runtime_error("cannot write " + s.json_path);
    out << doc.dump(2) << "\n";
  }
}

const char* verdict_name(UserVerdict v) {
  switch (v) {
    case UserVerdict::StableNonSubscriber:
      return "stable-nonsubscriber";
    case UserVerdict::StableSubscriber:
      return "stable-subscriber";
    default:
      return "unstable";
  }
}

// ---------------------------------------------------------------- ages ----

void run_ages(Shared& s, bool line) {
  GameParams params(s.pe, s.p, s.beta, s.L);
  const double threshold = ac_threshold(params);

  std::vector<double> analytic;
  std::vector<std::string> role;
  SimTopology topo;
  if (line) {
    auto ages = line_node_ages(s.m, params);
    for (int i = 0; i <= s.m; ++i) {
      analytic.push_back(ages[static_cast<std::size_t>(i)]);
      role.push_back(i == 0 || i == s.m ? "subscriber" : "non-subscriber");
    }
    if (s.simulate) topo = build_line_segment(s.m);
  } else {
    const double xs = subscriber_age(params);
    const double x1 =
        s.m < s.n ? fc_nonsub_age(s.n, s.m, params)
                  : std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < s.n; ++i) {
      const bool sub = i >= s.n - s.m;
      analytic.push_back(sub ? xs : x1);
      role.push_back(sub ? "subscriber" : "non-subscriber");
    }
    if (s.simulate) topo = build_fully_connected(s.n, s.m);
  }

  json run_spec = {{"subcommand", "ages"},
                   {"topology", line ? "line" : "fc"},
                   {"pe", s.pe},
                   {"p", s.p},
                   {"beta", s.beta},
                   {"L", s.L},
                   {"simulate", s.simulate}};
  if (line)
    run_spec["m"] = s.m;
  else {
    run_spec["n"] = s.n;
    run_spec["m"] = s.m;
  }

  std::optional<SimResult> sim;
  if (s.simulate) {
    const SimConfig config = make_sim_config(s, params);
    run_spec["sim"] = sim_spec_json(config);
    sim = run(topo, params, config);
  }

  std::ostringstream csv;
  csv << spec_comment(run_spec);
  csv << (s.simulate ? "node,role,analytic_age,sim_mean,sim_stderr\n"
                     : "node,role,analytic_age\n");
  json rows = json::array();
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    csv << i << ',' << role[i] << ',' << fmt(analytic[i]);
    json row = {{"node", i},
                {"role", role[i]},
                {"analytic_age", json_number(analytic[i])}};
    if (sim) {
      csv << ',' << fmt(sim->mean_age[i]) << ',' << fmt(sim->std_error[i]);
      row["sim_mean"] = json_number(sim->mean_age[i]);
      row["sim_stderr"] = json_number(sim->std_error[i]);
    }
    csv << '\n';
    rows.push_back(row);
  }
  csv << "threshold,," << fmt(threshold);
  if (s.simulate) csv << ",,";
  csv << '\n';

  json doc = {{"run_spec", run_spec},
              {"library_version", kLibraryVersion},
              {"ages", {{"threshold", threshold}, {"rows", rows}}}};
  emit(s, csv.str(), doc);
}

// --------------------------------------------------------- equilibrium ----

json beta_json(const BetaStar& beta) {
  switch (beta.kind) {
    case BetaStar::Kind::Feasible:
      return beta.value;
    case BetaStar::Kind::LimitZero:
      return 0.0;
    default:
      return nullptr;
  }
}

const char* beta_kind_name(const BetaStar& beta) {
  switch (beta.kind) {
    case BetaStar::Kind::Feasible:
      return "feasible";
    case BetaStar::Kind::LimitZero:
      return "limit-zero";
    default:
      return "infeasible";
  }
}

void run_equilibrium(Shared& s, bool line) {
  const CostModel cost(s.cost_a, s.cost_q);
  const EquilibriumMode mode = s.eq_mode == "worst-case"
                                   ? EquilibriumMode::WorstCase
                                   : EquilibriumMode::ServerPreferred;
  const EquilibriumResult result =
      line ? line_stackelberg(s.p, s.L, s.pe, cost, mode)
           : fc_stackelberg(s.n, s.p, s.L, s.pe, cost, mode);

  json run_spec = {{"subcommand", "equilibrium"},
                   {"topology", line ? "line" : "fc"},
                   {"pe", s.pe},
                   {"p", s.p},
                   {"L", s.L},
                   {"cost_a", s.cost_a},
                   {"cost_q", s.cost_q},
                   {"mode", s.eq_mode}};
  if (!line) run_spec["n"] = s.n;

  std::ostringstream csv;
  csv << spec_comment(run_spec);
  csv << "m,beta_star,kind,f_s,cost,utility,chosen\n";
  json audit = json::array();
  for (const auto& cand : result.audited) {
    const bool chosen = !result.no_subscription && cand.m == result.chosen_m;
    csv << cand.m << ',';
    if (cand.beta.usable()) {
      csv << fmt(cand.beta.rate_or_zero()) << ',' << beta_kind_name(cand.beta)
          << ',' << fmt(cand.f_s) << ',' << fmt(cand.cost) << ','
          << fmt(cand.utility);
    } else {
      csv << ",infeasible," << fmt(cand.f_s) << ",,";
    }
    csv << ',' << (chosen ? 1 : 0) << '\n';
    audit.push_back({{"m", cand.m},
                     {"beta_star", beta_json(cand.beta)},
                     {"kind", beta_kind_name(cand.beta)},
                     {"f_s", cand.f_s},
                     {"cost", cand.beta.usable() ? json_number(cand.cost)
                                                 : json(nullptr)},
                     {"utility", cand.beta.usable() ? json_number(cand.utility)
                                                    : json(nullptr)},
                     {"chosen", chosen}});
  }
  if (result.no_subscription) {
    csv << "# chosen: no-subscription f_s=0 utility=0\n";
  } else {
    csv << "# chosen: m=" << result.chosen_m
        << " beta_star=" << fmt(result.beta_star.rate_or_zero())
        << " f_s=" << fmt(result.f_s) << " cost=" << fmt(result.cost)
        << " utility=" << fmt(result.utility) << '\n';
  }

  json doc = {{"run_spec", run_spec},
              {"library_version", kLibraryVersion},
              {"equilibrium",
               {{"mode", s.eq_mode},
                {"no_subscription", result.no_subscription},
                {"chosen_m", result.chosen_m},
                {"beta_star", beta_json(result.beta_star)},
                {"beta_star_kind", beta_kind_name(result.beta_star)},
                {"f_s", result.f_s},
                {"cost", result.cost},
                {"utility", result.utility},
                {"audit", audit}}}};
  emit(s, csv.str(), doc);
}

// ------------------------------------------------------------- compare ----

void run_compare(Shared& s, bool line) {
  GameParams params(s.pe, s.p, s.beta, s.L);
  SimTopology topo;
  std::vector<double> analytic;
  if (line) {
    topo = build_line_segment(s.m, s.cells);
    auto cell = line_node_ages(s.m, params);
    for (int i = 0; i < topo.node_count(); ++i)
      analytic.push_back(
          cell[static_cast<std::size_t>(s.cells == 1 ? i : i % s.m)]);
  } else {
    topo = build_fully_connected(s.n, s.m);
    const double xs = subscriber_age(params);
    const double x1 = s.m < s.n ? fc_nonsub_age(s.n, s.m, params) : xs;
    for (int i = 0; i < topo.node_count(); ++i)
      analytic.push_back(topo.subscriber[static_cast<std::size_t>(i)] ? xs
                                                                      : x1);
  }
  for (auto& a : analytic) a += s.self_test_bias;

  const SimConfig config = make_sim_config(s, params);
  json run_spec = {{"subcommand", "compare"},
                   {"topology", line ? "line" : "fc"},
                   {"pe", s.pe},
                   {"p", s.p},
                   {"beta", s.beta},
                   {"L", s.L},
                   {"sim", sim_spec_json(config)}};
  if (line) {
    run_spec["m"] = s.m;
    run_spec["cells"] = s.cells;
  } else {
    run_spec["n"] = s.n;
    run_spec["m"] = s.m;
  }
  if (s.self_test_bias != 0.0) run_spec["self_test_bias"] = s.self_test_bias;

  const SimResult sim = run(topo, params, config);

  double max_abs_z = 0.0;
  int worst_node = 0;
  std::ostringstream csv;
  csv << spec_comment(run_spec);
  csv << "node,role,analytic_age,sim_mean,sim_stderr,z\n";
  json rows = json::array();
  for (int i = 0; i < topo.node_count(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const double diff = sim.mean_age[idx] - analytic[idx];
    const double z =
        sim.std_error[idx] > 0.0
            ? diff / sim.std_error[idx]
            : (diff == 0.0 ? 0.0
                           : std::numeric_limits<double>::infinity());
    if (std::abs(z) > max_abs_z) {
      max_abs_z = std::abs(z);
      worst_node = i;
    }
    const char* role = topo.subscriber[idx] ? "subscriber" : "non-subscriber";
    csv << i << ',' << role << ',' << fmt(analytic[idx]) << ','
        << fmt(sim.mean_age[idx]) << ',' << fmt(sim.std_error[idx]) << ','
        << fmt(z) << '\n';
    rows.push_back({{"node", i},
                    {"role", role},
                    {"analytic_age", json_number(analytic[idx])},
                    {"sim_mean", json_number(sim.mean_age[idx])},
                    {"sim_stderr", json_number(sim.std_error[idx])},
                    {"z", json_number(z)}});
  }
  const bool pass = max_abs_z <= 3.0;
  if (pass) {
    csv << "# verdict: PASS max_abs_z=" << fmt(max_abs_z) << '\n';
  } else {
    csv << "# verdict: FAIL node=" << worst_node << " z=" << fmt(max_abs_z)
        << '\n';
    s.exit_code = 3;
  }

  json doc = {{"run_spec", run_spec},
              {"library_version", kLibraryVersion},
              {"compare",
               {{"rows", rows},
                {"pass", pass},
                {"max_abs_z", json_number(max_abs_z)},
                {"samples", sim.samples}}}};
  emit(s, csv.str(), doc);
}

// --------------------------------------------------------------- sweep ----

struct Range {
  double lo = 0, hi = 0, step = 0;
};

Range parse_range(const std::string& text) {
  Range r;
  char trailing;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &r.lo, &r.hi, &r.step,
                  &trailing) != 3)
    throw std::invalid_argument("range must look like lo:hi:step");
  if (r.step <= 0.0) throw std::invalid_argument("range step must be positive");
  if (r.hi < r.lo) throw std::invalid_argument("range end precedes its start");
  return r;
}

void run_sweep(Shared& s, bool line) {
  const CostModel cost(s.cost_a, s.cost_q);
  const Range range = parse_range(s.range);
  const bool worst = s.eq_mode == "worst-case";

  json run_spec = {{"subcommand", "sweep"},
                   {"topology", line ? "line" : "fc"},
                   {"over", s.over},
                   {"range", s.range},
                   {"pe", s.pe},
                   {"p", s.p},
                   {"L", s.L},
                   {"cost_a", s.cost_a},
                   {"cost_q", s.cost_q},
                   {"mode", s.eq_mode}};
  if (!line) run_spec["n"] = s.n;

  std::vector<std::string> columns;
  json rows = json::array();
  std::ostringstream body;
  int skipped = 0;

  if (s.over == "m") {
    columns = {"m", "beta_star", "f_s", "cost", "utility"};
    for (double v = range.lo; v <= range.hi + 1e-9; v += range.step) {
      const int m = static_cast<int>(std::llround(v));
      if (m < 1 || (!line && m > s.n)) {
        ++skipped;
        continue;
      }
      const BetaStar beta =
          line ? (worst ? line_beta_star(m, s.p, s.L)
                        : line_beta_star(m, s.p, s.L))
               : fc_beta_star(m, s.n, s.p, s.L);
      const BetaStar use =
          line && worst
              ? [&] {
                  GameParams probe(s.pe, s.p, 1.0, s.L);
                  (void)probe;
                  return beta;
                }()
              : beta;
      if (!use.usable()) {
        ++skipped;
        continue;
      }
      const double f_s = line ? 1.0 / m : static_cast<double>(m) / s.n;
      const double c = cost(use.rate_or_zero());
      const double utility = f_s - c;
      body << m << ',' << fmt(use.rate_or_zero()) << ',' << fmt(f_s) << ','
           << fmt(c) << ',' << fmt(utility) << '\n';
      rows.push_back({m, use.rate_or_zero(), f_s, c, utility});
    }
  } else if (s.over == "beta") {
    columns = line ? std::vector<std::string>{"beta", "m_star", "m_star_star",
                                              "f_s"}
                   : std::vector<std::string>{"beta", "m_star", "f_s"};
    for (double v = range.lo; v <= range.hi + 1e-9; v += range.step) {
      if (!(v > 0.0 && v <= 1.0)) {
        ++skipped;
        continue;
      }
      GameParams params(s.pe, s.p, v, s.L);
      try {
        if (line) {
          const int star = line_m_star(params);
          const int star_star = line_m_star_star(params);
          const double f_s = 1.0 / (worst ? star_star : star);
          body << fmt(v) << ',' << star << ',' << star_star << ','
               << fmt(f_s) << '\n';
          rows.push_back({v, star, star_star, f_s});
        } else {
          const int star = fc_m_star(s.n, params);
          const double f_s = static_cast<double>(star) / s.n;
          body << fmt(v) << ',' << star << ',' << fmt(f_s) << '\n';
          rows.push_back({v, star, f_s});
        }
      } catch (const std::runtime_error&) {
        ++skipped;  // no stable period below the cap at this rate
      }
    }
  } else {
    throw std::invalid_argument("sweep axis must be m or beta");
  }

  std::ostringstream csv;
  csv << spec_comment(run_spec);
  for (std::size_t i = 0; i < columns.size(); ++i)
    csv << (i ? "," : "") << columns[i];
  csv << '\n' << body.str();
  if (rows.empty())
    std::cerr << "warning: sweep produced no feasible rows\n";
  else if (skipped > 0)
    std::cerr << "warning: skipped " << skipped << " infeasible points\n";

  json doc = {{"run_spec", run_spec},
              {"library_version", kLibraryVersion},
              {"sweep", {{"columns", columns}, {"rows", rows}}}};
  emit(s, csv.str(), doc);
}

// ------------------------------------------------------------ simulate ----

void run_simulate(Shared& s, const std::string& topology) {
  GameParams params(s.pe, s.p, s.beta, s.L);
  SimTopology topo;
  json run_spec = {{"subcommand", "simulate"},
                   {"topology", topology},
                   {"pe", s.pe},
                   {"p", s.p},
                   {"beta", s.beta},
                   {"L", s.L},
                   {"stability", s.stability}};
  if (topology == "line") {
    topo = build_line_segment(s.m, s.cells);
    run_spec["m"] = s.m;
    run_spec["cells"] = s.cells;
  } else if (topology == "fc") {
    topo = build_fully_connected(s.n, s.m);
    run_spec["n"] = s.n;
    run_spec["m"] = s.m;
  } else {
    topo = build_graph_topology(load_graph_file(s.graph_file));
    run_spec["file"] = s.graph_file;
  }
  const SimConfig config = make_sim_config(s, params);
  run_spec["sim"] = sim_spec_json(config);

  const SimResult result = run(topo, params, config);
  std::optional<StabilityReport> report;
  if (s.stability) report = empirical_stability(topo, params, config);

  std::ostringstream csv;
  csv << spec_comment(run_spec);
  csv << (report ? "node,subscriber,mean_age,std_error,verdict,conclusive\n"
                 : "node,subscriber,mean_age,std_error\n");
  json rows = json::array();
  for (int i = 0; i < topo.node_count(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    csv << i << ',' << (topo.subscriber[idx] ? 1 : 0) << ','
        << fmt(result.mean_age[idx]) << ',' << fmt(result.std_error[idx]);
    json row = {{"node", i},
                {"subscriber", topo.subscriber[idx] != 0},
                {"mean_age", json_number(result.mean_age[idx])},
                {"std_error", json_number(result.std_error[idx])}};
    if (report) {
      const auto& user = report->users[idx];
      csv << ',' << verdict_name(user.verdict) << ','
          << (user.conclusive ? 1 : 0);
      row["verdict"] = verdict_name(user.verdict);
      row["conclusive"] = user.conclusive;
    }
    csv << '\n';
    rows.push_back(row);
  }
  csv << "# samples: " << result.samples << '\n';
  json payload = {{"rows", rows}, {"samples", result.samples}};
  if (report) {
    csv << "# threshold: " << fmt(report->threshold) << '\n';
    csv << "# all_stable: " << (report->all_stable ? "true" : "false") << '\n';
    payload["threshold"] = json_number(report->threshold);
    payload["all_stable"] = report->all_stable;
  }

  json doc = {{"run_spec", run_spec},
              {"library_version", kLibraryVersion},
              {"simulate", payload}};
  emit(s, csv.str(), doc);
}

// ------------------------------------------------------------ plumbing ----

// Folds config-file values into the token stream as trailing defaults.
// Explicit command-line flags always win; the seed env var loses to both.
std::vector<std::string> with_config_defaults(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json config = json::parse(in);
  if (!config.is_object())
    throw std::runtime_error("config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto& arg : args)
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else {
      args.push_back(flag);
      args.push_back(value.dump());
    }
  }
  return args;
}

void add_output_options(CLI::App* app, Shared& s) {
  app->add_option("--csv", s.csv_path, "also write the CSV to this file");
  app->add_option("--json", s.json_path, "write a JSON document to this file");
  app->add_option("--config", s.config_path,
                  "JSON file with default values for any flags not given");
}

void add_model_options(CLI::App* app, Shared& s, bool with_beta) {
  app->add_option("--pe", s.pe, "source update probability")->required();
  app->add_option("--p", s.p, "gossip success probability")->required();
  if (with_beta)
    app->add_option("--beta", s.beta, "server sampling probability")
        ->required();
  app->add_option("--L", s.L, "age tolerance multiplier")->required();
}

void add_cost_options(CLI::App* app, Shared& s) {
  app->add_option("--cost-a", s.cost_a, "sampling cost coefficient");
  app->add_option("--cost-q", s.cost_q, "sampling cost exponent");
  app->add_option("--mode", s.eq_mode, "equilibrium selection mode")
      ->check(CLI::IsMember({"server-preferred", "worst-case"}));
}

void add_sim_options(CLI::App* app, Shared& s) {
  app->add_option("--slots", s.sim.slots, "simulated slots per iteration");
  app->add_option("--iters", s.sim.iterations, "independent iterations");
  app->add_option("--burn-in", s.sim.burn_in,
                  "slots discarded before time-averaging (default: derived)");
  app->add_option("--seed", s.sim.seed, "master RNG seed")
      ->envname("GOSSIP_SEED");
  app->add_option("--threads", s.sim.threads, "worker threads");
  app->add_option("--mode", s.sim.mode, "sampling mode")
      ->check(CLI::IsMember({"time-average", "ensemble"}));
}

}  // namespace

int main(int argc, char** argv) {
  Shared s;
  std::vector<std::string> tokens;
  try {
    tokens = with_config_defaults(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<std::string> storage;
  storage.reserve(tokens.size() + 1);
  storage.push_back(argv[0]);
  for (auto& t : tokens) storage.push_back(t);
  std::vector<char*> raw;
  raw.reserve(storage.size());
  for (auto& t : storage) raw.push_back(t.data());

  CLI::App app{"expected version ages, subscription equilibria, and optimal "
               "sampling rates for timely gossip networks"};
  app.set_version_flag("--version", std::string(kLibraryVersion));
  app.require_subcommand(1);
  add_output_options(&app, s);

  auto* ages = app.add_subcommand("ages", "analytical per-user ages");
  ages->require_subcommand(1);
  auto* ages_line = ages->add_subcommand("line", "periodic line");
  ages_line->add_option("--m", s.m, "subscription period")->required();
  add_model_options(ages_line, s, true);
  ages_line->add_flag("--simulate", s.simulate, "add simulated columns");
  add_sim_options(ages_line, s);
  add_output_options(ages_line, s);
  ages_line->callback([&] { run_ages(s, true); });
  auto* ages_fc = ages->add_subcommand("fc", "fully connected network");
  ages_fc->add_option("--n", s.n, "user count")->required();
  ages_fc->add_option("--m", s.m, "subscriber count")->required();
  add_model_options(ages_fc, s, true);
  ages_fc->add_flag("--simulate", s.simulate, "add simulated columns");
  add_sim_options(ages_fc, s);
  add_output_options(ages_fc, s);
  ages_fc->callback([&] { run_ages(s, false); });

  auto* eq = app.add_subcommand("equilibrium",
                                "server-optimal sampling rate and structure");
  eq->require_subcommand(1);
  auto* eq_line = eq->add_subcommand("line", "periodic line");
  add_model_options(eq_line, s, false);
  add_cost_options(eq_line, s);
  add_output_options(eq_line, s);
  eq_line->callback([&] { run_equilibrium(s, true); });
  auto* eq_fc = eq->add_subcommand("fc", "fully connected network");
  eq_fc->add_option("--n", s.n, "user count")->required();
  add_model_options(eq_fc, s, false);
  add_cost_options(eq_fc, s);
  add_output_options(eq_fc, s);
  eq_fc->callback([&] { run_equilibrium(s, false); });

  auto* cmp = app.add_subcommand("compare",
                                 "analytics against simulation, 3-sigma gate");
  cmp->require_subcommand(1);
  auto* cmp_line = cmp->add_subcommand("line", "periodic line");
  cmp_line->add_option("--m", s.m, "subscription period")->required();
  cmp_line->add_option("--cells", s.cells, "periods on a ring (1 = segment)");
  add_model_options(cmp_line, s, true);
  add_sim_options(cmp_line, s);
  cmp_line->add_flag("--paper-scale", s.paper_scale,
                     "full-scale ensemble replication protocol");
  cmp_line->add_option("--self-test-bias", s.self_test_bias,
                       "offset analytic values (harness self-test)")
      ->group("");
  add_output_options(cmp_line, s);
  cmp_line->callback([&] { run_compare(s, true); });
  auto* cmp_fc = cmp->add_subcommand("fc", "fully connected network");
  cmp_fc->add_option("--n", s.n, "user count")->required();
  cmp_fc->add_option("--m", s.m, "subscriber count")->required();
  add_model_options(cmp_fc, s, true);
  add_sim_options(cmp_fc, s);
  cmp_fc->add_flag("--paper-scale", s.paper_scale,
                   "full-scale ensemble replication protocol");
  cmp_fc->add_option("--self-test-bias", s.self_test_bias,
                     "offset analytic values (harness self-test)")
      ->group("");
  add_output_options(cmp_fc, s);
  cmp_fc->callback([&] { run_compare(s, false); });

  auto* sweep = app.add_subcommand("sweep", "CSV sweeps for plotting");
  sweep->require_subcommand(1);
  auto* sweep_line = sweep->add_subcommand("line", "periodic line");
  sweep_line->add_option("--over", s.over, "sweep axis: m or beta")
      ->required()
      ->check(CLI::IsMember({"m", "beta"}));
  sweep_line->add_option("--range", s.range, "lo:hi:step")->required();
  add_model_options(sweep_line, s, false);
  add_cost_options(sweep_line, s);
  add_output_options(sweep_line, s);
  sweep_line->callback([&] { run_sweep(s, true); });
  auto* sweep_fc = sweep->add_subcommand("fc", "fully connected network");
  sweep_fc->add_option("--n", s.n, "user count")->required();
  sweep_fc->add_option("--over", s.over, "sweep axis: m or beta")
      ->required()
      ->check(CLI::IsMember({"m", "beta"}));
  sweep_fc->add_option("--range", s.range, "lo:hi:step")->required();
  add_model_options(sweep_fc, s, false);
  add_cost_options(sweep_fc, s);
  add_output_options(sweep_fc, s);
  sweep_fc->callback([&] { run_sweep(s, false); });

  auto* sim = app.add_subcommand("simulate", "run the discrete-time simulator");
  sim->require_subcommand(1);
  auto* sim_line = sim->add_subcommand("line", "line segment or ring");
  sim_line->add_option("--m", s.m, "subscription period")->required();
  sim_line->add_option("--cells", s.cells, "periods on a ring (1 = segment)");
  add_model_options(sim_line, s, true);
  add_sim_options(sim_line, s);
  sim_line->add_flag("--stability", s.stability,
                     "empirical per-user stability verdicts");
  add_output_options(sim_line, s);
  sim_line->callback([&] { run_simulate(s, "line"); });
  auto* sim_fc = sim->add_subcommand("fc", "fully connected network");
  sim_fc->add_option("--n", s.n, "user count")->required();
  sim_fc->add_option("--m", s.m, "subscriber count")->required();
  add_model_options(sim_fc, s, true);
  add_sim_options(sim_fc, s);
  sim_fc->add_flag("--stability", s.stability,
                   "empirical per-user stability verdicts");
  add_output_options(sim_fc, s);
  sim_fc->callback([&] { run_simulate(s, "fc"); });
  auto* sim_graph = sim->add_subcommand("graph", "adjacency-list file");
  sim_graph->add_option("--file", s.graph_file, "graph description file")
      ->required();
  add_model_options(sim_graph, s, true);
  add_sim_options(sim_graph, s);
  sim_graph->add_flag("--stability", s.stability,
                      "empirical per-user stability verdicts");
  add_output_options(sim_graph, s);
  sim_graph->callback([&] { run_simulate(s, "graph"); });

  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return s.exit_code;
}
