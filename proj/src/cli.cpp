#include "ressize/cli.hpp"

#include "ressize/errors.hpp"
#include "ressize/reports.hpp"
#include "ressize/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ostream>
#include <sstream>

namespace ressize {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kMonthNames[12] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                         "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

fs::path output_dir() { return fs::path(env("RESSIZE_OUT_DIR").value_or(".")); }

int resolve_threads(int flag, int configured) {
  if (flag > 0) return flag;
  if (const auto e = env("RESSIZE_THREADS")) {
    try {
      const int n = std::stoi(*e);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw ConfigError("RESSIZE_THREADS", fmt::format("'{}' is not a positive integer", *e));
  }
  return configured;
}

/// "key=value,key=value" into a JSON object; numeric values become numbers.
json parse_params(const std::string& text, const std::string& path) {
  json obj = json::object();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(path, fmt::format("expected key=value, got '{}'", item));
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    char* end = nullptr;
    const double d = std::strtod(value.c_str(), &end);
    if (!value.empty() && end == value.c_str() + value.size()) {
      if (value.find_first_of(".eE") == std::string::npos && value.front() != '-')
        obj[key] = std::stoull(value);
      else
        obj[key] = d;
    } else {
      obj[key] = value;
    }
  }
  return obj;
}

Scenario load_or_default(const std::string& config) {
  return config.empty() ? default_scenario() : load_scenario(config);
}

CostScenario parse_cost(const std::string& s) {
  if (s == "current") return CostScenario::Current;
  if (s == "ultimate") return CostScenario::Ultimate;
  throw ConfigError("--cost", "expected 'current' or 'ultimate'");
}

struct CaseChoice {
  SizingCase sizing_case;
  std::optional<CostScenario> cost;
};

CaseChoice parse_case(const std::string& s) {
  if (s.empty() || s.size() > 2 || s[0] < '1' || s[0] > '3')
    throw ConfigError("--case", fmt::format("'{}' is not one of 1, 2, 3 (optionally suffixed C or U)", s));
  CaseChoice c{static_cast<SizingCase>(s[0] - '0'), std::nullopt};
  if (s.size() == 2) {
    const char k = static_cast<char>(std::toupper(static_cast<unsigned char>(s[1])));
    if (k == 'C')
      c.cost = CostScenario::Current;
    else if (k == 'U')
      c.cost = CostScenario::Ultimate;
    else
      throw ConfigError("--case", fmt::format("unknown cost suffix in '{}'", s));
  }
  return c;
}

/// Cost scenario from --case suffix and --cost; they must agree when both are given.
CostScenario resolve_cost(const CaseChoice& c, const std::string& cost_flag) {
  if (cost_flag.empty()) return c.cost.value_or(CostScenario::Current);
  const CostScenario flag = parse_cost(cost_flag);
  if (c.cost && *c.cost != flag) throw ConfigError("--cost", "contradicts the cost suffix given in --case");
  return flag;
}

std::string case_label(SizingCase c, CostScenario cost) {
  return fmt::format("{}{}", static_cast<int>(c), cost == CostScenario::Current ? 'C' : 'U');
}

std::string describe_sizing(const SystemSizing& s) {
  if (const auto* b = std::get_if<BatterySizing>(&s.storage))
    return fmt::format("pv_kwp={:.3f} battery_kwh={:.3f}", s.pv_kwp, b->battery_kwh);
  const auto& h = std::get<HydrogenSizing>(s.storage);
  return fmt::format("pv_kwp={:.3f} el_kw={:.3f} tank_kg={:.3f} fc_kw={:.3f}", s.pv_kwp, h.el_kw, h.tank_kg, h.fc_kw);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string pv_profile;
  std::string load_profile;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  json pv = parse_params(a.pv_profile, "--pv-profile");
  json load = parse_params(a.load_profile, "--load-profile");
  pv["source"] = "synthetic";
  load["source"] = "synthetic";
  if (!pv.contains("seed")) pv["seed"] = a.seed;
  if (!load.contains("seed")) load["seed"] = a.seed;
  json doc = {{"profiles", {{"pv", pv}, {"load", load}}}};
  Scenario sc;
  try {
    sc = parse_scenario(doc.dump(), fs::current_path());
  } catch (const ConfigError& e) {
    // Map scenario paths back to the flag that supplied them.
    std::string msg = e.what();
    for (const auto& [from, to] : {std::pair<std::string, std::string>{"profiles.pv.", "--pv-profile "},
                                   std::pair<std::string, std::string>{"profiles.load.", "--load-profile "}})
      if (msg.rfind(from, 0) == 0) msg = to + msg.substr(from.size());
    throw ConfigError(msg);
  }

  const fs::path dir = a.out.empty() ? output_dir() : fs::path(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  write_hourly_csv(dir / "pv.csv", sc.inputs.pv.base_series);
  write_hourly_csv(dir / "load.csv", sc.inputs.load);

  const auto pv_m = monthly_totals(sc.inputs.pv.base_series);
  const auto load_m = monthly_totals(sc.inputs.load);
  out << fmt::format("pv base plant {:.1f} kWp, load {:.1f} kWh/yr\n", sc.inputs.pv.base_kwp, sc.inputs.load.sum());
  out << fmt::format("{:<5} {:>16} {:>16}\n", "month", "pv_kwh", "load_kwh");
  for (int m = 0; m < 12; ++m) out << fmt::format("{:<5} {:>16.3f} {:>16.3f}\n", kMonthNames[m], pv_m[m], load_m[m]);
  const auto [lo, hi] = std::minmax_element(pv_m.begin(), pv_m.end());
  out << fmt::format("{:<5} {:>16.3f} {:>16.3f}\n", "total", sc.inputs.pv.base_series.sum(), sc.inputs.load.sum());
  out << fmt::format("pv max/min monthly ratio {:.4f} (peak {})\n", *lo > 0.0 ? *hi / *lo : INFINITY,
                     kMonthNames[hi - pv_m.begin()]);
  out << fmt::format("wrote {} and {}\n", (dir / "pv.csv").string(), (dir / "load.csv").string());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config;
  std::string strategy;
  std::string sizing;
  std::string cost;
  std::string ledger_out;
  std::string report_out;
  std::string cashflow_out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = load_or_default(a.config);
  const CostScenario cost = a.cost.empty() ? CostScenario::Current : parse_cost(a.cost);

  SystemSizing sizing;
  if (!a.sizing.empty())
    sizing = parse_sizing(a.sizing, sc.inverter_efficiency);
  else if (sc.sizing)
    sizing = *sc.sizing;
  else
    throw ConfigError("sizing", "no sizing given (use --sizing or a sizing section)");

  StrategyConfig strategy = sc.strategy;
  if (a.strategy == "cs")
    strategy.mode = StrategyMode::Conventional;
  else if (a.strategy == "olds")
    strategy.mode = StrategyMode::Olds;
  else if (!a.strategy.empty())
    throw ConfigError("--strategy", "expected 'cs' or 'olds'");
  if (strategy.mode == StrategyMode::Olds && !sizing.hydrogen())
    throw ConfigError("strategy.mode", "OLDS requires hydrogen storage sizing");

  const SimulationInputs inputs = sc.inputs_for(cost);
  const CostBook& book = sc.costbook(cost);
  const SimulationResult baseline = simulate_baseline(inputs);

  std::optional<LedgerCsvWriter> ledger;
  if (!a.ledger_out.empty()) ledger.emplace(a.ledger_out);
  const StorageStates init = initial_states(inputs, sizing);
  const double init_level = std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, BatteryState>)
          return s.energy;
        else
          return s.tank.mass;
      },
      init);
  LedgerAudit audit(sizing.inverter_efficiency, sizing.hydrogen(), init_level);
  const auto t_sim = std::chrono::steady_clock::now();
  const SimulationResult result = simulate_horizon(inputs, sizing, strategy, [&](int y, int h, const HourLedger& r) {
    audit(y, h, r);
    if (ledger) (*ledger)(y, h, r);
  });
  const double sim_seconds = seconds_since(t_sim);
  if (ledger) ledger->close();

  const EconomicSummary econ = summarize(book, sizing, inputs.tariff, baseline, result, inputs.battery.ep_ratio);
  if (!a.cashflow_out.empty()) write_cashflow_csv(a.cashflow_out, econ.cashflows, book.discount_rate);

  out << fmt::format("scenario {}  cost {}\n", sc.digest, to_string(cost));
  out << fmt::format("sizing   {}\n", describe_sizing(sizing));
  out << fmt::format("NPV {:.2f}\nNPC {:.2f}\nSSR {:.6f}\n", econ.npv, econ.npc, econ.ssr);
  out << fmt::format("ledger audit {} ({} hours, worst balance {:.3e}, worst level {:.3e})\n",
                     audit.passed() ? "pass" : "FAIL", audit.hours(), audit.worst_balance(), audit.worst_level());
  out << fmt::format("{:>4} {:>14} {:>14} {:>14} {:>16}\n", "year", "bill_baseline", "bill_system", "savings",
                     "import_kwh");
  for (int y = 0; y < result.horizon(); ++y)
    out << fmt::format("{:>4} {:>14.2f} {:>14.2f} {:>14.2f} {:>16.3f}\n", y + 1, econ.bills_baseline[y],
                       econ.bills_system[y], econ.bills_baseline[y] - econ.bills_system[y],
                       result.years[static_cast<std::size_t>(y)].import);
  for (const auto& r : result.replacements) out << fmt::format("replacement {} year {}\n", to_string(r.component), r.year);

  if (!a.report_out.empty()) {
    RunReport rep;
    rep.command = "simulate";
    rep.scenario_digest = sc.digest;
    rep.seed = sc.optimizer.seed;
    rep.cost_scenario = to_string(cost);
    rep.economics = econ;
    rep.simulation = result;
    rep.labels.emplace_back("sizing", describe_sizing(sizing));
    rep.labels.emplace_back("strategy", strategy.mode == StrategyMode::Olds ? "olds" : "cs");
    rep.labels.emplace_back("ledger_audit", audit.passed() ? "pass" : "fail");
    rep.timings = {{"simulate", sim_seconds}, {"total", seconds_since(t0)}};
    rep.write(a.report_out);
  }
  return audit.passed() ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// optimize

struct OptimizeArgs {
  std::string config;
  std::string sizing_case = "1";
  std::string cost;
  std::string algo = "momfa";
  long long budget = -1;
  long long seed = -1;
  double min_ssr = -1.0;
  int threads = 0;
  std::string out;
  std::string telemetry_out;
  std::string report_out;
};

struct OptimizeSetup {
  Scenario scenario;
  CostScenario cost;
  SizingCase sizing_case;
  std::shared_ptr<const SizingProblem> problem;
  std::size_t budget;
  std::uint64_t seed;
  int threads;
};

OptimizeSetup setup_optimize(const std::string& config, const std::string& case_text, const std::string& cost_text,
                             long long budget, long long seed, double min_ssr, int threads) {
  OptimizeSetup s{load_or_default(config), CostScenario::Current, SizingCase::Battery, nullptr, 0, 0, 1};
  const CaseChoice c = parse_case(case_text);
  s.cost = resolve_cost(c, cost_text);
  s.sizing_case = c.sizing_case;
  if (budget == 0 || budget < -1) throw ConfigError("--budget", "must be at least 1");
  if (seed < -1) throw ConfigError("--seed", "must be non-negative");
  s.budget = budget > 0 ? static_cast<std::size_t>(budget) : s.scenario.optimizer.budget;
  s.seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : s.scenario.optimizer.seed;
  if (min_ssr != -1.0 && !(min_ssr >= 0.0 && min_ssr <= 1.0)) throw ConfigError("--min-ssr", "must lie in [0, 1]");
  const double ssr_floor = min_ssr >= 0.0 ? min_ssr : s.scenario.optimizer.min_ssr;
  s.threads = resolve_threads(threads, s.scenario.optimizer.momfa.threads);
  s.problem = std::make_shared<const SizingProblem>(s.scenario.inputs_for(s.cost), s.scenario.costbook(s.cost),
                                                    s.sizing_case, s.scenario.bounds, s.scenario.inverter_efficiency,
                                                    ssr_floor);
  return s;
}

RunResult run_algorithm(const std::string& algo, const OptimizeSetup& s, std::uint64_t seed) {
  const Problem problem = SizingProblem::as_problem(s.problem);
  if (algo == "momfa") {
    MomfaParams p = s.scenario.optimizer.momfa;
    p.seed = seed;
    p.threads = s.threads;
    return momfa_run(problem, p, s.budget);
  }
  if (algo == "nsga2") {
    Nsga2Params p = s.scenario.optimizer.nsga2;
    p.seed = seed;
    p.threads = s.threads;
    return nsga2_run(problem, p, s.budget);
  }
  throw ConfigError("--algo", "expected 'momfa' or 'nsga2'");
}

std::string describe_solution(const DecisionSpace& space, const Solution& sol) {
  std::string s;
  for (Eigen::Index i = 0; i < space.dims(); ++i) s += fmt::format("{}={:.3f} ", space[i].name, sol.x[i]);
  return s + fmt::format("npv={:.2f} ssr={:.6f}", sol.objectives[0], sol.objectives[1]);
}

int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  if (a.algo != "momfa" && a.algo != "nsga2") throw ConfigError("--algo", "expected 'momfa' or 'nsga2'");
  const OptimizeSetup s = setup_optimize(a.config, a.sizing_case, a.cost, a.budget, a.seed, a.min_ssr, a.threads);
  const std::string label = case_label(s.sizing_case, s.cost);
  const fs::path archive_path =
      a.out.empty() ? output_dir() / fmt::format("archive_{}_{}_seed{}.csv", label, a.algo, s.seed) : fs::path(a.out);

  const RunResult run = run_algorithm(a.algo, s, s.seed);
  const auto& space = s.problem->space();
  write_archive_csv(archive_path, run.archive, space.names());
  const Objectives ref = hypervolume_reference(*s.problem);
  if (!a.telemetry_out.empty()) write_telemetry_csv(a.telemetry_out, run.trace, ref);

  const double hv = hypervolume(run.archive, ref);
  out << fmt::format("scenario {}  case {}  algo {}  seed {}\n", s.scenario.digest, label, a.algo, s.seed);
  out << fmt::format("evaluations {}  archive {}  hypervolume {:.6e}\n", run.evaluations, run.archive.size(), hv);
  const auto rows = sorted_by_ssr(run.archive);
  std::vector<Solution> feasible;
  for (const auto& r : rows)
    if (r.feasible()) feasible.push_back(r);
  if (feasible.empty()) {
    out << "no feasible solution found\n";
  } else {
    const auto best_npv = std::max_element(feasible.begin(), feasible.end(), [](const Solution& x, const Solution& y) {
      return x.objectives[0] < y.objectives[0];
    });
    out << "max-NPV end: " << describe_solution(space, *best_npv) << "\n";
    out << "max-SSR end: " << describe_solution(space, feasible.back()) << "\n";
  }
  out << fmt::format("wrote {}\n", archive_path.string());

  if (!a.report_out.empty()) {
    RunReport rep;
    rep.command = "optimize";
    rep.scenario_digest = s.scenario.digest;
    rep.seed = s.seed;
    rep.cost_scenario = to_string(s.cost);
    rep.archive_path = archive_path.string();
    rep.evaluations = run.evaluations;
    rep.labels = {{"case", label}, {"algorithm", a.algo}};
    rep.metrics = {{"hypervolume", hv},
                   {"reference_npv", ref[0]},
                   {"reference_ssr", ref[1]},
                   {"min_ssr", s.problem->min_ssr()},
                   {"archive_size", static_cast<double>(run.archive.size())}};
    rep.timings = {{"optimize", run.wall_seconds}, {"total", seconds_since(t0)}};
    rep.write(a.report_out);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string config;
  std::string sizing_case = "1";
  std::string cost;
  long long budget = -1;
  long long seed = -1;
  double min_ssr = -1.0;
  int runs = 5;
  int threads = 0;
  std::string out;
  std::string report_out;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  if (a.runs < 1) throw ConfigError("--runs", "must be at least 1");
  const OptimizeSetup s = setup_optimize(a.config, a.sizing_case, a.cost, a.budget, a.seed, a.min_ssr, a.threads);
  const std::string label = case_label(s.sizing_case, s.cost);
  const fs::path dir = a.out.empty() ? output_dir() / fmt::format("compare_{}", label) : fs::path(a.out);
  fs::create_directories(dir);
  const Objectives ref = hypervolume_reference(*s.problem);
  const auto names = s.problem->space().names();

  struct Row {
    std::string algo;
    int run;
    std::uint64_t seed;
    std::size_t evaluations;
    std::size_t archive_size;
    double hv;
    double seconds;
  };
  std::vector<Row> rows;
  for (const std::string algo : {"momfa", "nsga2"}) {
    for (int r = 1; r <= a.runs; ++r) {
      // Both algorithms see the same derived seed for run r.
      const std::uint64_t seed = stream_seed(s.seed, 0, static_cast<std::uint64_t>(r));
      const RunResult run = run_algorithm(algo, s, seed);
      write_archive_csv(dir / fmt::format("{}_run{}.csv", algo, r), run.archive, names);
      rows.push_back({algo, r, seed, run.evaluations, run.archive.size(), hypervolume(run.archive, ref),
                      run.wall_seconds});
      out << fmt::format("{:<6} run {:>2}  evaluations {}  hypervolume {:.6e}\n", algo, r, run.evaluations,
                         rows.back().hv);
    }
  }
  if (rows.front().evaluations != rows.back().evaluations)
    throw std::runtime_error("algorithms spent different evaluation counts");

  std::string text = "algorithm,run,seed,evaluations,archive_size,hypervolume\n";
  std::map<std::string, std::vector<double>> by_algo;
  for (const auto& r : rows) {
    fmt::format_to(std::back_inserter(text), "{},{},{},{},{},{:.9e}\n", r.algo, r.run, r.seed, r.evaluations,
                   r.archive_size, r.hv);
    by_algo[r.algo].push_back(r.hv);
  }
  const double med_momfa = median(by_algo["momfa"]);
  const double med_nsga2 = median(by_algo["nsga2"]);
  fmt::format_to(std::back_inserter(text), "momfa,median,,{},,{:.9e}\n", s.budget, med_momfa);
  fmt::format_to(std::back_inserter(text), "nsga2,median,,{},,{:.9e}\n", s.budget, med_nsga2);
  {
    std::ofstream f(dir / "summary.csv", std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error(fmt::format("failed writing {}", (dir / "summary.csv").string()));
  }
  out << fmt::format("median hypervolume  momfa {:.6e}  nsga2 {:.6e}\n", med_momfa, med_nsga2);
  out << fmt::format("reference point  npv {:.2f}  ssr {:.1f}\n", ref[0], ref[1]);
  out << fmt::format("wrote {}\n", dir.string());

  if (!a.report_out.empty()) {
    RunReport rep;
    rep.command = "compare";
    rep.scenario_digest = s.scenario.digest;
    rep.seed = s.seed;
    rep.cost_scenario = to_string(s.cost);
    rep.archive_path = dir.string();
    rep.evaluations = s.budget;
    rep.labels = {{"case", label}};
    rep.metrics = {{"median_hypervolume_momfa", med_momfa},
                   {"median_hypervolume_nsga2", med_nsga2},
                   {"reference_npv", ref[0]},
                   {"runs", static_cast<double>(a.runs)}};
    for (const auto& r : rows) rep.timings.push_back({fmt::format("{}_run{}", r.algo, r.run), r.seconds});
    rep.timings.push_back({"total", seconds_since(t0)});
    rep.write(a.report_out);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"PV microgrid storage sizing: simulation and multi-objective optimization", "ressize"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write synthetic pv.csv and load.csv and print monthly totals");
  c_synth->add_option("--pv-profile", synth.pv_profile, "PV generator key=value list (preset, annual_kwh_per_kwp, ...)");
  c_synth->add_option("--load-profile", synth.load_profile, "Load generator key=value list (annual_kwh, ...)");
  c_synth->add_option("--seed", synth.seed, "Seed for both generators unless set in the lists");
  c_synth->add_option("--out", synth.out, "Output directory");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate one sizing over the horizon and price it");
  c_sim->add_option("--config", sim.config, "Scenario JSON file");
  c_sim->add_option("--strategy", sim.strategy, "cs or olds (default: scenario)");
  c_sim->add_option("--sizing", sim.sizing, "Inline key=value list or a sizing file");
  c_sim->add_option("--cost", sim.cost, "current or ultimate");
  c_sim->add_option("--ledger-out", sim.ledger_out, "Hourly ledger CSV");
  c_sim->add_option("--cashflow-out", sim.cashflow_out, "Yearly cashflow CSV");
  c_sim->add_option("--report-out", sim.report_out, "Run report JSON");

  OptimizeArgs opt;
  auto* c_opt = app.add_subcommand("optimize", "Search the sizing space for the NPV/SSR Pareto front");
  c_opt->add_option("--config", opt.config, "Scenario JSON file");
  c_opt->add_option("--case", opt.sizing_case, "1, 2 or 3, optionally suffixed C or U");
  c_opt->add_option("--cost", opt.cost, "current or ultimate");
  c_opt->add_option("--algo", opt.algo, "momfa or nsga2");
  c_opt->add_option("--budget", opt.budget, "Objective evaluations");
  c_opt->add_option("--seed", opt.seed, "Run seed");
  c_opt->add_option("--min-ssr", opt.min_ssr, "Minimum SSR constraint");
  c_opt->add_option("--threads", opt.threads, "Evaluation workers");
  c_opt->add_option("--out", opt.out, "Archive CSV");
  c_opt->add_option("--telemetry-out", opt.telemetry_out, "Per-iteration hypervolume CSV");
  c_opt->add_option("--report-out", opt.report_out, "Run report JSON");

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Run both optimizers repeatedly with equal budgets");
  c_cmp->add_option("--config", cmp.config, "Scenario JSON file");
  c_cmp->add_option("--case", cmp.sizing_case, "1, 2 or 3, optionally suffixed C or U");
  c_cmp->add_option("--cost", cmp.cost, "current or ultimate");
  c_cmp->add_option("--budget", cmp.budget, "Objective evaluations per run");
  c_cmp->add_option("--runs", cmp.runs, "Runs per algorithm");
  c_cmp->add_option("--seed", cmp.seed, "Base seed");
  c_cmp->add_option("--min-ssr", cmp.min_ssr, "Minimum SSR constraint");
  c_cmp->add_option("--threads", cmp.threads, "Evaluation workers");
  c_cmp->add_option("--out", cmp.out, "Output directory");
  c_cmp->add_option("--report-out", cmp.report_out, "Run report JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (c_synth->parsed()) return cmd_synth(synth, out);
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_opt->parsed()) return cmd_optimize(opt, out);
    if (c_cmp->parsed()) return cmd_compare(cmp, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EvaluationError& e) {
    std::string x;
    for (Eigen::Index i = 0; i < e.decision().size(); ++i) x += fmt::format("{}{:.6f}", i ? "," : "", e.decision()[i]);
    err << "evaluation failed at x=[" << x << "]: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace ressize
