#include "ressize/cli.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <json.hpp>

#include <cstdlib>
#include <regex>
#include <set>
#include <sstream>

using namespace ressize;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string default_config() { return (testutil::source_dir() / "scenarios" / "default.json").string(); }

double printed(const std::string& text, const std::string& key) {
  const std::regex re("(^|\n)" + key + " (-?[0-9.]+)");
  std::smatch m;
  REQUIRE(std::regex_search(text, m, re));
  return std::stod(m[2]);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(testutil::read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

TEST_SUITE("cli basics") {
  TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({}).code == kExitConfig);
    CHECK(run({"frobnicate"}).code == kExitConfig);
    CHECK(run({"simulate", "--no-such-flag"}).code == kExitConfig);
  }

  TEST_CASE("config errors exit 2 with a field path") {
    const auto dir = testutil::scratch_dir("cli_config");
    testutil::write_file(dir / "bad.json", R"({"battery": {"ep_ratio": -1}})");
    const auto r = run({"simulate", "--config", (dir / "bad.json").string(), "--sizing", "pv_kwp=1,battery_kwh=1"});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("battery.ep_ratio") != std::string::npos);
    CHECK(run({"simulate", "--config", (dir / "missing.json").string(), "--sizing", "pv_kwp=1"}).code == kExitConfig);
    CHECK(run({"optimize", "--case", "4"}).code == kExitConfig);
    CHECK(run({"optimize", "--case", "1C", "--cost", "ultimate"}).code == kExitConfig);
    CHECK(run({"optimize", "--algo", "pso", "--budget", "40"}).code == kExitConfig);
    CHECK(run({"compare", "--runs", "0"}).code == kExitConfig);
  }

  TEST_CASE("runtime failures exit 3") {
    const auto dir = testutil::scratch_dir("cli_runtime");
    testutil::write_file(dir / "blocker", "x");
    const auto r = run({"synth", "--out", (dir / "blocker" / "sub").string()});
    CHECK(r.code == kExitRuntime);
  }
}

TEST_SUITE("synth") {
  TEST_CASE("presets and determinism") {
    const auto dir = testutil::scratch_dir("cli_synth");
    const auto a = run({"synth", "--pv-profile", "preset=tropical", "--seed", "7", "--out", (dir / "a").string()});
    REQUIRE(a.code == kExitOk);
    const auto b = run({"synth", "--pv-profile", "preset=tropical", "--seed", "7", "--out", (dir / "b").string()});
    CHECK(testutil::read_file(dir / "a" / "pv.csv") == testutil::read_file(dir / "b" / "pv.csv"));
    CHECK(testutil::read_file(dir / "a" / "load.csv") == testutil::read_file(dir / "b" / "load.csv"));
    CHECK(printed(a.out, "pv max/min monthly ratio") < 1.5);
    CHECK(a.out.find("Dec") != std::string::npos);

    const auto s = run({"synth", "--pv-profile", "preset=subtropical", "--out", (dir / "s").string()});
    REQUIRE(s.code == kExitOk);
    CHECK(printed(s.out, "pv max/min monthly ratio") >= 3.0);
    CHECK(s.out.find("(peak Dec)") != std::string::npos);
    CHECK(run({"synth", "--pv-profile", "preset=polar", "--out", (dir / "x").string()}).code == kExitConfig);
  }

  TEST_CASE("output directory from the environment") {
    const auto dir = testutil::scratch_dir("cli_env");
    ::setenv("RESSIZE_OUT_DIR", dir.c_str(), 1);
    const auto r = run({"synth"});
    ::unsetenv("RESSIZE_OUT_DIR");
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(dir / "pv.csv"));
  }
}

TEST_SUITE("simulate") {
  TEST_CASE("zero sizing prints zero NPV and SSR") {
    const auto r = run({"simulate", "--config", default_config(), "--sizing", "pv_kwp=0,battery_kwh=0"});
    REQUIRE(r.code == kExitOk);
    CHECK(printed(r.out, "NPV") == 0.0);
    CHECK(printed(r.out, "SSR") == 0.0);
    CHECK(r.out.find("NPV 0.00\n") != std::string::npos);
    CHECK(r.out.find("SSR 0.000000\n") != std::string::npos);
    CHECK(r.out.find("  25 ") != std::string::npos);
  }

  TEST_CASE("OLDS with battery sizing is a config error") {
    const auto r = run({"simulate", "--strategy", "olds", "--sizing", "pv_kwp=100,battery_kwh=100"});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("strategy") != std::string::npos);
  }

  TEST_CASE("OLDS at zero limits prints what CS prints") {
    const std::string sizing = "pv_kwp=1500,el_kw=500,tank_kg=200,fc_kw=300";
    const auto cs = run({"simulate", "--config", default_config(), "--strategy", "cs", "--sizing", sizing});
    const auto olds = run({"simulate", "--config", default_config(), "--strategy", "olds", "--sizing", sizing});
    REQUIRE(cs.code == kExitOk);
    CHECK(olds.code == kExitOk);
    CHECK(cs.out == olds.out);
  }

  TEST_CASE("table sizing file, ledger, cashflow and report") {
    const auto dir = testutil::scratch_dir("cli_simulate");
    testutil::write_file(dir / "sizing.csv", "component,value\npv_kwp,1800\nel_kw,600\ntank_kg,300\nfc_kw,350\n");
    const auto r = run({"simulate", "--config", default_config(), "--sizing", (dir / "sizing.csv").string(),
                        "--ledger-out", (dir / "ledger.csv").string(), "--cashflow-out", (dir / "cf.csv").string(),
                        "--report-out", (dir / "report.json").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("ledger audit pass (219000 hours") != std::string::npos);
    CHECK(r.out.find("replacement fuel_cell year 5") != std::string::npos);

    const auto ledger = read_csv(dir / "ledger.csv");
    REQUIRE(ledger.size() == 219001);
    CHECK(ledger[0] == std::vector<std::string>{"year", "hour", "band", "pv", "charge", "discharge", "import", "level"});
    std::set<std::string> bands;
    for (std::size_t i = 1; i < ledger.size(); ++i) bands.insert(ledger[i][2]);
    CHECK(bands == std::set<std::string>{"offpeak", "peak", "shoulder"});

    const auto cf = read_csv(dir / "cf.csv");
    CHECK(cf.size() == 27);

    const auto report = nlohmann::json::parse(testutil::read_file(dir / "report.json"));
    CHECK(report["command"] == "simulate");
    CHECK(report["ledger_audit"] == "pass");
    CHECK(report["economics"]["npv"].get<double>() == doctest::Approx(printed(r.out, "NPV")).epsilon(1e-6));
    CHECK(report["scenario_digest"].get<std::string>().size() == 16);
  }
}

TEST_SUITE("optimize") {
  TEST_CASE("case 3 archive has eight variable columns") {
    const auto dir = testutil::scratch_dir("cli_case3");
    const auto r = run({"optimize", "--config", default_config(), "--case", "3", "--budget", "80", "--out",
                        (dir / "a.csv").string()});
    REQUIRE(r.code == kExitOk);
    const auto rows = read_csv(dir / "a.csv");
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == std::vector<std::string>{"pv_kwp", "el_kw", "tank_kg", "fc_kw", "t_start", "t_end",
                                              "limit_sunny", "limit_cloudy", "npv", "ssr", "rank"});
    CHECK(r.out.find("max-NPV end") != std::string::npos);
  }

  TEST_CASE("minimum SSR holds for every archived solution") {
    const auto dir = testutil::scratch_dir("cli_minssr");
    const auto r = run({"optimize", "--config", default_config(), "--case", "1C", "--budget", "400", "--min-ssr",
                        "0.8", "--out", (dir / "a.csv").string()});
    REQUIRE(r.code == kExitOk);
    const auto rows = read_csv(dir / "a.csv");
    const std::size_t ssr = column(rows[0], "ssr");
    REQUIRE(rows.size() >= 2);
    double prev = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double v = std::stod(rows[i][ssr]);
      CHECK(v >= 0.8);
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("same seed gives identical archive CSVs") {
    const auto dir = testutil::scratch_dir("cli_seed");
    for (const char* algo : {"momfa", "nsga2"}) {
      for (const char* name : {"a.csv", "b.csv"}) {
        const auto r = run({"optimize", "--config", default_config(), "--case", "2U", "--algo", algo, "--budget",
                            "120", "--seed", "1", "--out", (dir / name).string(), "--telemetry-out",
                            (dir / (std::string(name) + ".tel")).string()});
        REQUIRE(r.code == kExitOk);
      }
      CHECK(testutil::read_file(dir / "a.csv") == testutil::read_file(dir / "b.csv"));
      CHECK(testutil::read_file(dir / "a.csv.tel") == testutil::read_file(dir / "b.csv.tel"));
    }
    ::setenv("RESSIZE_THREADS", "3", 1);
    const auto r = run({"optimize", "--config", default_config(), "--case", "2U", "--algo", "nsga2", "--budget", "120",
                        "--seed", "1", "--out", (dir / "c.csv").string()});
    ::unsetenv("RESSIZE_THREADS");
    REQUIRE(r.code == kExitOk);
    CHECK(testutil::read_file(dir / "a.csv") == testutil::read_file(dir / "c.csv"));
  }

  TEST_CASE("telemetry and report") {
    const auto dir = testutil::scratch_dir("cli_telemetry");
    const auto r = run({"optimize", "--config", default_config(), "--budget", "120", "--out", (dir / "a.csv").string(),
                        "--telemetry-out", (dir / "t.csv").string(), "--report-out", (dir / "r.json").string()});
    REQUIRE(r.code == kExitOk);
    const auto t = read_csv(dir / "t.csv");
    CHECK(t[0] == std::vector<std::string>{"iteration", "evaluations", "archive_size", "hypervolume"});
    CHECK(t.back()[1] == "120");
    const auto report = nlohmann::json::parse(testutil::read_file(dir / "r.json"));
    CHECK(report["command"] == "optimize");
    CHECK(report["evaluations"] == 120);
  }
}

TEST_SUITE("compare") {
  TEST_CASE("file contract, equal budgets and medians") {
    const auto dir = testutil::scratch_dir("cli_compare");
    const auto r = run({"compare", "--config", default_config(), "--case", "1", "--budget", "80", "--runs", "3",
                        "--out", (dir / "cmp").string()});
    REQUIRE(r.code == kExitOk);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir / "cmp")) {
      (void)e;
      ++files;
    }
    CHECK(files == 7);
    const auto rows = read_csv(dir / "cmp" / "summary.csv");
    REQUIRE(rows.size() == 1 + 6 + 2);
    CHECK(rows[0] == std::vector<std::string>{"algorithm", "run", "seed", "evaluations", "archive_size", "hypervolume"});
    std::map<std::string, std::vector<double>> hv;
    std::set<std::string> evals;
    std::map<int, std::set<std::string>> seeds_by_run;
    for (std::size_t i = 1; i <= 6; ++i) {
      hv[rows[i][0]].push_back(std::stod(rows[i][5]));
      evals.insert(rows[i][3]);
      seeds_by_run[std::stoi(rows[i][1])].insert(rows[i][2]);
    }
    CHECK(evals == std::set<std::string>{"80"});
    CHECK(seeds_by_run.size() == 3);
    for (const auto& [run_no, seeds] : seeds_by_run) CHECK(seeds.size() == 1);
    for (std::size_t i = 7; i <= 8; ++i) {
      auto v = hv[rows[i][0]];
      std::sort(v.begin(), v.end());
      CHECK(rows[i][1] == "median");
      CHECK(std::stod(rows[i][5]) == doctest::Approx(v[1]).epsilon(1e-8));
    }
  }
}
