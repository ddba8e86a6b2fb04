#include "ressize/reports.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace ressize {

using ojson = nlohmann::ordered_json;

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

void write_all(const std::filesystem::path& path, const std::string& text) {
  auto out = open_for_write(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Ledger CSV

LedgerCsvWriter::LedgerCsvWriter(const std::filesystem::path& path) : path_(path), out_(open_for_write(path)) {
  buffer_ = "year,hour,band,pv,charge,discharge,import,level\n";
}

LedgerCsvWriter::~LedgerCsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void LedgerCsvWriter::operator()(int year, int hour_of_year, const HourLedger& r) {
  fmt::format_to(std::back_inserter(buffer_), "{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", year, hour_of_year,
                 to_string(r.rate_band), r.pv_generated, r.storage_charge_power, r.storage_discharge_removal,
                 r.grid_import, r.storage_level);
  if (buffer_.size() > (1u << 20)) {
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
  }
}

LedgerSink LedgerCsvWriter::sink() {
  return [this](int y, int h, const HourLedger& r) { (*this)(y, h, r); };
}

void LedgerCsvWriter::close() {
  if (!out_.is_open()) return;
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_.clear();
  out_.close();
  if (!out_) throw std::runtime_error(fmt::format("failed writing {}", path_.string()));
}

// ---------------------------------------------------------------------------
// Ledger audit

LedgerAudit::LedgerAudit(double inverter_efficiency, bool hydrogen, double initial_level, double tolerance)
    : eta_(inverter_efficiency), hydrogen_(hydrogen), level_(initial_level), tol_(tolerance) {}

void LedgerAudit::operator()(int, int, const HourLedger& r) {
  ++hours_;
  bool ok = true;
  const double supplied = eta_ * (r.pv_to_load + r.storage_delivered_dc) + r.grid_import;
  const double balance = std::abs(r.load - supplied) / std::max(1.0, std::abs(r.load));
  worst_balance_ = std::max(worst_balance_, balance);
  ok = ok && balance <= tol_;

  const double inflow = hydrogen_ ? r.h2_produced : r.storage_charge_power;
  const double outflow = hydrogen_ ? r.h2_consumed : r.storage_discharge_removal;
  const double expected = level_ + inflow - outflow;
  const double level_err =
      std::abs(r.storage_level - expected) / std::max({1.0, std::abs(level_), std::abs(r.storage_level)});
  worst_level_ = std::max(worst_level_, level_err);
  ok = ok && level_err <= tol_;
  level_ = r.storage_level;

  const double surplus = std::max(r.pv_generated - r.load / eta_, 0.0);
  ok = ok && r.storage_charge_power <= surplus + 1e-12 * std::max(1.0, surplus);
  for (double v : {r.pv_generated, r.pv_to_load, r.pv_to_storage, r.pv_curtailed, r.storage_charge_power,
                   r.storage_discharge_removal, r.storage_delivered_dc, r.grid_import, r.storage_level})
    ok = ok && v >= 0.0;
  if (!ok) ++failures_;
}

LedgerSink LedgerAudit::sink() {
  return [this](int y, int h, const HourLedger& r) { (*this)(y, h, r); };
}

// ---------------------------------------------------------------------------
// Archive and telemetry

std::vector<Solution> sorted_by_ssr(const ParetoArchive& archive) {
  std::vector<Solution> rows = archive.entries();
  std::stable_sort(rows.begin(), rows.end(), [](const Solution& a, const Solution& b) {
    if (a.objectives[1] != b.objectives[1]) return a.objectives[1] < b.objectives[1];
    return a.objectives[0] > b.objectives[0];
  });
  return rows;
}

void write_archive_csv(const std::filesystem::path& path, const ParetoArchive& archive,
                       const std::vector<std::string>& variable_names) {
  std::string text;
  for (const auto& n : variable_names) text += n + ",";
  text += "npv,ssr,rank\n";
  for (const auto& s : sorted_by_ssr(archive)) {
    if (static_cast<std::size_t>(s.x.size()) != variable_names.size())
      throw std::invalid_argument("archive entry dimension differs from the variable names");
    for (Eigen::Index i = 0; i < s.x.size(); ++i) fmt::format_to(std::back_inserter(text), "{:.6f},", s.x[i]);
    fmt::format_to(std::back_inserter(text), "{:.6f},{:.9f},{}\n", s.objectives[0], s.objectives[1], s.rank);
  }
  write_all(path, text);
}

void write_telemetry_csv(const std::filesystem::path& path, const std::vector<IterationStat>& trace,
                         const Objectives& reference) {
  std::string text = "iteration,evaluations,archive_size,hypervolume\n";
  for (const auto& t : trace)
    fmt::format_to(std::back_inserter(text), "{},{},{},{:.9e}\n", t.iteration, t.evaluations, t.archive_size,
                   hypervolume(t.front, reference));
  write_all(path, text);
}

Objectives hypervolume_reference(const SizingProblem& problem) {
  const SystemSizing upper = problem.sizing_of(problem.space().upper());
  const auto cf = cost_schedule(problem.costbook(), upper, problem.inputs().horizon_years,
                                problem.inputs().battery.ep_ratio);
  const auto pv = npv_npc(cf, problem.costbook().discount_rate);
  return Objectives(-pv.npc, 0.0);
}

// ---------------------------------------------------------------------------
// Run report

namespace {

ojson array_of(const Eigen::ArrayXd& a) { return ojson(std::vector<double>(a.data(), a.data() + a.size())); }

}  // namespace

std::string RunReport::to_json() const {
  ojson j;
  j["command"] = command;
  j["scenario_digest"] = scenario_digest;
  j["seed"] = seed;
  if (!cost_scenario.empty()) j["cost_scenario"] = cost_scenario;
  for (const auto& [k, v] : labels) j[k] = v;
  if (economics) {
    j["economics"] = {{"npc", economics->npc},
                      {"npv", economics->npv},
                      {"ssr", economics->ssr},
                      {"bills_baseline", array_of(economics->bills_baseline)},
                      {"bills_system", array_of(economics->bills_system)}};
  }
  if (simulation) {
    const auto& s = *simulation;
    ojson reps = ojson::array();
    for (const auto& r : s.replacements) reps.push_back({{"component", to_string(r.component)}, {"year", r.year}});
    ojson years = ojson::array();
    for (std::size_t y = 0; y < s.years.size(); ++y) {
      const auto& f = s.years[y];
      years.push_back({{"year", y + 1},
                       {"load_kwh", f.load},
                       {"import_kwh", f.import},
                       {"import_peak_kwh", f.import_by_band[0]},
                       {"import_shoulder_kwh", f.import_by_band[1]},
                       {"import_off_peak_kwh", f.import_by_band[2]},
                       {"pv_kwh", f.pv},
                       {"curtailed_kwh", f.curtailed}});
    }
    ojson health = ojson::array();
    for (const auto& h : s.health)
      health.push_back({{"year", h.year},
                        {"electrolyser_soh_end", h.electrolyser_soh_end},
                        {"fuel_cell_soh_end", h.fuel_cell_soh_end},
                        {"battery_efficiency_end", h.battery_efficiency_end}});
    j["simulation"] = {{"horizon_years", s.horizon()},
                       {"total_load_kwh", s.total_load()},
                       {"total_import_kwh", s.total_import()},
                       {"total_curtailed_kwh", s.total_curtailed()},
                       {"initial_level", s.initial_level},
                       {"final_level", s.final_level},
                       {"replacements", reps},
                       {"years", years},
                       {"health", health}};
  }
  if (archive_path) j["archive"] = *archive_path;
  if (evaluations) j["evaluations"] = evaluations;
  if (!metrics.empty()) {
    ojson m;
    for (const auto& [k, v] : metrics) m[k] = v;
    j["metrics"] = m;
  }
  ojson t;
  for (const auto& e : timings) t[e.name] = e.seconds;
  j["wall_seconds"] = t;
  return j.dump(2) + "\n";
}

void RunReport::write(const std::filesystem::path& path) const { write_all(path, to_json()); }

}  // namespace ressize
