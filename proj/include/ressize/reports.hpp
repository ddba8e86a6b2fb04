#pragma once

#include "ressize/dispatch.hpp"
#include "ressize/economics.hpp"
#include "ressize/optimizer.hpp"
#include "ressize/sizing_problem.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace ressize {

/// Streams the hourly ledger as `year,hour,band,pv,charge,discharge,import,level`.
class LedgerCsvWriter {
public:
  explicit LedgerCsvWriter(const std::filesystem::path& path);
  ~LedgerCsvWriter();
  LedgerCsvWriter(const LedgerCsvWriter&) = delete;
  LedgerCsvWriter& operator=(const LedgerCsvWriter&) = delete;

  void operator()(int year, int hour_of_year, const HourLedger& row);
  LedgerSink sink();
  /// Flushes buffered rows; throws if the write failed.
  void close();

private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::string buffer_;
};

/// Re-checks AC balance and storage conservation on a ledger stream.
class LedgerAudit {
public:
  /// `hydrogen` selects the tank mass balance; otherwise battery energy is audited.
  LedgerAudit(double inverter_efficiency, bool hydrogen, double initial_level, double tolerance = 1e-9);
  void operator()(int year, int hour_of_year, const HourLedger& row);
  LedgerSink sink();

  std::size_t hours() const { return hours_; }
  std::size_t failures() const { return failures_; }
  double worst_balance() const { return worst_balance_; }
  double worst_level() const { return worst_level_; }
  bool passed() const { return hours_ > 0 && failures_ == 0; }

private:
  double eta_;
  bool hydrogen_;
  double level_;
  double tol_;
  std::size_t hours_ = 0;
  std::size_t failures_ = 0;
  double worst_balance_ = 0.0;
  double worst_level_ = 0.0;
};

/// Solutions sorted by SSR ascending, then NPV descending.
std::vector<Solution> sorted_by_ssr(const ParetoArchive& archive);

/// One row per archived solution: decision variables, `npv,ssr,rank`.
void write_archive_csv(const std::filesystem::path& path, const ParetoArchive& archive,
                       const std::vector<std::string>& variable_names);

/// `iteration,evaluations,archive_size,hypervolume` with a fixed reference point.
void write_telemetry_csv(const std::filesystem::path& path, const std::vector<IterationStat>& trace,
                         const Objectives& reference);

/// Hypervolume reference for a sizing problem: NPV of the all-upper-bound system with zero revenue, SSR 0.
/// Every reachable solution dominates it because savings are never negative.
Objectives hypervolume_reference(const SizingProblem& problem);

struct TimingEntry {
  std::string name;
  double seconds = 0.0;
};

/// JSON summary of one command run.
struct RunReport {
  std::string command;
  std::string scenario_digest;
  std::uint64_t seed = 0;
  std::string cost_scenario;
  std::optional<EconomicSummary> economics;
  std::optional<SimulationResult> simulation;
  std::optional<std::string> archive_path;
  std::size_t evaluations = 0;
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<TimingEntry> timings;

  std::string to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace ressize
