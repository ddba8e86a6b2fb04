#pragma once

#include "ressize/dispatch.hpp"
#include "ressize/economics.hpp"
#include "ressize/optimizer.hpp"
#include "ressize/sizing_problem.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace ressize {

struct OptimizerSettings {
  MomfaParams momfa;
  Nsga2Params nsga2;
  std::size_t budget = 2000;
  std::uint64_t seed = 1;
  double min_ssr = 0.0;
};

/// Fully resolved scenario: every default filled in and validated.
struct Scenario {
  SimulationInputs inputs;
  CostBook current = CostBook::defaults(CostScenario::Current);
  CostBook ultimate = CostBook::defaults(CostScenario::Ultimate);
  double inverter_efficiency = 0.97;
  std::optional<SystemSizing> sizing;
  StrategyConfig strategy;
  SizingBounds bounds;
  OptimizerSettings optimizer;

  /// Canonical JSON of the resolved parameters.
  std::string resolved_json;
  /// Hash of the resolved parameters and series data.
  std::string digest;

  const CostBook& costbook(CostScenario s) const { return s == CostScenario::Current ? current : ultimate; }
  /// Inputs with stack replacement years taken from the chosen cost book.
  SimulationInputs inputs_for(CostScenario s) const;
};

/// Parses and validates a scenario file; relative data paths resolve against its directory.
/// Throws ConfigError with a dotted field path on any problem.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir);

/// Scenario built entirely from defaults (synthetic tropical profiles).
Scenario default_scenario();

/// Parses "key=value,key=value" sizing text or a sizing file (JSON object or key/value lines).
SystemSizing parse_sizing(const std::string& spec, double inverter_efficiency);

/// FNV-1a 64-bit hash rendered as 16 hex digits.
std::string fnv1a_hex(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace ressize
