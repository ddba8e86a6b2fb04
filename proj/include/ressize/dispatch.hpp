#pragma once

#include "ressize/profiles.hpp"
#include "ressize/storage.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ressize {

enum class Component : std::uint8_t { Pv, Battery, Electrolyser, Tank, FuelCell };
inline constexpr std::array<Component, 5> kAllComponents = {Component::Pv, Component::Battery,
                                                           Component::Electrolyser, Component::Tank,
                                                           Component::FuelCell};
const char* to_string(Component c);

struct BatterySizing {
  double battery_kwh = 0.0;
};

struct HydrogenSizing {
  double el_kw = 0.0;
  double tank_kg = 0.0;
  double fc_kw = 0.0;
};

struct SystemSizing {
  double pv_kwp = 0.0;
  std::variant<BatterySizing, HydrogenSizing> storage = BatterySizing{};
  double inverter_efficiency = 0.97;

  bool hydrogen() const { return std::holds_alternative<HydrogenSizing>(storage); }
  /// Rated size of `c` in its cost unit (kWp, kWh, kW, kg); 0 when absent.
  double size_of(Component c) const;
  void validate() const;
};

enum class StrategyMode : std::uint8_t { Conventional, Olds };

/// Calendar point inside a 365-day year.
struct WindowPoint {
  int day_of_year = 1;  // 1..365
  int hour = 0;         // 0..23

  int hour_of_year() const { return (day_of_year - 1) * kHoursPerDay + hour; }
  static WindowPoint from_hour_of_year(int h) { return {h / kHoursPerDay + 1, h % kHoursPerDay}; }
};

struct StrategyConfig {
  StrategyMode mode = StrategyMode::Conventional;
  WindowPoint window_start{1, 0};
  WindowPoint window_end{kDaysPerYear, kHoursPerDay - 1};
  double limit_sunny = 0.0;   // fraction of tank capacity inside the window
  double limit_cloudy = 0.0;  // fraction of tank capacity outside the window

  bool in_window(int hour_of_year) const;
  double active_limit(int hour_of_year) const;
  void validate() const;
};

struct HydrogenStates {
  std::optional<StackState> electrolyser;
  TankState tank;
  std::optional<StackState> fuel_cell;
};

using StorageStates = std::variant<BatteryState, HydrogenStates>;

struct HourLedger {
  double load = 0.0;
  double pv_generated = 0.0;
  double pv_to_load = 0.0;
  double pv_to_storage = 0.0;
  double pv_curtailed = 0.0;
  double storage_charge_power = 0.0;
  double storage_discharge_removal = 0.0;
  double storage_delivered_dc = 0.0;
  double grid_import = 0.0;
  RateBand rate_band = RateBand::OffPeak;
  double storage_level = 0.0;  // kWh or kg after the hour
  double h2_produced = 0.0;    // kg
  double h2_consumed = 0.0;    // kg
};

struct StepResult {
  StorageStates states;
  HourLedger ledger;
};

StepResult step_conventional(const SystemSizing& sizing, StorageStates states, double pv, double load, RateBand band,
                             double dt = 1.0);
StepResult step_olds(const SystemSizing& sizing, StorageStates states, double pv, double load, RateBand band,
                     int hour_of_year, const StrategyConfig& strategy, double dt = 1.0);

struct BatteryTechnology {
  double ep_ratio = 2.5;
  double initial_efficiency = 0.95;
  double annual_fade = 0.029;
  int lifetime = 12;
  double initial_soc = 0.0;  // fraction of capacity at hour 0
};

struct StackTechnology {
  std::shared_ptr<const PolarizationCurve> curve;
  double drift = 0.0;  // V/h
};

struct HydrogenTechnology {
  StackTechnology electrolyser{std::make_shared<const PolarizationCurve>(PolarizationCurve::default_electrolyser()),
                               10e-6};
  StackTechnology fuel_cell{std::make_shared<const PolarizationCurve>(PolarizationCurve::default_fuel_cell()),
                            -5e-6};
  double initial_fill = 0.0;  // fraction of tank capacity at hour 0
};

/// Everything except sizing and strategy that a horizon run needs.
struct SimulationInputs {
  PvPlantConfig pv;
  HourlySeries load;
  TariffSchedule tariff = TariffSchedule::standard();
  BatteryTechnology battery;
  HydrogenTechnology hydrogen;
  /// Years at whose end a component is replaced (efficiency or op_hours reset).
  std::vector<int> battery_replacements{12};
  std::vector<int> electrolyser_replacements{15};
  std::vector<int> fuel_cell_replacements{5, 10, 15, 20};
  int horizon_years = kDefaultHorizonYears;

  void validate() const;
};

StorageStates initial_states(const SimulationInputs& inputs, const SystemSizing& sizing);

struct YearFlows {
  std::array<double, kBandCount> import_by_band{};  // kWh
  double load = 0.0;
  double import = 0.0;
  double pv = 0.0;
  double curtailed = 0.0;
  double charged = 0.0;
  double delivered = 0.0;
  double h2_produced = 0.0;
  double h2_consumed = 0.0;
};

struct ReplacementEvent {
  Component component;
  int year;
};

/// Health at the start and end of each year; start values follow any replacement.
struct HealthSample {
  int year = 0;
  double electrolyser_soh_start = 1.0, electrolyser_soh_end = 1.0;
  double fuel_cell_soh_start = 1.0, fuel_cell_soh_end = 1.0;
  double battery_efficiency_start = 0.0, battery_efficiency_end = 0.0;
};

struct SimulationResult {
  std::vector<YearFlows> years;
  std::vector<ReplacementEvent> replacements;
  std::vector<HealthSample> health;
  double initial_level = 0.0;
  double final_level = 0.0;

  int horizon() const { return static_cast<int>(years.size()); }
  double total_load() const;
  double total_import() const;
  double total_curtailed() const;
};

using LedgerSink = std::function<void(int year, int hour_of_year, const HourLedger&)>;

SimulationResult simulate_horizon(const SimulationInputs& inputs, const SystemSizing& sizing,
                                  const StrategyConfig& strategy, const LedgerSink& sink = {});

}  // namespace ressize
