#include "ressize/dispatch.hpp"

#include "ressize/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ressize {

const char* to_string(Component c) {
  switch (c) {
    case Component::Pv: return "pv";
    case Component::Battery: return "battery";
    case Component::Electrolyser: return "electrolyser";
    case Component::Tank: return "tank";
    case Component::FuelCell: return "fuel_cell";
  }
  return "?";
}

double SystemSizing::size_of(Component c) const {
  if (c == Component::Pv) return pv_kwp;
  if (const auto* b = std::get_if<BatterySizing>(&storage)) return c == Component::Battery ? b->battery_kwh : 0.0;
  const auto& h = std::get<HydrogenSizing>(storage);
  switch (c) {
    case Component::Electrolyser: return h.el_kw;
    case Component::Tank: return h.tank_kg;
    case Component::FuelCell: return h.fc_kw;
    default: return 0.0;
  }
}

void SystemSizing::validate() const {
  auto check = [](double v, const char* path) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(path, "size must be finite and non-negative");
  };
  check(pv_kwp, "sizing.pv_kwp");
  if (const auto* b = std::get_if<BatterySizing>(&storage)) {
    check(b->battery_kwh, "sizing.battery_kwh");
  } else {
    const auto& h = std::get<HydrogenSizing>(storage);
    check(h.el_kw, "sizing.el_kw");
    check(h.tank_kg, "sizing.tank_kg");
    check(h.fc_kw, "sizing.fc_kw");
  }
  if (!(inverter_efficiency > 0.0 && inverter_efficiency <= 1.0))
    throw ConfigError("inverter_efficiency", "must lie in (0, 1]");
}

bool StrategyConfig::in_window(int hour_of_year) const {
  const int s = window_start.hour_of_year();
  const int e = window_end.hour_of_year();
  if (s <= e) return hour_of_year >= s && hour_of_year <= e;
  return hour_of_year >= s || hour_of_year <= e;
}

double StrategyConfig::active_limit(int hour_of_year) const {
  return in_window(hour_of_year) ? limit_sunny : limit_cloudy;
}

void StrategyConfig::validate() const {
  auto check_point = [](const WindowPoint& p, const char* path) {
    if (p.day_of_year < 1 || p.day_of_year > kDaysPerYear || p.hour < 0 || p.hour >= kHoursPerDay)
      throw ConfigError(path, "window point outside the year");
  };
  check_point(window_start, "strategy.window_start");
  check_point(window_end, "strategy.window_end");
  if (!(limit_sunny >= 0.0 && limit_sunny <= 1.0)) throw ConfigError("strategy.limit_sunny", "must lie in [0, 1]");
  if (!(limit_cloudy >= 0.0 && limit_cloudy <= 1.0)) throw ConfigError("strategy.limit_cloudy", "must lie in [0, 1]");
}

namespace {

struct HourInputs {
  double eta, pv, load, dt;
  RateBand band;
};

// Shared by both strategies so that OLDS with an inactive limit follows the identical arithmetic.
inline void step_core(BatteryState& b, const HourInputs& in, bool allow_discharge, HourLedger& out) {
  const double load_dc = in.load / in.eta;
  const double pv_to_load = std::min(in.pv, load_dc);
  const double surplus = in.pv - pv_to_load;
  const double deficit = load_dc - pv_to_load;
  double charge = 0.0, removal = 0.0, delivered = 0.0;
  if (surplus > 0.0) charge = detail::battery_charge_inplace(b, surplus, in.dt);
  if (deficit > 0.0 && allow_discharge) removal = detail::battery_discharge_inplace(b, deficit, in.dt, delivered);

  out.load = in.load;
  out.pv_generated = in.pv;
  out.pv_to_load = pv_to_load;
  out.pv_to_storage = charge;
  out.pv_curtailed = surplus - charge;
  out.storage_charge_power = charge;
  out.storage_discharge_removal = removal;
  out.storage_delivered_dc = delivered;
  out.grid_import = deficit - delivered > 0.0 ? std::max(in.load - in.eta * (pv_to_load + delivered), 0.0) : 0.0;
  out.rate_band = in.band;
  out.storage_level = b.energy;
  out.h2_produced = 0.0;
  out.h2_consumed = 0.0;
}

// For hydrogen the discharge "removal" is reported as the fuel-cell DC output; tank flows are in kg.
inline void step_core(HydrogenStates& h, const HourInputs& in, bool allow_discharge, HourLedger& out) {
  const double load_dc = in.load / in.eta;
  const double pv_to_load = std::min(in.pv, load_dc);
  const double surplus = in.pv - pv_to_load;
  const double deficit = load_dc - pv_to_load;
  double charge = 0.0, delivered = 0.0, produced = 0.0, consumed = 0.0;
  if (surplus > 0.0 && h.electrolyser) charge = detail::electrolyser_inplace(*h.electrolyser, h.tank, surplus, in.dt, produced);
  if (deficit > 0.0 && allow_discharge && h.fuel_cell)
    delivered = detail::fuel_cell_inplace(*h.fuel_cell, h.tank, deficit, in.dt, consumed);

  out.load = in.load;
  out.pv_generated = in.pv;
  out.pv_to_load = pv_to_load;
  out.pv_to_storage = charge;
  out.pv_curtailed = surplus - charge;
  out.storage_charge_power = charge;
  out.storage_discharge_removal = delivered;
  out.storage_delivered_dc = delivered;
  out.grid_import = deficit - delivered > 0.0 ? std::max(in.load - in.eta * (pv_to_load + delivered), 0.0) : 0.0;
  out.rate_band = in.band;
  out.storage_level = h.tank.mass;
  out.h2_produced = produced;
  out.h2_consumed = consumed;
}

inline bool olds_allows_discharge(const HydrogenStates& h, RateBand band, int hour_of_year,
                                  const StrategyConfig& strategy) {
  const double threshold = strategy.active_limit(hour_of_year) * h.tank.capacity;
  return !(h.tank.mass < threshold && band == RateBand::OffPeak);
}

void check_step_inputs(double pv, double load, double dt) {
  if (!(pv >= 0.0) || !(load >= 0.0) || !(dt > 0.0))
    throw std::invalid_argument("step inputs must be non-negative with positive dt");
}

}  // namespace

StepResult step_conventional(const SystemSizing& sizing, StorageStates states, double pv, double load, RateBand band,
                             double dt) {
  check_step_inputs(pv, load, dt);
  const HourInputs in{sizing.inverter_efficiency, pv, load, dt, band};
  HourLedger ledger;
  std::visit([&](auto& s) { step_core(s, in, true, ledger); }, states);
  return {std::move(states), ledger};
}

StepResult step_olds(const SystemSizing& sizing, StorageStates states, double pv, double load, RateBand band,
                     int hour_of_year, const StrategyConfig& strategy, double dt) {
  check_step_inputs(pv, load, dt);
  if (strategy.mode != StrategyMode::Olds) throw std::invalid_argument("step_olds needs an OLDS strategy");
  auto* h = std::get_if<HydrogenStates>(&states);
  if (!h || !sizing.hydrogen()) throw ConfigError("strategy.mode", "OLDS requires hydrogen storage sizing");
  if (hour_of_year < 0 || hour_of_year >= kHoursPerYear) throw std::out_of_range("hour of year outside 0..8759");
  const HourInputs in{sizing.inverter_efficiency, pv, load, dt, band};
  HourLedger ledger;
  step_core(*h, in, olds_allows_discharge(*h, band, hour_of_year, strategy), ledger);
  return {std::move(states), ledger};
}

void SimulationInputs::validate() const {
  try {
    pv.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("profiles.pv", e.what());
  }
  if (load.empty()) throw ConfigError("profiles.load", "load series is empty");
  if (horizon_years < 1) throw ConfigError("horizon_years", "must be at least 1");
  if (tariff.horizon_years() < horizon_years)
    throw ConfigError("tariff.price_factors", "fewer price factors than horizon years");
  if (!(battery.ep_ratio > 0.0)) throw ConfigError("battery.ep_ratio", "must be positive");
  if (!(battery.initial_efficiency > 0.0 && battery.initial_efficiency <= 1.0))
    throw ConfigError("battery.initial_efficiency", "must lie in (0, 1]");
  if (!(battery.annual_fade >= 0.0 && battery.annual_fade < 1.0))
    throw ConfigError("battery.annual_fade", "must lie in [0, 1)");
  if (battery.lifetime < 1) throw ConfigError("battery.lifetime", "must be at least 1");
  if (!(battery.initial_soc >= 0.0 && battery.initial_soc <= 1.0))
    throw ConfigError("battery.initial_soc", "must lie in [0, 1]");
  if (!(hydrogen.initial_fill >= 0.0 && hydrogen.initial_fill <= 1.0))
    throw ConfigError("hydrogen.initial_fill", "must lie in [0, 1]");
  auto check_stack = [](const StackTechnology& t, StackKind kind, const char* path) {
    if (!t.curve) throw ConfigError(path, "missing polarization curve");
    if (t.curve->kind() != kind) throw ConfigError(path, "curve kind mismatch");
    if (kind == StackKind::Electrolyser ? t.drift < 0.0 : t.drift > 0.0)
      throw ConfigError(path, "drift has the wrong sign");
  };
  check_stack(hydrogen.electrolyser, StackKind::Electrolyser, "hydrogen.electrolyser");
  check_stack(hydrogen.fuel_cell, StackKind::FuelCell, "hydrogen.fuel_cell");
  auto check_years = [&](const std::vector<int>& years, const char* path) {
    for (int y : years)
      if (y < 1 || y > horizon_years) throw ConfigError(path, fmt::format("replacement year {} outside horizon", y));
  };
  check_years(battery_replacements, "economics.battery.replacements");
  check_years(electrolyser_replacements, "economics.electrolyser.replacements");
  check_years(fuel_cell_replacements, "economics.fuel_cell.replacements");
}

StorageStates initial_states(const SimulationInputs& inputs, const SystemSizing& sizing) {
  if (const auto* b = std::get_if<BatterySizing>(&sizing.storage)) {
    BatteryState s;
    s.capacity = b->battery_kwh;
    s.energy = inputs.battery.initial_soc * b->battery_kwh;
    s.ep_ratio = inputs.battery.ep_ratio;
    s.efficiency = inputs.battery.initial_efficiency;
    s.initial_efficiency = inputs.battery.initial_efficiency;
    s.annual_fade = inputs.battery.annual_fade;
    s.lifetime = inputs.battery.lifetime;
    return s;
  }
  const auto& h = std::get<HydrogenSizing>(sizing.storage);
  HydrogenStates s;
  if (h.el_kw > 0.0)
    s.electrolyser = StackState::sized(inputs.hydrogen.electrolyser.curve, h.el_kw, inputs.hydrogen.electrolyser.drift);
  if (h.fc_kw > 0.0)
    s.fuel_cell = StackState::sized(inputs.hydrogen.fuel_cell.curve, h.fc_kw, inputs.hydrogen.fuel_cell.drift);
  s.tank.capacity = h.tank_kg;
  s.tank.mass = inputs.hydrogen.initial_fill * h.tank_kg;
  return s;
}

double SimulationResult::total_load() const {
  double s = 0.0;
  for (const auto& y : years) s += y.load;
  return s;
}

double SimulationResult::total_import() const {
  double s = 0.0;
  for (const auto& y : years) s += y.import;
  return s;
}

double SimulationResult::total_curtailed() const {
  double s = 0.0;
  for (const auto& y : years) s += y.curtailed;
  return s;
}

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

double level_of(const BatteryState& b) { return b.energy; }
double level_of(const HydrogenStates& h) { return h.tank.mass; }

void sample_health(const BatteryState& b, double& el, double& fc, double& batt) {
  el = 1.0;
  fc = 1.0;
  batt = b.efficiency;
}

void sample_health(const HydrogenStates& h, double& el, double& fc, double& batt) {
  el = h.electrolyser ? component_soh(*h.electrolyser) : 1.0;
  fc = h.fuel_cell ? component_soh(*h.fuel_cell) : 1.0;
  batt = 0.0;
}

void end_of_year(BatteryState& b, const SimulationInputs& inputs, int year, SimulationResult& result) {
  const auto r = battery_year_rollover(b, year, inputs.battery_replacements, inputs.horizon_years);
  b = r.state;
  if (r.replaced && b.capacity > 0.0) result.replacements.push_back({Component::Battery, year});
}

void end_of_year(HydrogenStates& h, const SimulationInputs& inputs, int year, SimulationResult& result) {
  if (year >= inputs.horizon_years) return;
  if (h.electrolyser && contains(inputs.electrolyser_replacements, year)) {
    h.electrolyser->op_hours = 0.0;
    result.replacements.push_back({Component::Electrolyser, year});
  }
  if (h.fuel_cell && contains(inputs.fuel_cell_replacements, year)) {
    h.fuel_cell->op_hours = 0.0;
    result.replacements.push_back({Component::FuelCell, year});
  }
}

template <typename States>
SimulationResult run_horizon(const SimulationInputs& inputs, const SystemSizing& sizing,
                             const StrategyConfig& strategy, States& states, const LedgerSink& sink) {
  constexpr bool kHydrogen = std::is_same_v<States, HydrogenStates>;
  const bool olds = strategy.mode == StrategyMode::Olds;
  const int horizon = inputs.horizon_years;
  const double dt = 1.0;

  SimulationResult result;
  result.years.resize(static_cast<std::size_t>(horizon));
  result.health.reserve(static_cast<std::size_t>(horizon));
  result.initial_level = level_of(states);

  const double* pv_base = inputs.pv.base_series.values().data();
  const double* load_base = inputs.load.values().data();
  const int pv_years = inputs.pv.base_series.years();
  const int load_years = inputs.load.years();
  const BandCalendar& calendar = inputs.tariff.calendar();

  HealthSample sample;
  sample_health(states, sample.electrolyser_soh_start, sample.fuel_cell_soh_start, sample.battery_efficiency_start);

  HourLedger ledger;
  for (int year = 1; year <= horizon; ++year) {
    const double pv_scale = pv_scale_factor(inputs.pv, sizing.pv_kwp, year);
    const std::ptrdiff_t pv_off = static_cast<std::ptrdiff_t>((year - 1) % pv_years) * kHoursPerYear;
    const std::ptrdiff_t load_off = static_cast<std::ptrdiff_t>((year - 1) % load_years) * kHoursPerYear;
    YearFlows& flows = result.years[static_cast<std::size_t>(year - 1)];
    for (int h = 0; h < kHoursPerYear; ++h) {
      const int weekday = inputs.load.weekday_at(load_off + h);
      const RateBand band = calendar[weekday][h % kHoursPerDay];
      const HourInputs in{sizing.inverter_efficiency, pv_base[pv_off + h] * pv_scale, load_base[load_off + h], dt,
                          band};
      bool allow = true;
      if constexpr (kHydrogen) {
        if (olds) allow = olds_allows_discharge(states, band, h, strategy);
      }
      step_core(states, in, allow, ledger);

      flows.import_by_band[static_cast<int>(band)] += ledger.grid_import * dt;
      flows.import += ledger.grid_import * dt;
      flows.load += ledger.load * dt;
      flows.pv += ledger.pv_generated * dt;
      flows.curtailed += ledger.pv_curtailed * dt;
      flows.charged += ledger.storage_charge_power * dt;
      flows.delivered += ledger.storage_delivered_dc * dt;
      flows.h2_produced += ledger.h2_produced;
      flows.h2_consumed += ledger.h2_consumed;
      if (sink) sink(year, h, ledger);
    }
    sample.year = year;
    sample_health(states, sample.electrolyser_soh_end, sample.fuel_cell_soh_end, sample.battery_efficiency_end);
    result.health.push_back(sample);
    end_of_year(states, inputs, year, result);
    sample = HealthSample{};
    sample_health(states, sample.electrolyser_soh_start, sample.fuel_cell_soh_start, sample.battery_efficiency_start);
  }
  result.final_level = level_of(states);
  return result;
}

}  // namespace

SimulationResult simulate_horizon(const SimulationInputs& inputs, const SystemSizing& sizing,
                                  const StrategyConfig& strategy, const LedgerSink& sink) {
  inputs.validate();
  sizing.validate();
  strategy.validate();
  if (strategy.mode == StrategyMode::Olds && !sizing.hydrogen())
    throw ConfigError("strategy.mode", "OLDS requires hydrogen storage sizing");
  StorageStates states = initial_states(inputs, sizing);
  if (auto* b = std::get_if<BatteryState>(&states)) return run_horizon(inputs, sizing, strategy, *b, sink);
  return run_horizon(inputs, sizing, strategy, std::get<HydrogenStates>(states), sink);
}

}  // namespace ressize
