#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

namespace ressize {

/// Hydrogen mass per ampere-second per cell (kg / (A s)).
inline constexpr double kH2KgPerAmpSecond = 1.05e-8;

// ---------------------------------------------------------------------------
// Battery

struct BatteryState {
  double energy = 0.0;    // kWh
  double capacity = 0.0;  // kWh
  double ep_ratio = 2.5;  // h
  double efficiency = 0.95;
  double initial_efficiency = 0.95;
  double annual_fade = 0.029;
  int lifetime = 12;  // years

  double power_limit() const { return ep_ratio > 0.0 ? capacity / ep_ratio : 0.0; }
  void validate() const;
};

struct BatteryCharge {
  BatteryState state;
  double accepted = 0.0;  // kW
};

struct BatteryDischarge {
  BatteryState state;
  double removal = 0.0;    // kW drawn from the stored energy
  double delivered = 0.0;  // kW DC after losses
};

struct BatteryRollover {
  BatteryState state;
  bool replaced = false;
};

BatteryCharge battery_charge(BatteryState state, double surplus_dc, double dt = 1.0);
BatteryDischarge battery_discharge(BatteryState state, double deficit_dc, double dt = 1.0);
BatteryRollover battery_year_rollover(BatteryState state, int year_just_ended, int horizon_years = 25);
/// Same fade, but replacement happens only in the listed years (before the horizon end).
BatteryRollover battery_year_rollover(BatteryState state, int year_just_ended, const std::vector<int>& replacement_years,
                                      int horizon_years);

// ---------------------------------------------------------------------------
// PEM stacks

enum class StackKind : std::uint8_t { Electrolyser, FuelCell };

const char* to_string(StackKind kind);

/// Fresh cell polarization curve as a piecewise-linear point table.
class PolarizationCurve {
public:
  PolarizationCurve(StackKind kind, Eigen::ArrayXd currents, Eigen::ArrayXd voltages);

  /// V = v0 + slope * I on [0, i_max]; slope must match the kind's monotonicity.
  static PolarizationCurve linear(StackKind kind, double v0, double slope, double i_max);
  /// Placeholder curves: 500 W electrolyser cells, 250 W fuel-cell cells at rated current.
  static PolarizationCurve default_electrolyser();
  static PolarizationCurve default_fuel_cell();

  StackKind kind() const { return kind_; }
  const Eigen::ArrayXd& currents() const { return currents_; }
  const Eigen::ArrayXd& voltages() const { return voltages_; }
  double min_current() const { return currents_[0]; }
  double max_current() const { return currents_[currents_.size() - 1]; }
  Eigen::Index segments() const { return currents_.size() - 1; }

  /// Fresh interpolated voltage; `current` must lie within the table.
  double interpolate(double current) const;

private:
  StackKind kind_;
  Eigen::ArrayXd currents_;
  Eigen::ArrayXd voltages_;
};

PolarizationCurve load_polarization_csv(const std::filesystem::path& path, StackKind kind);

struct StackState {
  StackKind kind = StackKind::Electrolyser;
  int n_cells = 1;
  std::shared_ptr<const PolarizationCurve> curve;
  double op_hours = 0.0;
  double drift = 0.0;  // V/h, signed
  double rated_power = 0.0;  // kW

  /// Builds a stack of `rated_kw` with cell count from the fresh maximum cell power.
  static StackState sized(std::shared_ptr<const PolarizationCurve> curve, double rated_kw, double drift);
  void validate() const;
};

struct TankState {
  double mass = 0.0;      // kg
  double capacity = 0.0;  // kg

  double headroom() const { return capacity - mass; }
  void validate() const;
};

struct CellPeak {
  double current = 0.0;  // A
  double power = 0.0;    // W per cell
};

double cell_voltage(const StackState& stack, double current);
/// Cell power at `current`, extending the curve down to the origin at the first point's voltage.
double cell_power(const StackState& stack, double current);
/// Maximum cell power for currents in [0, current_cap] at the stack's operating hours.
CellPeak max_cell_power(const StackState& stack, double current_cap);
CellPeak max_cell_power(const StackState& stack);
double stack_power_kw(const StackState& stack, double current);
double solve_operating_current(const StackState& stack, double power_dc);
double hydrogen_mass(double current, int n_cells, double dt);

struct ElectrolyserStep {
  StackState stack;
  TankState tank;
  double consumed = 0.0;  // kW DC
  double produced = 0.0;  // kg
};

struct FuelCellStep {
  StackState stack;
  TankState tank;
  double delivered = 0.0;  // kW DC
  double consumed = 0.0;   // kg
};

ElectrolyserStep electrolyser_step(StackState stack, TankState tank, double surplus_dc, double dt = 1.0);
FuelCellStep fuel_cell_step(StackState stack, TankState tank, double deficit_dc, double dt = 1.0);

double component_soh(const StackState& stack);

namespace detail {
// In-place forms used by the hourly loop.
double battery_charge_inplace(BatteryState& s, double surplus_dc, double dt);
double battery_discharge_inplace(BatteryState& s, double deficit_dc, double dt, double& delivered);
double electrolyser_inplace(StackState& stack, TankState& tank, double surplus_dc, double dt, double& produced);
double fuel_cell_inplace(StackState& stack, TankState& tank, double deficit_dc, double dt, double& consumed);
}  // namespace detail

}  // namespace ressize
