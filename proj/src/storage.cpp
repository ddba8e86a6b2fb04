#include "ressize/storage.hpp"

#include "ressize/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace ressize {

// ---------------------------------------------------------------------------
// Battery

void BatteryState::validate() const {
  if (!(capacity >= 0.0)) throw std::invalid_argument("battery capacity must be non-negative");
  if (!(energy >= 0.0 && energy <= capacity)) throw std::invalid_argument("battery energy outside [0, capacity]");
  if (!(ep_ratio > 0.0)) throw std::invalid_argument("battery E/P ratio must be positive");
  if (!(initial_efficiency > 0.0 && initial_efficiency <= 1.0))
    throw std::invalid_argument("battery initial efficiency must lie in (0, 1]");
  if (!(efficiency > 0.0 && efficiency <= initial_efficiency))
    throw std::invalid_argument("battery efficiency must lie in (0, initial efficiency]");
  if (!(annual_fade >= 0.0 && annual_fade < 1.0)) throw std::invalid_argument("battery fade must lie in [0, 1)");
  if (lifetime < 1) throw std::invalid_argument("battery lifetime must be at least one year");
}

namespace detail {

double battery_charge_inplace(BatteryState& s, double surplus_dc, double dt) {
  if (!(surplus_dc > 0.0) || !(s.capacity > 0.0)) return 0.0;
  const double headroom = s.capacity - s.energy;
  const double accepted = std::min({surplus_dc, s.power_limit(), headroom / dt});
  if (!(accepted > 0.0)) return 0.0;
  if (accepted * dt >= headroom)
    s.energy = s.capacity;
  else
    s.energy += accepted * dt;
  return accepted;
}

double battery_discharge_inplace(BatteryState& s, double deficit_dc, double dt, double& delivered) {
  delivered = 0.0;
  if (!(deficit_dc > 0.0) || !(s.energy > 0.0)) return 0.0;
  const double removal = std::min({deficit_dc / s.efficiency, s.power_limit(), s.energy / dt});
  if (!(removal > 0.0)) return 0.0;
  if (removal * dt >= s.energy)
    s.energy = 0.0;
  else
    s.energy -= removal * dt;
  delivered = std::min(removal * s.efficiency, deficit_dc);
  return removal;
}

}  // namespace detail

BatteryCharge battery_charge(BatteryState state, double surplus_dc, double dt) {
  if (surplus_dc < 0.0 || !(dt > 0.0)) throw std::invalid_argument("battery_charge: negative surplus or dt");
  const double accepted = detail::battery_charge_inplace(state, surplus_dc, dt);
  return {state, accepted};
}

BatteryDischarge battery_discharge(BatteryState state, double deficit_dc, double dt) {
  if (deficit_dc < 0.0 || !(dt > 0.0)) throw std::invalid_argument("battery_discharge: negative deficit or dt");
  double delivered = 0.0;
  const double removal = detail::battery_discharge_inplace(state, deficit_dc, dt, delivered);
  return {state, removal, delivered};
}

BatteryRollover battery_year_rollover(BatteryState state, int year_just_ended, int horizon_years) {
  if (year_just_ended < 1 || year_just_ended > horizon_years)
    throw std::out_of_range(fmt::format("year {} outside horizon 1..{}", year_just_ended, horizon_years));
  state.efficiency *= 1.0 - state.annual_fade;
  const bool replaced = year_just_ended % state.lifetime == 0 && year_just_ended < horizon_years;
  if (replaced) state.efficiency = state.initial_efficiency;
  return {state, replaced};
}

BatteryRollover battery_year_rollover(BatteryState state, int year_just_ended, const std::vector<int>& replacement_years,
                                      int horizon_years) {
  if (year_just_ended < 1 || year_just_ended > horizon_years)
    throw std::out_of_range(fmt::format("year {} outside horizon 1..{}", year_just_ended, horizon_years));
  state.efficiency *= 1.0 - state.annual_fade;
  const bool replaced =
      year_just_ended < horizon_years &&
      std::find(replacement_years.begin(), replacement_years.end(), year_just_ended) != replacement_years.end();
  if (replaced) state.efficiency = state.initial_efficiency;
  return {state, replaced};
}

// ---------------------------------------------------------------------------
// Polarization curves

const char* to_string(StackKind kind) {
  return kind == StackKind::Electrolyser ? "electrolyser" : "fuel_cell";
}

PolarizationCurve::PolarizationCurve(StackKind kind, Eigen::ArrayXd currents, Eigen::ArrayXd voltages)
    : kind_(kind), currents_(std::move(currents)), voltages_(std::move(voltages)) {
  if (currents_.size() != voltages_.size()) throw std::invalid_argument("curve columns differ in length");
  if (currents_.size() < 2) throw std::invalid_argument("curve needs at least two points");
  if (!(currents_[0] >= 0.0)) throw std::invalid_argument("curve currents must be non-negative");
  for (Eigen::Index i = 0; i < currents_.size(); ++i) {
    if (!std::isfinite(currents_[i]) || !std::isfinite(voltages_[i]))
      throw std::invalid_argument("curve values must be finite");
    if (!(voltages_[i] >= 0.0)) throw std::invalid_argument("curve voltages must be non-negative");
    if (i == 0) continue;
    if (!(currents_[i] > currents_[i - 1])) throw std::invalid_argument("curve currents must strictly increase");
    if (kind_ == StackKind::Electrolyser && voltages_[i] < voltages_[i - 1])
      throw std::invalid_argument("electrolyser voltage must be non-decreasing in current");
    if (kind_ == StackKind::FuelCell && voltages_[i] > voltages_[i - 1])
      throw std::invalid_argument("fuel-cell voltage must be non-increasing in current");
  }
  if (kind_ == StackKind::Electrolyser && !(voltages_[0] > 0.0))
    throw std::invalid_argument("electrolyser voltages must be positive");
}

PolarizationCurve PolarizationCurve::linear(StackKind kind, double v0, double slope, double i_max) {
  if (!(i_max > 0.0)) throw std::invalid_argument("curve current range must be positive");
  Eigen::ArrayXd i(2), v(2);
  i << 0.0, i_max;
  v << v0, v0 + slope * i_max;
  return PolarizationCurve(kind, std::move(i), std::move(v));
}

PolarizationCurve PolarizationCurve::default_electrolyser() {
  const double i_max = 500.0 / 1.83;
  return linear(StackKind::Electrolyser, 1.48, 0.35 / i_max, i_max);
}

PolarizationCurve PolarizationCurve::default_fuel_cell() {
  const double i_max = 500.0;
  return linear(StackKind::FuelCell, 1.0, -0.5 / i_max, i_max);
}

double PolarizationCurve::interpolate(double current) const {
  if (!(current >= min_current() && current <= max_current()))
    throw std::out_of_range(fmt::format("current {} A outside curve range [{}, {}]", current, min_current(),
                                        max_current()));
  const double* begin = currents_.data();
  const double* end = begin + currents_.size();
  auto k = static_cast<Eigen::Index>(std::upper_bound(begin, end, current) - begin) - 1;
  k = std::clamp<Eigen::Index>(k, 0, segments() - 1);
  const double i0 = currents_[k], i1 = currents_[k + 1];
  const double v0 = voltages_[k], v1 = voltages_[k + 1];
  return v0 + (v1 - v0) * (current - i0) / (i1 - i0);
}

PolarizationCurve load_polarization_csv(const std::filesystem::path& path, StackKind kind) {
  const std::string src = path.string();
  std::ifstream in(path);
  if (!in) throw DataError(src, 0, "cannot open file");
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> currents, voltages;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line != "current_a,voltage_v") throw DataError(src, 1, "header must be 'current_a,voltage_v'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError(src, line_no, "expected two comma-separated fields");
    double i = 0.0, v = 0.0;
    const char* a = line.data();
    const auto r1 = std::from_chars(a, a + comma, i);
    const auto r2 = std::from_chars(a + comma + 1, a + line.size(), v);
    if (r1.ec != std::errc{} || r1.ptr != a + comma || r2.ec != std::errc{} || r2.ptr != a + line.size())
      throw DataError(src, line_no, "malformed number");
    currents.push_back(i);
    voltages.push_back(v);
  }
  const auto n = static_cast<Eigen::Index>(currents.size());
  try {
    return PolarizationCurve(kind, Eigen::Map<Eigen::ArrayXd>(currents.data(), n),
                             Eigen::Map<Eigen::ArrayXd>(voltages.data(), n));
  } catch (const std::invalid_argument& e) {
    throw DataError(src, 0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Stacks

void StackState::validate() const {
  if (!curve) throw std::invalid_argument("stack has no polarization curve");
  if (curve->kind() != kind) throw std::invalid_argument("stack kind does not match its curve");
  if (n_cells < 1) throw std::invalid_argument("stack needs at least one cell");
  if (!(op_hours >= 0.0)) throw std::invalid_argument("stack operating hours must be non-negative");
  if (kind == StackKind::Electrolyser && drift < 0.0)
    throw std::invalid_argument("electrolyser drift must be non-negative");
  if (kind == StackKind::FuelCell && drift > 0.0) throw std::invalid_argument("fuel-cell drift must be non-positive");
}

StackState StackState::sized(std::shared_ptr<const PolarizationCurve> curve, double rated_kw, double drift) {
  if (!curve) throw std::invalid_argument("stack has no polarization curve");
  if (!(rated_kw > 0.0)) throw std::invalid_argument("stack rating must be positive");
  StackState s;
  s.kind = curve->kind();
  s.curve = std::move(curve);
  s.drift = drift;
  s.rated_power = rated_kw;
  const double cell_w = max_cell_power(s).power;
  if (!(cell_w > 0.0)) throw std::invalid_argument("curve yields no cell power");
  s.n_cells = std::max(1, static_cast<int>(std::lround(rated_kw * 1000.0 / cell_w)));
  s.validate();
  return s;
}

void TankState::validate() const {
  if (!(capacity >= 0.0)) throw std::invalid_argument("tank capacity must be non-negative");
  if (!(mass >= 0.0 && mass <= capacity)) throw std::invalid_argument("tank mass outside [0, capacity]");
}

namespace {

inline double shift(const StackState& s) { return s.drift * s.op_hours; }

inline double floored(const StackState& s, double v) {
  return (s.kind == StackKind::FuelCell && v < 0.0) ? 0.0 : v;
}

// Segment k as V(I) = c + slope * I, drift included.
struct Line {
  double c, slope;
};

inline Line segment_line(const StackState& s, Eigen::Index k) {
  const auto& I = s.curve->currents();
  const auto& V = s.curve->voltages();
  const double slope = (V[k + 1] - V[k]) / (I[k + 1] - I[k]);
  return {V[k] - slope * I[k] + shift(s), slope};
}

inline double line_power(const StackState& s, const Line& l, double current) {
  return current * floored(s, l.c + l.slope * current);
}

}  // namespace

double cell_voltage(const StackState& stack, double current) {
  return floored(stack, stack.curve->interpolate(current) + shift(stack));
}

double cell_power(const StackState& stack, double current) {
  if (!(current > 0.0)) return 0.0;
  const PolarizationCurve& c = *stack.curve;
  if (current < c.min_current()) return current * floored(stack, c.voltages()[0] + shift(stack));
  return current * cell_voltage(stack, current);
}

CellPeak max_cell_power(const StackState& stack, double current_cap) {
  const PolarizationCurve& c = *stack.curve;
  const auto& I = c.currents();
  const double cap = std::min(current_cap, c.max_current());
  CellPeak best;
  auto consider = [&](double current, double power) {
    if (power > best.power) best = {current, power};
  };
  if (!(cap > 0.0)) return best;
  if (c.min_current() > 0.0) {
    const double x = std::min(cap, c.min_current());
    consider(x, x * floored(stack, c.voltages()[0] + shift(stack)));
  }
  for (Eigen::Index k = 0; k < c.segments() && I[k] < cap; ++k) {
    const Line l = segment_line(stack, k);
    const double lo = I[k];
    const double hi = std::min(I[k + 1], cap);
    consider(lo, line_power(stack, l, lo));
    if (l.slope < 0.0) {
      const double vertex = -l.c / (2.0 * l.slope);
      if (vertex > lo && vertex < hi) consider(vertex, line_power(stack, l, vertex));
    }
    consider(hi, line_power(stack, l, hi));
  }
  return best;
}

CellPeak max_cell_power(const StackState& stack) { return max_cell_power(stack, stack.curve->max_current()); }

double stack_power_kw(const StackState& stack, double current) {
  return stack.n_cells * cell_power(stack, current) / 1000.0;
}

double solve_operating_current(const StackState& stack, double power_dc) {
  if (!(power_dc > 0.0)) return 0.0;
  const double target = power_dc * 1000.0 / stack.n_cells;
  const CellPeak peak = max_cell_power(stack);
  if (target >= peak.power) return peak.current;

  const PolarizationCurve& c = *stack.curve;
  const auto& I = c.currents();
  if (c.min_current() > 0.0) {
    const double p_first = cell_power(stack, c.min_current());
    if (target <= p_first) return c.min_current() * target / p_first;
  }
  for (Eigen::Index k = 0; k < c.segments() && I[k] < peak.current; ++k) {
    const Line l = segment_line(stack, k);
    double lo = I[k];
    double hi = std::min(I[k + 1], peak.current);
    if (l.slope < 0.0) hi = std::min(hi, std::max(lo, -l.c / (2.0 * l.slope)));
    if (line_power(stack, l, hi) < target) continue;
    // Power is increasing on [lo, hi] and brackets the target. On a linear
    // segment P = c I + slope I^2, so the rising root has a closed form.
    const double disc = l.c * l.c + 4.0 * l.slope * target;
    if (disc >= 0.0 && l.c > 0.0) {
      const double root = 2.0 * target / (l.c + std::sqrt(disc));
      if (root >= lo && root <= hi) return root;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (line_power(stack, l, mid) < target)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  return peak.current;
}

double hydrogen_mass(double current, int n_cells, double dt) {
  return kH2KgPerAmpSecond * current * n_cells * 3600.0 * dt;
}

namespace detail {

double electrolyser_inplace(StackState& stack, TankState& tank, double surplus_dc, double dt, double& produced) {
  produced = 0.0;
  const double headroom = tank.headroom();
  if (!(surplus_dc > 0.0) || !(headroom > 0.0)) return 0.0;
  const CellPeak peak = max_cell_power(stack);
  const double limit = stack.n_cells * peak.power / 1000.0;
  double power = 0.0;
  double current = 0.0;
  if (surplus_dc >= limit) {
    power = limit;
    current = peak.current;
  } else {
    power = surplus_dc;
    current = solve_operating_current(stack, power);
  }
  if (!(current > 0.0)) return 0.0;
  double mass = hydrogen_mass(current, stack.n_cells, dt);
  if (mass >= headroom) {
    current = headroom / (kH2KgPerAmpSecond * stack.n_cells * 3600.0 * dt);
    power = stack_power_kw(stack, current);
    mass = headroom;
    tank.mass = tank.capacity;
  } else {
    tank.mass += mass;
  }
  stack.op_hours += dt;
  produced = mass;
  return power;
}

double fuel_cell_inplace(StackState& stack, TankState& tank, double deficit_dc, double dt, double& consumed) {
  consumed = 0.0;
  if (!(deficit_dc > 0.0) || !(tank.mass > 0.0)) return 0.0;
  const double per_amp = kH2KgPerAmpSecond * stack.n_cells * 3600.0 * dt;
  const double mass_current = tank.mass / per_amp;
  const CellPeak peak = max_cell_power(stack);
  const CellPeak avail = mass_current >= peak.current ? peak : max_cell_power(stack, mass_current);
  const double p_avail = stack.n_cells * avail.power / 1000.0;
  if (!(p_avail > 0.0)) return 0.0;
  double delivered = 0.0;
  double current = 0.0;
  if (deficit_dc >= p_avail) {
    delivered = p_avail;
    current = avail.current;
  } else {
    delivered = deficit_dc;
    current = solve_operating_current(stack, deficit_dc);
  }
  const double mass = current * per_amp;
  if (current >= mass_current || mass >= tank.mass) {
    consumed = tank.mass;
    tank.mass = 0.0;
  } else {
    consumed = mass;
    tank.mass -= mass;
  }
  stack.op_hours += dt;
  return delivered;
}

}  // namespace detail

ElectrolyserStep electrolyser_step(StackState stack, TankState tank, double surplus_dc, double dt) {
  if (stack.kind != StackKind::Electrolyser) throw std::invalid_argument("electrolyser_step needs an electrolyser");
  if (surplus_dc < 0.0 || !(dt > 0.0)) throw std::invalid_argument("electrolyser_step: negative surplus or dt");
  double produced = 0.0;
  const double consumed = detail::electrolyser_inplace(stack, tank, surplus_dc, dt, produced);
  return {std::move(stack), tank, consumed, produced};
}

FuelCellStep fuel_cell_step(StackState stack, TankState tank, double deficit_dc, double dt) {
  if (stack.kind != StackKind::FuelCell) throw std::invalid_argument("fuel_cell_step needs a fuel cell");
  if (deficit_dc < 0.0 || !(dt > 0.0)) throw std::invalid_argument("fuel_cell_step: negative deficit or dt");
  double consumed = 0.0;
  const double delivered = detail::fuel_cell_inplace(stack, tank, deficit_dc, dt, consumed);
  return {std::move(stack), tank, delivered, consumed};
}

double component_soh(const StackState& stack) {
  StackState fresh = stack;
  fresh.op_hours = 0.0;
  const double p0 = max_cell_power(fresh).power;
  const double pt = max_cell_power(stack).power;
  if (stack.kind == StackKind::Electrolyser) return pt > 0.0 ? p0 / pt : 0.0;
  return p0 > 0.0 ? pt / p0 : 0.0;
}

}  // namespace ressize
