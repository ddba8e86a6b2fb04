#include "ressize/errors.hpp"
#include "ressize/storage.hpp"

#include "doctest.h"
#include "test_util.hpp"

#include <random>

using namespace ressize;

namespace {

BatteryState battery(double capacity, double energy, double efficiency = 0.95) {
  BatteryState b;
  b.capacity = capacity;
  b.energy = energy;
  b.efficiency = efficiency;
  b.initial_efficiency = 0.95;
  return b;
}

std::shared_ptr<const PolarizationCurve> linear_fc(double v0 = 1.0, double slope = -0.001, double imax = 1000.0) {
  return std::make_shared<const PolarizationCurve>(PolarizationCurve::linear(StackKind::FuelCell, v0, slope, imax));
}

StackState stack_of(std::shared_ptr<const PolarizationCurve> curve, int n_cells, double drift, double hours = 0.0) {
  StackState s;
  s.kind = curve->kind();
  s.curve = std::move(curve);
  s.n_cells = n_cells;
  s.drift = drift;
  s.op_hours = hours;
  s.rated_power = 1.0;
  return s;
}

// Dense-grid maximum of I * V(I) as an independent oracle.
double brute_max_power(const StackState& s) {
  const double imax = s.curve->max_current();
  double best = 0.0;
  for (int k = 0; k <= 200000; ++k) best = std::max(best, cell_power(s, std::min(imax, imax * k / 200000.0)));
  for (double i : s.curve->currents()) best = std::max(best, cell_power(s, i));
  return best;
}

PolarizationCurve random_curve(StackKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 2 + static_cast<int>(rng() % 6);
  Eigen::ArrayXd i(n), v(n);
  double cur = u(rng) < 0.5 ? 0.0 : 5.0 * u(rng);
  double volt = kind == StackKind::Electrolyser ? 1.4 + 0.2 * u(rng) : 0.9 + 0.2 * u(rng);
  for (int k = 0; k < n; ++k) {
    i[k] = cur;
    v[k] = volt;
    cur += 10.0 + 200.0 * u(rng);
    volt += (kind == StackKind::Electrolyser ? 1.0 : -1.0) * 0.15 * u(rng);
    volt = std::max(volt, 0.05);
  }
  return PolarizationCurve(kind, i, v);
}

}  // namespace

TEST_SUITE("battery") {
  TEST_CASE("charge examples") {
    auto r = battery_charge(battery(1000.0, 0.0), 0.0);
    CHECK(r.accepted == 0.0);
    CHECK(r.state.energy == 0.0);

    r = battery_charge(battery(1000.0, 0.0), 300.0);
    CHECK(r.accepted == 300.0);
    CHECK(r.state.energy == 300.0);

    r = battery_charge(battery(1000.0, 900.0), 300.0);
    CHECK(r.accepted == doctest::Approx(100.0));
    CHECK(r.state.energy == 1000.0);

    r = battery_charge(battery(1000.0, 0.0), 700.0);
    CHECK(r.accepted == doctest::Approx(400.0));  // E/P 2.5

    r = battery_charge(battery(0.0, 0.0), 50.0);
    CHECK(r.accepted == 0.0);
  }

  TEST_CASE("discharge examples") {
    auto d = battery_discharge(battery(1000.0, 1000.0), 0.0);
    CHECK(d.delivered == 0.0);
    CHECK(d.state.energy == 1000.0);

    d = battery_discharge(battery(1000.0, 1000.0), 100.0);
    CHECK(d.removal == doctest::Approx(100.0 / 0.95).epsilon(1e-12));
    CHECK(d.removal == doctest::Approx(105.263).epsilon(1e-5));
    CHECK(d.delivered == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(d.state.energy == doctest::Approx(1000.0 - 100.0 / 0.95).epsilon(1e-12));

    d = battery_discharge(battery(1000.0, 50.0), 100.0);
    CHECK(d.removal == doctest::Approx(50.0));
    CHECK(d.delivered == doctest::Approx(47.5));
    CHECK(d.state.energy == 0.0);

    d = battery_discharge(battery(1000.0, 0.0), 100.0);
    CHECK(d.delivered == 0.0);
  }

  TEST_CASE("year rollover") {
    auto b = battery(1000.0, 10.0);
    auto r = battery_year_rollover(b, 1);
    CHECK(r.state.efficiency == doctest::Approx(0.92245).epsilon(1e-12));
    CHECK(!r.replaced);
    CHECK(r.state.energy == 10.0);

    b.efficiency = 0.95 * std::pow(0.971, 10);
    r = battery_year_rollover(b, 11);
    CHECK(!r.replaced);
    CHECK(r.state.efficiency == doctest::Approx(0.95 * std::pow(0.971, 11)));

    r = battery_year_rollover(r.state, 12);
    CHECK(r.replaced);
    CHECK(r.state.efficiency == 0.95);

    // No replacement in the final horizon year.
    CHECK(!battery_year_rollover(b, 25, 25).replaced);
    CHECK(battery_year_rollover(b, 24, 25).replaced);
    CHECK_THROWS_AS(battery_year_rollover(b, 26, 25), std::out_of_range);

    // Scheduled form replaces only in listed years.
    CHECK(battery_year_rollover(b, 12, std::vector<int>{12}, 25).replaced);
    CHECK(!battery_year_rollover(b, 24, std::vector<int>{12}, 25).replaced);
  }

  TEST_CASE("round trip never creates energy and respects the power limit") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
      const double cap = 1.0 + 5000.0 * u(rng);
      const double eff = 0.5 + 0.45 * u(rng);
      auto b = battery(cap, cap * u(rng), eff);
      const double start = b.energy;
      const auto c = battery_charge(b, 3000.0 * u(rng), 0.25 + 2.0 * u(rng));
      REQUIRE(c.accepted <= cap / 2.5 * (1 + 1e-12));
      const double stored = c.state.energy - start;
      b = c.state;
      b.energy = stored;  // drain only what was just stored
      double out = 0.0;
      for (int k = 0; k < 100 && b.energy > 0.0; ++k) {
        const auto d = battery_discharge(b, 1e6, 1.0);
        REQUIRE(d.removal <= cap / 2.5 * (1 + 1e-12));
        out += d.delivered;
        b = d.state;
      }
      CHECK(out <= stored * eff * (1 + 1e-12) + 1e-12);
    }
  }
}

TEST_SUITE("polarization curve") {
  TEST_CASE("validation") {
    Eigen::ArrayXd i(3), v(3);
    i << 0, 10, 5;
    v << 1.5, 1.6, 1.7;
    CHECK_THROWS_AS(PolarizationCurve(StackKind::Electrolyser, i, v), std::invalid_argument);
    i << 0, 5, 10;
    v << 1.5, 1.4, 1.7;
    CHECK_THROWS_AS(PolarizationCurve(StackKind::Electrolyser, i, v), std::invalid_argument);
    v << 1.0, 1.1, 0.9;
    CHECK_THROWS_AS(PolarizationCurve(StackKind::FuelCell, i, v), std::invalid_argument);
    CHECK_THROWS_AS(PolarizationCurve(StackKind::FuelCell, Eigen::ArrayXd::Zero(1), Eigen::ArrayXd::Ones(1)),
                    std::invalid_argument);
    v << 1.0, 0.9, 0.9;
    const PolarizationCurve ok(StackKind::FuelCell, i, v);
    CHECK(ok.interpolate(2.5) == doctest::Approx(0.95));
    CHECK_THROWS_AS(ok.interpolate(10.5), std::out_of_range);
  }

  TEST_CASE("csv loading") {
    const auto dir = testutil::scratch_dir("curve_csv");
    testutil::write_file(dir / "fc.csv", "current_a,voltage_v\n0,1.0\n100,0.8\n200,0.6\n");
    const auto c = load_polarization_csv(dir / "fc.csv", StackKind::FuelCell);
    CHECK(c.segments() == 2);
    CHECK(c.interpolate(150) == doctest::Approx(0.7));
    testutil::write_file(dir / "bad.csv", "current_a,voltage_v\n0,1.0\n100,x\n");
    try {
      load_polarization_csv(dir / "bad.csv", StackKind::FuelCell);
      FAIL("expected a data error");
    } catch (const DataError& e) {
      CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(load_polarization_csv(dir / "fc.csv", StackKind::Electrolyser), std::exception);
  }

  TEST_CASE("shipped defaults give 500 W and 250 W cells") {
    const auto el = stack_of(std::make_shared<const PolarizationCurve>(PolarizationCurve::default_electrolyser()), 1, 0);
    const auto fc = stack_of(std::make_shared<const PolarizationCurve>(PolarizationCurve::default_fuel_cell()), 1, 0);
    CHECK(max_cell_power(el).power == doctest::Approx(500.0));
    CHECK(max_cell_power(fc).power == doctest::Approx(250.0));
    const auto sized = StackState::sized(fc.curve, 100.0, -5e-6);
    CHECK(sized.n_cells == 400);
  }
}

TEST_SUITE("stack") {
  TEST_CASE("cell voltage with drift") {
    auto el_curve = std::make_shared<const PolarizationCurve>(PolarizationCurve::linear(StackKind::Electrolyser, 1.6, 0.001, 400));
    auto el = stack_of(el_curve, 1, 10e-6);
    CHECK(cell_voltage(el, 200.0) == doctest::Approx(1.8).epsilon(1e-14));
    el.op_hours = 10000.0;
    CHECK(cell_voltage(el, 200.0) == doctest::Approx(1.9).epsilon(1e-12));

    auto fc = stack_of(linear_fc(), 1, -5e-6);
    CHECK(cell_voltage(fc, 300.0) == doctest::Approx(0.7).epsilon(1e-14));
    fc.op_hours = 10000.0;
    CHECK(cell_voltage(fc, 300.0) == doctest::Approx(0.65).epsilon(1e-12));
    fc.op_hours = 1e6;
    CHECK(cell_voltage(fc, 300.0) == 0.0);
    CHECK_THROWS_AS(cell_voltage(fc, 1001.0), std::out_of_range);
  }

  TEST_CASE("operating current on the linear fuel cell") {
    const auto fc = stack_of(linear_fc(), 1, 0.0);
    CHECK(solve_operating_current(fc, 0.0) == 0.0);
    // P(I) = I - 0.001 I^2 peaks at I = 500 A with 250 W.
    CHECK(solve_operating_current(fc, 0.25) == doctest::Approx(500.0).epsilon(1e-9));
    CHECK(solve_operating_current(fc, 0.5) == doctest::Approx(500.0).epsilon(1e-9));
    CHECK(stack_power_kw(fc, solve_operating_current(fc, 0.5)) == doctest::Approx(0.25));
    // Smaller root of I - 0.001 I^2 = 160 is 200 A.
    CHECK(solve_operating_current(fc, 0.16) == doctest::Approx(200.0).epsilon(1e-12));
  }

  TEST_CASE("maximum power against a dense grid") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 60; ++t) {
      const auto kind = t % 2 ? StackKind::FuelCell : StackKind::Electrolyser;
      auto curve = std::make_shared<const PolarizationCurve>(random_curve(kind, rng));
      auto s = stack_of(curve, 1, kind == StackKind::FuelCell ? -5e-6 : 10e-6, 3000.0 * (t % 5));
      const double oracle = brute_max_power(s);
      CHECK(max_cell_power(s).power >= oracle * (1 - 1e-12));
      CHECK(max_cell_power(s).power <= oracle * (1 + 1e-6));
    }
  }

  TEST_CASE("solve then evaluate reproduces the request") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 400; ++t) {
      const auto kind = t % 2 ? StackKind::FuelCell : StackKind::Electrolyser;
      auto curve = std::make_shared<const PolarizationCurve>(random_curve(kind, rng));
      auto s = stack_of(curve, 1 + static_cast<int>(rng() % 300), kind == StackKind::FuelCell ? -5e-6 : 10e-6,
                        20000.0 * u(rng));
      const double pmax = stack_power_kw(s, max_cell_power(s).current);
      const double request = pmax * (0.001 + 0.998 * u(rng));
      const double current = solve_operating_current(s, request);
      CHECK(testutil::rel_err(stack_power_kw(s, current), request) <= 1e-6 * std::max(1.0, request));
      CHECK(stack_power_kw(s, current) == doctest::Approx(request).epsilon(1e-6));
      // Smallest root: no lower current reaches the request.
      CHECK(stack_power_kw(s, current * (1 - 1e-6)) < request);
    }
  }

  TEST_CASE("hydrogen flow") {
    // 1.05e-8 * 100 * 200 * 3600
    CHECK(hydrogen_mass(100.0, 200, 1.0) == doctest::Approx(0.756).epsilon(1e-12));
    CHECK(hydrogen_mass(0.0, 200, 1.0) == 0.0);
  }

  TEST_CASE("electrolyser step") {
    auto curve = std::make_shared<const PolarizationCurve>(PolarizationCurve::linear(StackKind::Electrolyser, 1.5, 0.001, 400));
    const auto el = stack_of(curve, 200, 10e-6);
    TankState tank{0.0, 100.0};

    auto idle = electrolyser_step(el, tank, 0.0);
    CHECK(idle.consumed == 0.0);
    CHECK(idle.produced == 0.0);
    CHECK(idle.stack.op_hours == 0.0);

    // 100 A per cell on 200 cells: V = 1.6, P = 32 kW.
    const double p100 = 200 * 100.0 * 1.6 / 1000.0;
    auto r = electrolyser_step(el, tank, p100);
    CHECK(r.consumed == doctest::Approx(p100));
    CHECK(r.produced == doctest::Approx(0.756).epsilon(1e-9));
    CHECK(r.tank.mass == doctest::Approx(0.756).epsilon(1e-9));
    CHECK(r.stack.op_hours == 1.0);

    auto big = electrolyser_step(el, tank, 1e6);
    CHECK(big.consumed == doctest::Approx(200 * 400 * 1.9 / 1000.0));

    TankState full{5.0, 5.0};
    auto f = electrolyser_step(el, full, 500.0);
    CHECK(f.consumed == 0.0);
    CHECK(f.tank.mass == 5.0);

    // Headroom caps production at exactly the remaining space.
    TankState nearly{99.999, 100.0};
    auto h = electrolyser_step(el, nearly, 1e6);
    CHECK(h.tank.mass == 100.0);
    CHECK(h.produced == doctest::Approx(0.001).epsilon(1e-9));
    CHECK(h.consumed < big.consumed);
  }

  TEST_CASE("fuel cell step") {
    const auto fc = stack_of(linear_fc(), 200, -5e-6);
    auto idle = fuel_cell_step(fc, TankState{1.0, 10.0}, 0.0);
    CHECK(idle.delivered == 0.0);
    CHECK(idle.tank.mass == 1.0);

    auto empty = fuel_cell_step(fc, TankState{0.0, 10.0}, 100.0);
    CHECK(empty.delivered == 0.0);

    // Tank holds exactly the mass for 100 A over one hour.
    const double m = hydrogen_mass(100.0, 200, 1.0);
    auto r = fuel_cell_step(fc, TankState{m, 10.0}, 1e6);
    CHECK(r.tank.mass == 0.0);
    CHECK(r.consumed == m);
    CHECK(r.delivered == doctest::Approx(200 * 100.0 * 0.9 / 1000.0).epsilon(1e-9));

    auto s = fuel_cell_step(fc, TankState{10.0, 10.0}, 10.0);
    CHECK(s.delivered == doctest::Approx(10.0));
    CHECK(s.tank.mass + s.consumed == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(s.stack.op_hours == 1.0);
    CHECK_THROWS_AS(fuel_cell_step(stack_of(linear_fc(), 1, 0.0), TankState{}, -1.0), std::invalid_argument);
  }

  TEST_CASE("tank conservation over random steps") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto curve = std::make_shared<const PolarizationCurve>(PolarizationCurve::linear(StackKind::Electrolyser, 1.5, 0.001, 400));
    auto el = stack_of(curve, 150, 10e-6);
    auto fc = stack_of(linear_fc(), 150, -5e-6);
    TankState tank{0.0, 3.0};
    double produced = 0.0, consumed = 0.0;
    for (int k = 0; k < 20000; ++k) {
      if (u(rng) < 0.5) {
        auto r = electrolyser_step(el, tank, 100.0 * u(rng));
        el = r.stack;
        tank = r.tank;
        produced += r.produced;
      } else {
        auto r = fuel_cell_step(fc, tank, 50.0 * u(rng));
        fc = r.stack;
        tank = r.tank;
        consumed += r.consumed;
      }
      REQUIRE(tank.mass >= 0.0);
      REQUIRE(tank.mass <= tank.capacity);
    }
    CHECK(testutil::rel_err(tank.mass, produced - consumed) <= 1e-9);
  }
}

TEST_SUITE("state of health") {
  TEST_CASE("fresh stacks are healthy") {
    CHECK(component_soh(stack_of(linear_fc(), 10, -5e-6)) == 1.0);
    auto curve = std::make_shared<const PolarizationCurve>(PolarizationCurve::default_electrolyser());
    CHECK(component_soh(stack_of(curve, 10, 10e-6)) == 1.0);
  }

  TEST_CASE("analytic fuel-cell values") {
    // P_max = a^2 / (4b) with a the shifted intercept.
    CHECK(component_soh(stack_of(linear_fc(), 1, -5e-6, 10000.0)) == doctest::Approx(0.9025).epsilon(1e-12));
    CHECK(component_soh(stack_of(linear_fc(), 1, -5e-6, 20000.0)) == doctest::Approx(0.81).epsilon(1e-12));
  }

  TEST_CASE("electrolyser SOH uses fresh over degraded peak") {
    auto curve = std::make_shared<const PolarizationCurve>(PolarizationCurve::linear(StackKind::Electrolyser, 1.5, 0.001, 400));
    const double fresh = 400 * 1.9;
    const double aged = 400 * (1.9 + 0.1);
    CHECK(component_soh(stack_of(curve, 1, 10e-6, 10000.0)) == doctest::Approx(fresh / aged).epsilon(1e-12));
  }

  TEST_CASE("non-increasing in operating hours") {
    auto el_curve = std::make_shared<const PolarizationCurve>(PolarizationCurve::default_electrolyser());
    double prev_el = 2.0, prev_fc = 2.0;
    for (double h = 0.0; h <= 150000.0; h += 2500.0) {
      const double el = component_soh(stack_of(el_curve, 1, 10e-6, h));
      const double fc = component_soh(stack_of(linear_fc(), 1, -5e-6, h));
      CHECK(el <= prev_el);
      CHECK(fc <= prev_fc);
      CHECK(el > 0.0);
      CHECK(el <= 1.0);
      prev_el = el;
      prev_fc = fc;
    }
  }
}
