#include "ressize/sizing_problem.hpp"

#include "ressize/errors.hpp"

namespace ressize {

DecisionSpace case_space(SizingCase c, const SizingBounds& b) {
  std::vector<Variable> v;
  v.push_back({"pv_kwp", b.pv_kwp.lower, b.pv_kwp.upper, VariableKind::Continuous});
  if (c == SizingCase::Battery) {
    v.push_back({"battery_kwh", b.battery_kwh.lower, b.battery_kwh.upper, VariableKind::Continuous});
    return DecisionSpace(std::move(v));
  }
  v.push_back({"el_kw", b.el_kw.lower, b.el_kw.upper, VariableKind::Continuous});
  v.push_back({"tank_kg", b.tank_kg.lower, b.tank_kg.upper, VariableKind::Continuous});
  v.push_back({"fc_kw", b.fc_kw.lower, b.fc_kw.upper, VariableKind::Continuous});
  if (c == SizingCase::HydrogenOlds) {
    v.push_back({"t_start", 0.0, kHoursPerYear - 1.0, VariableKind::IntegerHour});
    v.push_back({"t_end", 0.0, kHoursPerYear - 1.0, VariableKind::IntegerHour});
    v.push_back({"limit_sunny", b.limit_sunny.lower, b.limit_sunny.upper, VariableKind::Continuous});
    v.push_back({"limit_cloudy", b.limit_cloudy.lower, b.limit_cloudy.upper, VariableKind::Continuous});
  }
  return DecisionSpace(std::move(v));
}

SimulationResult simulate_baseline(const SimulationInputs& inputs) {
  return simulate_horizon(inputs, SystemSizing{}, StrategyConfig{});
}

SizingProblem::SizingProblem(SimulationInputs inputs, CostBook costbook, SizingCase sizing_case,
                             const SizingBounds& bounds, double inverter_efficiency, double min_ssr)
    : inputs_(std::move(inputs)),
      costbook_(std::move(costbook)),
      case_(sizing_case),
      space_(case_space(sizing_case, bounds)),
      inverter_efficiency_(inverter_efficiency),
      min_ssr_(min_ssr) {
  if (!(min_ssr_ >= 0.0 && min_ssr_ <= 1.0)) throw ConfigError("min_ssr", "must lie in [0, 1]");
  inputs_.battery_replacements = costbook_.replacement_years(Component::Battery);
  inputs_.electrolyser_replacements = costbook_.replacement_years(Component::Electrolyser);
  inputs_.fuel_cell_replacements = costbook_.replacement_years(Component::FuelCell);
  costbook_.validate(inputs_.horizon_years);
  baseline_ = simulate_baseline(inputs_);
}

SystemSizing SizingProblem::sizing_of(const Eigen::VectorXd& x) const {
  SystemSizing s;
  s.inverter_efficiency = inverter_efficiency_;
  s.pv_kwp = x[0];
  if (case_ == SizingCase::Battery)
    s.storage = BatterySizing{x[1]};
  else
    s.storage = HydrogenSizing{x[1], x[2], x[3]};
  return s;
}

StrategyConfig SizingProblem::strategy_of(const Eigen::VectorXd& x) const {
  StrategyConfig st;
  if (case_ != SizingCase::HydrogenOlds) return st;
  st.mode = StrategyMode::Olds;
  st.window_start = WindowPoint::from_hour_of_year(static_cast<int>(x[4]));
  st.window_end = WindowPoint::from_hour_of_year(static_cast<int>(x[5]));
  st.limit_sunny = x[6];
  st.limit_cloudy = x[7];
  return st;
}

SizingDetail SizingProblem::evaluate_detail(const Eigen::VectorXd& x) const {
  if (x.size() != space_.dims()) throw std::invalid_argument("decision vector has the wrong dimension");
  SizingDetail d;
  d.sizing = sizing_of(x);
  d.strategy = strategy_of(x);
  d.simulation = simulate_horizon(inputs_, d.sizing, d.strategy);
  d.economics = summarize(costbook_, d.sizing, inputs_.tariff, baseline_, d.simulation, inputs_.battery.ep_ratio);
  return d;
}

Evaluation SizingProblem::evaluate(const Eigen::VectorXd& x) const {
  const SizingDetail d = evaluate_detail(x);
  Evaluation e;
  e.objectives << d.economics.npv, d.economics.ssr;
  e.violation = std::max(0.0, min_ssr_ - d.economics.ssr);
  return e;
}

Problem SizingProblem::as_problem(std::shared_ptr<const SizingProblem> self) {
  Problem p;
  p.space = self->space();
  p.evaluate = [self](const Eigen::VectorXd& x) { return self->evaluate(x); };
  return p;
}

}  // namespace ressize
