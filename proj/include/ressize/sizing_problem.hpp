#pragma once

#include "ressize/dispatch.hpp"
#include "ressize/economics.hpp"
#include "ressize/optimizer.hpp"

#include <array>
#include <memory>
#include <string>

namespace ressize {

enum class SizingCase : int { Battery = 1, Hydrogen = 2, HydrogenOlds = 3 };

struct Range {
  double lower = 0.0;
  double upper = 1.0;
};

struct SizingBounds {
  Range pv_kwp{0.0, 8000.0};
  Range battery_kwh{0.0, 30000.0};
  Range el_kw{0.0, 6000.0};
  Range tank_kg{0.0, 30000.0};
  Range fc_kw{0.0, 3000.0};
  Range limit_sunny{0.0, 1.0};
  Range limit_cloudy{0.0, 1.0};
};

/// Case 1: {pv_kwp, battery_kwh}; case 2: {pv_kwp, el_kw, tank_kg, fc_kw};
/// case 3 adds {t_start, t_end, limit_sunny, limit_cloudy} with window points as hour-of-year.
DecisionSpace case_space(SizingCase c, const SizingBounds& bounds);

struct SizingDetail {
  SystemSizing sizing;
  StrategyConfig strategy;
  SimulationResult simulation;
  EconomicSummary economics;
};

/// Maps decision vectors to (NPV, SSR) for one scenario and cost book. Pure and thread-safe.
class SizingProblem {
public:
  SizingProblem(SimulationInputs inputs, CostBook costbook, SizingCase sizing_case, const SizingBounds& bounds,
                double inverter_efficiency = 0.97, double min_ssr = 0.0);

  const DecisionSpace& space() const { return space_; }
  SizingCase sizing_case() const { return case_; }
  const SimulationInputs& inputs() const { return inputs_; }
  const CostBook& costbook() const { return costbook_; }
  const SimulationResult& baseline() const { return baseline_; }
  double min_ssr() const { return min_ssr_; }

  SystemSizing sizing_of(const Eigen::VectorXd& x) const;
  StrategyConfig strategy_of(const Eigen::VectorXd& x) const;

  Evaluation evaluate(const Eigen::VectorXd& x) const;
  SizingDetail evaluate_detail(const Eigen::VectorXd& x) const;

  /// Optimizer view sharing ownership of this problem.
  static Problem as_problem(std::shared_ptr<const SizingProblem> self);

private:
  SimulationInputs inputs_;
  CostBook costbook_;
  SizingCase case_;
  DecisionSpace space_;
  double inverter_efficiency_;
  double min_ssr_;
  SimulationResult baseline_;
};

/// Zero-system run used as the bill baseline.
SimulationResult simulate_baseline(const SimulationInputs& inputs);

}  // namespace ressize
