#pragma once

#include "ressize/dispatch.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ressize {

enum class CostScenario : std::uint8_t { Current, Ultimate };
const char* to_string(CostScenario s);

struct Replacement {
  int year = 0;
  double factor = 0.0;  // fraction of the initial capital cost
};

struct ComponentCost {
  double unit_cost = 0.0;  // per kWp, kWh, kW or kg
  double om_factor = 0.0;  // fraction of capital cost per year
  std::vector<Replacement> replacements;
};

/// How the battery unit cost is applied: per kWh of capacity or per kW of rated power.
enum class BatteryCostBasis : std::uint8_t { PerKwh, PerKw };

struct CostBook {
  std::map<Component, ComponentCost> components;
  double discount_rate = 0.05;
  CostScenario scenario = CostScenario::Current;
  BatteryCostBasis battery_basis = BatteryCostBasis::PerKwh;

  static CostBook defaults(CostScenario scenario);

  const ComponentCost& at(Component c) const;
  bool has(Component c) const { return components.count(c) != 0; }
  std::vector<int> replacement_years(Component c) const;
  void validate(int horizon_years) const;
};

/// Costs and revenues indexed by year 1..horizon (element y-1); capex sits at year 0.
struct CashflowSchedule {
  double capex = 0.0;
  Eigen::ArrayXd om;
  Eigen::ArrayXd replacement;
  Eigen::ArrayXd revenue;

  int horizon() const { return static_cast<int>(om.size()); }
};

double annual_bill(const std::array<double, kBandCount>& import_by_band, const TariffSchedule& tariff, int year);

Eigen::ArrayXd annual_bills(const SimulationResult& result, const TariffSchedule& tariff);

Eigen::ArrayXd revenue_series(const SimulationResult& baseline, const SimulationResult& with_system,
                              const TariffSchedule& tariff);

/// Capital, O&M and replacement costs. Revenue is left at zero.
CashflowSchedule cost_schedule(const CostBook& costbook, const SystemSizing& sizing,
                               int horizon_years = kDefaultHorizonYears, double battery_ep_ratio = 2.5);

struct PresentValues {
  double npc = 0.0;
  double npv = 0.0;
};

PresentValues npv_npc(const CashflowSchedule& cashflows, double discount_rate);

double self_sufficiency_ratio(const SimulationResult& result);

struct EconomicSummary {
  double npc = 0.0;
  double npv = 0.0;
  double ssr = 0.0;
  Eigen::ArrayXd bills_baseline;
  Eigen::ArrayXd bills_system;
  CashflowSchedule cashflows;
};

EconomicSummary summarize(const CostBook& costbook, const SystemSizing& sizing, const TariffSchedule& tariff,
                          const SimulationResult& baseline, const SimulationResult& with_system,
                          double battery_ep_ratio = 2.5);

/// Present-value cost split per component (capex, discounted O&M, discounted replacement).
struct ComponentNpc {
  Component component;
  double capex = 0.0;
  double om = 0.0;
  double replacement = 0.0;
};

std::vector<ComponentNpc> npc_breakdown(const CostBook& costbook, const SystemSizing& sizing,
                                        int horizon_years = kDefaultHorizonYears, double battery_ep_ratio = 2.5);

/// `year,capex,om,replacement,revenue,discounted_net`, year 0 carrying the capital cost.
void write_cashflow_csv(const std::filesystem::path& path, const CashflowSchedule& cashflows, double discount_rate);

}  // namespace ressize
