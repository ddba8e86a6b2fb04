#include "ressize/economics.hpp"

#include "ressize/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

namespace ressize {

const char* to_string(CostScenario s) { return s == CostScenario::Current ? "current" : "ultimate"; }

CostBook CostBook::defaults(CostScenario scenario) {
  const bool cur = scenario == CostScenario::Current;
  const double fc_factors[4] = {0.775, 0.55, 0.325, 0.10};
  CostBook book;
  book.scenario = scenario;
  book.components[Component::Pv] = {881.0, 0.01, {}};
  book.components[Component::Battery] = {cur ? 490.0 : 270.0, 0.005, {{12, cur ? 0.5 : 1.0}}};
  book.components[Component::Electrolyser] = {cur ? 1500.0 : 200.0, 0.01, {{15, cur ? 0.6 : 1.0}}};
  book.components[Component::Tank] = {cur ? 600.0 : 266.0, 0.01, {}};
  ComponentCost fc{cur ? 4000.0 : 400.0, 0.01, {}};
  for (int k = 0; k < 4; ++k) fc.replacements.push_back({5 * (k + 1), cur ? fc_factors[k] : 1.0});
  book.components[Component::FuelCell] = fc;
  return book;
}

const ComponentCost& CostBook::at(Component c) const {
  const auto it = components.find(c);
  if (it == components.end())
    throw ConfigError(fmt::format("economics.{}.{}", to_string(scenario), to_string(c)),
                      "no cost entry for sized component");
  return it->second;
}

std::vector<int> CostBook::replacement_years(Component c) const {
  std::vector<int> years;
  if (const auto it = components.find(c); it != components.end())
    for (const auto& r : it->second.replacements) years.push_back(r.year);
  return years;
}

void CostBook::validate(int horizon_years) const {
  if (!(discount_rate > 0.0 && discount_rate < 1.0)) throw ConfigError("economics.discount_rate", "must lie in (0, 1)");
  for (const auto& [c, cost] : components) {
    const std::string path = fmt::format("economics.{}.{}", to_string(scenario), to_string(c));
    if (!(cost.unit_cost >= 0.0)) throw ConfigError(path + ".unit_cost", "must be non-negative");
    if (!(cost.om_factor >= 0.0)) throw ConfigError(path + ".om_factor", "must be non-negative");
    for (const auto& r : cost.replacements) {
      if (r.year < 1 || r.year > horizon_years)
        throw ConfigError(path + ".replacements", fmt::format("year {} outside horizon", r.year));
      if (!(r.factor >= 0.0)) throw ConfigError(path + ".replacements", "factor must be non-negative");
    }
  }
}

double annual_bill(const std::array<double, kBandCount>& import_by_band, const TariffSchedule& tariff, int year) {
  const double k = tariff.price_factor(year);
  double bill = 0.0;
  for (int b = 0; b < kBandCount; ++b) {
    if (import_by_band[b] < 0.0) throw std::invalid_argument("negative imported energy");
    bill += import_by_band[b] * k * tariff.first_year_rate(static_cast<RateBand>(b));
  }
  return bill;
}

Eigen::ArrayXd annual_bills(const SimulationResult& result, const TariffSchedule& tariff) {
  Eigen::ArrayXd bills(result.horizon());
  for (int y = 1; y <= result.horizon(); ++y)
    bills[y - 1] = annual_bill(result.years[static_cast<std::size_t>(y - 1)].import_by_band, tariff, y);
  return bills;
}

Eigen::ArrayXd revenue_series(const SimulationResult& baseline, const SimulationResult& with_system,
                              const TariffSchedule& tariff) {
  if (baseline.horizon() != with_system.horizon())
    throw std::invalid_argument(
        fmt::format("horizon mismatch: baseline {} years, system {} years", baseline.horizon(), with_system.horizon()));
  for (int y = 0; y < baseline.horizon(); ++y) {
    const double a = baseline.years[static_cast<std::size_t>(y)].load;
    const double b = with_system.years[static_cast<std::size_t>(y)].load;
    if (std::abs(a - b) > 1e-9 * std::max(std::abs(a), 1.0))
      throw std::invalid_argument(fmt::format("load mismatch in year {}", y + 1));
  }
  return annual_bills(baseline, tariff) - annual_bills(with_system, tariff);
}

namespace {

double cost_size(const SystemSizing& sizing, Component c, const CostBook& book, double ep_ratio) {
  const double s = sizing.size_of(c);
  if (c == Component::Battery && book.battery_basis == BatteryCostBasis::PerKw) return s / ep_ratio;
  return s;
}

}  // namespace

CashflowSchedule cost_schedule(const CostBook& costbook, const SystemSizing& sizing, int horizon_years,
                               double battery_ep_ratio) {
  if (horizon_years < 1) throw std::invalid_argument("horizon must be at least one year");
  CashflowSchedule cf;
  cf.om = Eigen::ArrayXd::Zero(horizon_years);
  cf.replacement = Eigen::ArrayXd::Zero(horizon_years);
  cf.revenue = Eigen::ArrayXd::Zero(horizon_years);
  for (Component c : kAllComponents) {
    const double size = cost_size(sizing, c, costbook, battery_ep_ratio);
    if (!(size > 0.0)) continue;
    const ComponentCost& cost = costbook.at(c);
    const double capital = cost.unit_cost * size;
    cf.capex += capital;
    cf.om += capital * cost.om_factor;
    for (const auto& r : cost.replacements)
      if (r.year >= 1 && r.year <= horizon_years) cf.replacement[r.year - 1] += capital * r.factor;
  }
  return cf;
}

PresentValues npv_npc(const CashflowSchedule& cf, double discount_rate) {
  PresentValues pv{cf.capex, -cf.capex};
  for (int y = 1; y <= cf.horizon(); ++y) {
    const double d = std::pow(1.0 + discount_rate, -y);
    const double cost = cf.om[y - 1] + cf.replacement[y - 1];
    pv.npc += cost * d;
    pv.npv += (cf.revenue[y - 1] - cost) * d;
  }
  return pv;
}

double self_sufficiency_ratio(const SimulationResult& result) {
  const double load = result.total_load();
  if (!(load > 0.0)) throw std::invalid_argument("self-sufficiency undefined for zero total load");
  return 1.0 - result.total_import() / load;
}

EconomicSummary summarize(const CostBook& costbook, const SystemSizing& sizing, const TariffSchedule& tariff,
                          const SimulationResult& baseline, const SimulationResult& with_system,
                          double battery_ep_ratio) {
  EconomicSummary s;
  s.cashflows = cost_schedule(costbook, sizing, with_system.horizon(), battery_ep_ratio);
  s.bills_baseline = annual_bills(baseline, tariff);
  s.bills_system = annual_bills(with_system, tariff);
  s.cashflows.revenue = revenue_series(baseline, with_system, tariff);
  const PresentValues pv = npv_npc(s.cashflows, costbook.discount_rate);
  s.npc = pv.npc;
  s.npv = pv.npv;
  s.ssr = self_sufficiency_ratio(with_system);
  return s;
}

std::vector<ComponentNpc> npc_breakdown(const CostBook& costbook, const SystemSizing& sizing, int horizon_years,
                                        double battery_ep_ratio) {
  std::vector<ComponentNpc> out;
  for (Component c : kAllComponents) {
    const double size = cost_size(sizing, c, costbook, battery_ep_ratio);
    if (!(size > 0.0)) continue;
    const ComponentCost& cost = costbook.at(c);
    ComponentNpc row{c, cost.unit_cost * size, 0.0, 0.0};
    for (int y = 1; y <= horizon_years; ++y) row.om += row.capex * cost.om_factor * std::pow(1.0 + costbook.discount_rate, -y);
    for (const auto& r : cost.replacements)
      if (r.year >= 1 && r.year <= horizon_years)
        row.replacement += row.capex * r.factor * std::pow(1.0 + costbook.discount_rate, -r.year);
    out.push_back(row);
  }
  return out;
}

void write_cashflow_csv(const std::filesystem::path& path, const CashflowSchedule& cf, double discount_rate) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << "year,capex,om,replacement,revenue,discounted_net\n";
  out << fmt::format("0,{:.6f},0.000000,0.000000,0.000000,{:.6f}\n", cf.capex, -cf.capex);
  for (int y = 1; y <= cf.horizon(); ++y) {
    const double net = cf.revenue[y - 1] - cf.om[y - 1] - cf.replacement[y - 1];
    out << fmt::format("{},0.000000,{:.6f},{:.6f},{:.6f},{:.6f}\n", y, cf.om[y - 1], cf.replacement[y - 1],
                       cf.revenue[y - 1], net * std::pow(1.0 + discount_rate, -y));
  }
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

}  // namespace ressize
