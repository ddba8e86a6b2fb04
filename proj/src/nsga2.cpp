#include "ressize/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ressize {

void Nsga2Params::validate() const {
  if (population < 2) throw std::invalid_argument("population must be at least 2");
  if (!(crossover_probability >= 0.0 && crossover_probability <= 1.0))
    throw std::invalid_argument("crossover probability must lie in [0, 1]");
  if (!(eta_c >= 0.0) || !(eta_m >= 0.0)) throw std::invalid_argument("distribution indices must be non-negative");
  if (mutation_rate > 1.0) throw std::invalid_argument("mutation rate must not exceed 1");
  if (archive_capacity < 1) throw std::invalid_argument("archive capacity must be at least 1");
}

namespace {

using Rng = std::mt19937_64;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Bounded simulated binary crossover on [0, 1].
void sbx(Eigen::VectorXd& a, Eigen::VectorXd& b, double eta_c, Rng& rng) {
  const double e = eta_c + 1.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (uniform01(rng) > 0.5) continue;
    if (std::abs(a[k] - b[k]) <= 1e-14) continue;
    const double y1 = std::min(a[k], b[k]);
    const double y2 = std::max(a[k], b[k]);
    const double r = uniform01(rng);
    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -e);
      return r <= 1.0 / alpha ? std::pow(r * alpha, 1.0 / e) : std::pow(1.0 / (2.0 - r * alpha), 1.0 / e);
    };
    const double bq1 = spread(1.0 + 2.0 * y1 / (y2 - y1));
    const double bq2 = spread(1.0 + 2.0 * (1.0 - y2) / (y2 - y1));
    double c1 = std::clamp(0.5 * ((y1 + y2) - bq1 * (y2 - y1)), 0.0, 1.0);
    double c2 = std::clamp(0.5 * ((y1 + y2) + bq2 * (y2 - y1)), 0.0, 1.0);
    if (uniform01(rng) <= 0.5) std::swap(c1, c2);
    a[k] = c1;
    b[k] = c2;
  }
}

void polynomial_mutation(Eigen::VectorXd& x, double eta_m, double rate, Rng& rng) {
  const double e = eta_m + 1.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (uniform01(rng) > rate) continue;
    const double y = x[k];
    const double r = uniform01(rng);
    double dq = 0.0;
    if (r < 0.5) {
      const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - y, e);
      dq = std::pow(val, 1.0 / e) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(y, e);
      dq = 1.0 - std::pow(val, 1.0 / e);
    }
    x[k] = std::clamp(y + dq, 0.0, 1.0);
  }
}

const Solution& tournament(const std::vector<Solution>& pop, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  const Solution& a = pop[pick(rng)];
  const Solution& b = pop[pick(rng)];
  return better_ranked(b, a) ? b : a;
}

}  // namespace

RunResult nsga2_run(const Problem& problem, const Nsga2Params& params, std::size_t budget) {
  params.validate();
  const auto n = static_cast<std::size_t>(params.population);
  if (budget < n) throw std::invalid_argument("budget must be at least the population size");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index d = problem.space.dims();
  const double rate = params.mutation_rate < 0.0 ? 1.0 / static_cast<double>(d) : params.mutation_rate;

  RunResult result{ParetoArchive(params.archive_capacity), 0, {}, 0.0};
  Rng init_rng(stream_seed(params.seed, 0, 0));
  std::vector<Eigen::VectorXd> init(n, Eigen::VectorXd(d));
  for (auto& u : init)
    for (Eigen::Index k = 0; k < d; ++k) u[k] = uniform01(init_rng);
  std::vector<Solution> pop = evaluate_positions(problem, std::move(init), params.threads);
  result.evaluations = pop.size();
  result.archive.update(pop);
  assign_rank_and_crowding(pop);
  result.trace.push_back({0, result.evaluations, result.archive.size(), result.archive.feasible_objectives()});

  for (int gen = 1; result.evaluations < budget; ++gen) {
    const std::size_t m = std::min(n, budget - result.evaluations);
    Rng rng(stream_seed(params.seed, static_cast<std::uint64_t>(gen), 0));
    std::vector<Eigen::VectorXd> children;
    children.reserve(m + 1);
    while (children.size() < m) {
      Eigen::VectorXd a = tournament(pop, rng).position;
      Eigen::VectorXd b = tournament(pop, rng).position;
      if (uniform01(rng) <= params.crossover_probability) sbx(a, b, params.eta_c, rng);
      polynomial_mutation(a, params.eta_m, rate, rng);
      polynomial_mutation(b, params.eta_m, rate, rng);
      children.push_back(std::move(a));
      if (children.size() < m) children.push_back(std::move(b));
    }
    std::vector<Solution> offspring = evaluate_positions(problem, std::move(children), params.threads);
    result.evaluations += offspring.size();
    result.archive.update(offspring);
    std::vector<Solution> pool = std::move(pop);
    pool.insert(pool.end(), offspring.begin(), offspring.end());
    pop = select_survivors(std::move(pool), n);
    assign_rank_and_crowding(pop);
    result.trace.push_back({gen, result.evaluations, result.archive.size(), result.archive.feasible_objectives()});
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace ressize
