#include "ressize/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace ressize {

void MomfaParams::validate() const {
  if (population < 1) throw std::invalid_argument("population must be at least 1");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be non-negative");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  if (!(eta > 0.0 && eta <= 4.0)) throw std::invalid_argument("eta must lie in (0, 4]");
  if (!(tau > 0.0 && tau <= 2.0)) throw std::invalid_argument("tau must lie in (0, 2]");
  if (!(beta0 >= 0.0 && beta0 <= 1.0)) throw std::invalid_argument("beta0 must lie in [0, 1]");
  if (!(alpha0 >= 0.0)) throw std::invalid_argument("alpha0 must be non-negative");
  if (archive_capacity < 1) throw std::invalid_argument("archive capacity must be at least 1");
}

double chaos_beta_step(double prev) {
  if (prev == 0.0) return 0.0;
  const double inv = 1.0 / prev;
  return inv - std::floor(inv);
}

double levy_sigma_u(double tau) {
  const double num = std::tgamma(1.0 + tau) * std::sin(std::numbers::pi * tau / 2.0);
  const double den = std::tgamma((1.0 + tau) / 2.0) * tau * std::pow(2.0, (tau - 1.0) / 2.0);
  return std::pow(num / den, 1.0 / tau);
}

double levy_sample(double tau, double u, double v) { return u / std::pow(std::abs(v), 1.0 / tau); }

double levy_draw(double tau, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  double v = 0.0;
  while (v == 0.0) v = normal(rng);
  const double u = levy_sigma_u(tau) * normal(rng);
  return levy_sample(tau, u, v);
}

std::vector<Eigen::VectorXd> logistic_init(int n, const DecisionSpace& space, std::uint64_t seed, double eta) {
  if (n < 1) throw std::invalid_argument("population must be at least 1");
  const Eigen::Index d = space.dims();
  std::mt19937_64 rng(stream_seed(seed, 0, 0));
  std::uniform_real_distribution<double> uniform(0.01, 0.99);
  auto fresh_start = [&] {
    for (;;) {
      const double x = uniform(rng);
      if (std::abs(x - 0.25) > 1e-3 && std::abs(x - 0.5) > 1e-3 && std::abs(x - 0.75) > 1e-3) return x;
    }
  };
  std::vector<Eigen::VectorXd> units(static_cast<std::size_t>(n), Eigen::VectorXd(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    double x = fresh_start();
    for (int i = 0; i < n; ++i) {
      units[static_cast<std::size_t>(i)][k] = x;
      x = logistic_step(x, eta);
      // The map can collapse onto 0 or a fixed point in floating point; restart the orbit if so.
      if (!(x > 1e-12 && x < 1.0 - 1e-12) || std::abs(x - (1.0 - 1.0 / eta)) < 1e-12) x = fresh_start();
    }
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(units.size());
  for (const auto& u : units) out.push_back(space.from_unit(u));
  return out;
}

Eigen::VectorXd move_firefly(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, double beta, double alpha,
                             const Eigen::VectorXd& step, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  Eigen::VectorXd next = xi + beta * (xj - xi) + alpha * step;
  return next.cwiseMax(lower).cwiseMin(upper);
}

namespace {

Eigen::VectorXd random_step(Eigen::Index d, double tau, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Eigen::VectorXd step(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double sign = uniform(rng) - 0.5 < 0.0 ? -1.0 : 1.0;
    step[k] = sign * levy_draw(tau, rng);
  }
  return step;
}

}  // namespace

Eigen::VectorXd move_firefly(const Firefly& xi, const Firefly& xj, const MomfaParams& params, int iteration,
                             double beta_chaos, std::mt19937_64& rng) {
  const Eigen::Index d = xi.position.size();
  const double r = (xi.position - xj.position).norm();
  const double beta = attractiveness(beta_chaos, params.beta0, params.gamma, r);
  const double alpha = randomisation_coefficient(params.alpha0, params.theta, iteration);
  return move_firefly(xi.position, xj.position, beta, alpha, random_step(d, params.tau, rng),
                      Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
}

namespace {

double draw_beta_chaos(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double b = 0.0;
  while (!(b > 0.0 && b < 1.0)) b = uniform(rng);
  return b;
}

}  // namespace

RunResult momfa_run(const Problem& problem, const MomfaParams& params, std::size_t budget) {
  params.validate();
  const auto n = static_cast<std::size_t>(params.population);
  if (budget < n) throw std::invalid_argument("budget must be at least the population size");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index d = problem.space.dims();

  RunResult result{ParetoArchive(params.archive_capacity), 0, {}, 0.0};
  std::vector<Eigen::VectorXd> init;
  for (const auto& x : logistic_init(params.population, problem.space, params.seed, params.eta))
    init.push_back(problem.space.to_unit(x));
  std::vector<Solution> pop = evaluate_positions(problem, std::move(init), params.threads);
  result.evaluations = pop.size();
  result.archive.update(pop);
  result.trace.push_back({0, result.evaluations, result.archive.size(), result.archive.feasible_objectives()});

  std::mt19937_64 chaos_rng(stream_seed(params.seed, ~0ULL, 0));
  double beta_chaos = draw_beta_chaos(chaos_rng);

  for (int t = 1; result.evaluations < budget && (params.max_iterations == 0 || t <= params.max_iterations); ++t) {
    assign_rank_and_crowding(pop);
    beta_chaos = chaos_beta_step(beta_chaos);
    if (!(beta_chaos > 0.0 && beta_chaos < 1.0)) beta_chaos = draw_beta_chaos(chaos_rng);
    const double alpha = randomisation_coefficient(params.alpha0, params.theta, t);
    const std::size_t m = std::min(n, budget - result.evaluations);

    std::vector<Eigen::VectorXd> moved(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::mt19937_64 rng(stream_seed(params.seed, static_cast<std::uint64_t>(t), i));
      Eigen::VectorXd u = pop[i].position;
      bool attracted = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !better_ranked(pop[j], pop[i])) continue;
        const double r = (u - pop[j].position).norm();
        const double beta = attractiveness(beta_chaos, params.beta0, params.gamma, r);
        u = move_firefly(u, pop[j].position, beta, alpha, random_step(d, params.tau, rng), Eigen::VectorXd::Zero(d),
                         Eigen::VectorXd::Ones(d));
        attracted = true;
      }
      if (!attracted)
        u = move_firefly(u, u, 0.0, alpha, random_step(d, params.tau, rng), Eigen::VectorXd::Zero(d),
                         Eigen::VectorXd::Ones(d));
      moved[i] = std::move(u);
    }

    std::vector<Solution> offspring = evaluate_positions(problem, std::move(moved), params.threads);
    result.evaluations += offspring.size();
    result.archive.update(offspring);
    std::vector<Solution> pool = std::move(pop);
    pool.insert(pool.end(), offspring.begin(), offspring.end());
    pop = select_survivors(std::move(pool), n);
    result.trace.push_back({t, result.evaluations, result.archive.size(), result.archive.feasible_objectives()});
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace ressize
