#pragma once

#include "ressize/decision_space.hpp"
#include "ressize/pareto.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ressize {

struct Evaluation {
  Objectives objectives = Objectives::Zero();
  double violation = 0.0;
};

/// Must be thread-safe: batches are evaluated concurrently.
using Evaluator = std::function<Evaluation(const Eigen::VectorXd&)>;

struct Problem {
  DecisionSpace space;
  Evaluator evaluate;
};

/// Evaluator failure carrying the decision vector that triggered it.
class EvaluationError : public std::runtime_error {
public:
  EvaluationError(const Eigen::VectorXd& x, const std::string& what);
  const Eigen::VectorXd& decision() const { return x_; }

private:
  Eigen::VectorXd x_;
};

/// Independent stream seed for (seed, iteration, index).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t iteration, std::uint64_t index);

/// Evaluates `xs` on up to `threads` workers; results are in input order.
std::vector<Evaluation> evaluate_batch(const Problem& problem, const std::vector<Eigen::VectorXd>& xs, int threads);

/// Decodes unit-cube positions, evaluates them and wraps the results as solutions.
std::vector<Solution> evaluate_positions(const Problem& problem, std::vector<Eigen::VectorXd> positions, int threads);

struct IterationStat {
  int iteration = 0;
  std::size_t evaluations = 0;
  std::size_t archive_size = 0;
  std::vector<Objectives> front;  // feasible archive objectives after the iteration
};

struct RunResult {
  ParetoArchive archive;
  std::size_t evaluations = 0;
  std::vector<IterationStat> trace;
  double wall_seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Multi-objective firefly algorithm

struct MomfaParams {
  int population = 40;
  int max_iterations = 0;  // 0: run until the evaluation budget is spent
  double beta0 = 0.2;
  double gamma = 1.0;
  double alpha0 = 1.0;
  double theta = 0.9;
  double eta = 4.0;
  double tau = 1.5;
  std::uint64_t seed = 1;
  std::size_t archive_capacity = 100;
  int threads = 1;

  void validate() const;
};

template <typename Scalar>
Scalar logistic_step(Scalar x, Scalar eta) {
  return eta * x * (Scalar(1) - x);
}

template <typename Scalar>
Scalar attractiveness(Scalar beta_chaos, Scalar beta0, Scalar gamma, Scalar r) {
  return (beta_chaos - beta0) * std::exp(-gamma * r * r) + beta0;
}

/// Chaotic attractiveness recurrence: 0 stays 0, otherwise frac(1 / prev).
double chaos_beta_step(double prev);

/// Randomisation weight at iteration t.
inline double randomisation_coefficient(double alpha0, double theta, int t) { return alpha0 * std::pow(theta, t); }

double levy_sigma_u(double tau);
double levy_sample(double tau, double u, double v);
/// Draws v ~ N(0,1) (redrawn while zero) and u ~ N(0, sigma_u^2).
double levy_draw(double tau, std::mt19937_64& rng);

/// `n` points spread by the logistic map, one chaotic sequence per dimension.
std::vector<Eigen::VectorXd> logistic_init(int n, const DecisionSpace& space, std::uint64_t seed, double eta = 4.0);

/// x_i + beta (x_j - x_i) + alpha * step, clamped to [lower, upper].
Eigen::VectorXd move_firefly(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, double beta, double alpha,
                             const Eigen::VectorXd& step, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

/// Move in unit coordinates with a fresh sign-times-Levy step per dimension.
Eigen::VectorXd move_firefly(const Firefly& xi, const Firefly& xj, const MomfaParams& params, int iteration,
                             double beta_chaos, std::mt19937_64& rng);

RunResult momfa_run(const Problem& problem, const MomfaParams& params, std::size_t budget);

// ---------------------------------------------------------------------------
// NSGA-II baseline

struct Nsga2Params {
  int population = 40;
  double crossover_probability = 0.9;
  double eta_c = 15.0;
  double eta_m = 20.0;
  double mutation_rate = -1.0;  // negative: 1 / dims
  std::uint64_t seed = 1;
  std::size_t archive_capacity = 100;
  int threads = 1;

  void validate() const;
};

RunResult nsga2_run(const Problem& problem, const Nsga2Params& params, std::size_t budget);

}  // namespace ressize
