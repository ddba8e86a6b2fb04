#include "ressize/optimizer.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace ressize {

namespace {

std::string describe(const Eigen::VectorXd& x, const std::string& what) {
  std::vector<double> v(x.data(), x.data() + x.size());
  return fmt::format("evaluation failed at [{}]: {}", fmt::join(v, ", "), what);
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

EvaluationError::EvaluationError(const Eigen::VectorXd& x, const std::string& what)
    : std::runtime_error(describe(x, what)), x_(x) {}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t iteration, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ iteration) ^ index);
}

std::vector<Evaluation> evaluate_batch(const Problem& problem, const std::vector<Eigen::VectorXd>& xs, int threads) {
  std::vector<Evaluation> out(xs.size());
  std::vector<std::exception_ptr> errors(xs.size());
  auto run_one = [&](std::size_t i) {
    try {
      out[i] = problem.evaluate(xs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), xs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < xs.size(); i = next++) run_one(i);
      });
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const EvaluationError&) {
      throw;
    } catch (const std::exception& e) {
      throw EvaluationError(xs[i], e.what());
    } catch (...) {
      throw EvaluationError(xs[i], "unknown error");
    }
  }
  return out;
}

std::vector<Solution> evaluate_positions(const Problem& problem, std::vector<Eigen::VectorXd> positions, int threads) {
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(positions.size());
  for (const auto& u : positions) xs.push_back(problem.space.decode(u));
  const std::vector<Evaluation> evals = evaluate_batch(problem, xs, threads);
  std::vector<Solution> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!evals[i].objectives.allFinite() || !std::isfinite(evals[i].violation))
      throw EvaluationError(xs[i], "objective is not finite");
    out[i].position = std::move(positions[i]);
    out[i].x = std::move(xs[i]);
    out[i].objectives = evals[i].objectives;
    out[i].violation = std::max(0.0, evals[i].violation);
  }
  return out;
}

}  // namespace ressize
