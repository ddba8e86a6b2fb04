#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace ressize {

/// Two objectives, both maximized.
using Objectives = Eigen::Array2d;

struct Solution {
  Eigen::VectorXd position;  // unit-cube coordinates
  Eigen::VectorXd x;         // decoded vector that was evaluated
  Objectives objectives = Objectives::Zero();
  double violation = 0.0;  // 0 when feasible
  int rank = 0;
  double crowding = 0.0;

  bool feasible() const { return violation <= 0.0; }
};

using Firefly = Solution;

bool dominates(const Objectives& a, const Objectives& b);
/// Feasible beats infeasible; among infeasible, smaller violation wins; otherwise plain dominance.
bool constrained_dominates(const Solution& a, const Solution& b);

/// 1-based non-domination ranks. Throws on NaN.
std::vector<int> non_dominated_sort(const std::vector<Objectives>& points);
std::vector<int> non_dominated_sort(const std::vector<Solution>& solutions);

/// Crowding distance of `members` (indices into `points`), returned in member order.
std::vector<double> crowding_distance(const std::vector<Objectives>& points, const std::vector<int>& members);

void assign_rank_and_crowding(std::vector<Solution>& solutions);

/// Brighter / fitter: lower rank, or equal rank with larger crowding distance.
inline bool better_ranked(const Solution& a, const Solution& b) {
  return a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding);
}

/// Elitist reduction to `n` survivors by rank, then crowding within the split front.
std::vector<Solution> select_survivors(std::vector<Solution> pool, std::size_t n);

class ParetoArchive {
public:
  explicit ParetoArchive(std::size_t capacity = 100);

  /// Merges candidates, keeping only mutually non-dominated entries. Returns true if the set changed.
  bool update(const std::vector<Solution>& candidates);

  const std::vector<Solution>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::vector<Objectives> feasible_objectives() const;

private:
  std::size_t capacity_;
  std::vector<Solution> entries_;
};

/// Exact 2-D hypervolume of the region dominated by `front` and bounded by `reference`.
double hypervolume(const std::vector<Objectives>& front, const Objectives& reference);
double hypervolume(const ParetoArchive& archive, const Objectives& reference);

}  // namespace ressize
