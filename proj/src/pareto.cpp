#include "ressize/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ressize {

bool dominates(const Objectives& a, const Objectives& b) {
  return (a >= b).all() && (a > b).any();
}

bool constrained_dominates(const Solution& a, const Solution& b) {
  const bool fa = a.feasible(), fb = b.feasible();
  if (fa && !fb) return true;
  if (!fa && !fb) return a.violation < b.violation;
  if (!fa) return false;
  return dominates(a.objectives, b.objectives);
}

namespace {

template <typename Dominates>
std::vector<int> sort_fronts(std::size_t n, Dominates dom) {
  std::vector<std::vector<int>> dominated(n);
  std::vector<int> count(n, 0), rank(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (dom(p, q)) {
        dominated[p].push_back(static_cast<int>(q));
        ++count[q];
      } else if (dom(q, p)) {
        dominated[q].push_back(static_cast<int>(p));
        ++count[p];
      }
    }
  }
  std::vector<int> front;
  for (std::size_t p = 0; p < n; ++p)
    if (count[p] == 0) {
      rank[p] = 1;
      front.push_back(static_cast<int>(p));
    }
  int r = 1;
  while (!front.empty()) {
    std::vector<int> next;
    for (int p : front)
      for (int q : dominated[static_cast<std::size_t>(p)])
        if (--count[static_cast<std::size_t>(q)] == 0) {
          rank[static_cast<std::size_t>(q)] = r + 1;
          next.push_back(q);
        }
    front = std::move(next);
    ++r;
  }
  return rank;
}

void require_finite(const Objectives& o) {
  if (!std::isfinite(o[0]) || !std::isfinite(o[1])) throw std::invalid_argument("objective value is NaN or infinite");
}

std::vector<std::vector<int>> group_fronts(const std::vector<int>& ranks) {
  const int max_rank = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
  std::vector<std::vector<int>> fronts(static_cast<std::size_t>(max_rank));
  for (std::size_t i = 0; i < ranks.size(); ++i) fronts[static_cast<std::size_t>(ranks[i] - 1)].push_back(static_cast<int>(i));
  return fronts;
}

std::vector<Objectives> objectives_of(const std::vector<Solution>& s) {
  std::vector<Objectives> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(x.objectives);
  return out;
}

}  // namespace

std::vector<int> non_dominated_sort(const std::vector<Objectives>& points) {
  for (const auto& p : points) require_finite(p);
  return sort_fronts(points.size(), [&](std::size_t a, std::size_t b) { return dominates(points[a], points[b]); });
}

std::vector<int> non_dominated_sort(const std::vector<Solution>& solutions) {
  for (const auto& s : solutions) require_finite(s.objectives);
  return sort_fronts(solutions.size(),
                     [&](std::size_t a, std::size_t b) { return constrained_dominates(solutions[a], solutions[b]); });
}

std::vector<double> crowding_distance(const std::vector<Objectives>& points, const std::vector<int>& members) {
  const std::size_t m = members.size();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  std::vector<std::size_t> order(m);
  for (int k = 0; k < 2; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points[static_cast<std::size_t>(members[a])][k] < points[static_cast<std::size_t>(members[b])][k];
    });
    const double lo = points[static_cast<std::size_t>(members[order.front()])][k];
    const double hi = points[static_cast<std::size_t>(members[order.back()])][k];
    dist[order.front()] = std::numeric_limits<double>::infinity();
    dist[order.back()] = std::numeric_limits<double>::infinity();
    if (!(hi > lo)) continue;
    for (std::size_t j = 1; j + 1 < m; ++j) {
      const double next = points[static_cast<std::size_t>(members[order[j + 1]])][k];
      const double prev = points[static_cast<std::size_t>(members[order[j - 1]])][k];
      dist[order[j]] += (next - prev) / (hi - lo);
    }
  }
  return dist;
}

void assign_rank_and_crowding(std::vector<Solution>& solutions) {
  const std::vector<int> ranks = non_dominated_sort(solutions);
  const std::vector<Objectives> objs = objectives_of(solutions);
  for (const auto& front : group_fronts(ranks)) {
    const std::vector<double> cd = crowding_distance(objs, front);
    for (std::size_t j = 0; j < front.size(); ++j) {
      Solution& s = solutions[static_cast<std::size_t>(front[j])];
      s.rank = ranks[static_cast<std::size_t>(front[j])];
      s.crowding = cd[j];
    }
  }
}

std::vector<Solution> select_survivors(std::vector<Solution> pool, std::size_t n) {
  assign_rank_and_crowding(pool);
  std::vector<int> ranks;
  ranks.reserve(pool.size());
  for (const auto& s : pool) ranks.push_back(s.rank);
  std::vector<Solution> out;
  out.reserve(n);
  for (auto& front : group_fronts(ranks)) {
    if (out.size() >= n) break;
    if (out.size() + front.size() > n) {
      std::stable_sort(front.begin(), front.end(), [&](int a, int b) {
        return pool[static_cast<std::size_t>(a)].crowding > pool[static_cast<std::size_t>(b)].crowding;
      });
      front.resize(n - out.size());
    }
    for (int i : front) out.push_back(std::move(pool[static_cast<std::size_t>(i)]));
  }
  return out;
}

ParetoArchive::ParetoArchive(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 1) throw std::invalid_argument("archive capacity must be at least 1");
}

bool ParetoArchive::update(const std::vector<Solution>& candidates) {
  const std::size_t old_size = entries_.size();
  std::vector<Solution> pool = entries_;
  for (const auto& c : candidates) {
    require_finite(c.objectives);
    const bool duplicate = std::any_of(pool.begin(), pool.end(), [&](const Solution& e) {
      return (e.objectives == c.objectives).all() && e.violation == c.violation;
    });
    if (!duplicate) pool.push_back(c);
  }
  const std::vector<int> ranks = non_dominated_sort(pool);
  std::vector<Solution> kept;
  std::vector<bool> is_new;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (ranks[i] != 1) continue;
    kept.push_back(std::move(pool[i]));
    is_new.push_back(i >= old_size);
  }
  while (kept.size() > capacity_) {
    std::vector<int> all(kept.size());
    std::iota(all.begin(), all.end(), 0);
    const std::vector<double> cd = crowding_distance(objectives_of(kept), all);
    std::size_t victim = 0;
    for (std::size_t i = 1; i < cd.size(); ++i)
      if (cd[i] <= cd[victim]) victim = i;
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(victim));
    is_new.erase(is_new.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  if (!kept.empty()) {
    std::vector<int> all(kept.size());
    std::iota(all.begin(), all.end(), 0);
    const std::vector<double> cd = crowding_distance(objectives_of(kept), all);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      kept[i].rank = 1;
      kept[i].crowding = cd[i];
    }
  }
  const std::size_t new_count = static_cast<std::size_t>(std::count(is_new.begin(), is_new.end(), true));
  const bool changed = new_count > 0 || kept.size() != old_size;
  entries_ = std::move(kept);
  return changed;
}

std::vector<Objectives> ParetoArchive::feasible_objectives() const {
  std::vector<Objectives> out;
  for (const auto& e : entries_)
    if (e.feasible()) out.push_back(e.objectives);
  return out;
}

double hypervolume(const std::vector<Objectives>& front, const Objectives& reference) {
  for (const auto& p : front) {
    require_finite(p);
    if ((p < reference).any()) throw std::invalid_argument("reference point is not dominated by every front point");
  }
  std::vector<Objectives> pts = front;
  std::sort(pts.begin(), pts.end(), [](const Objectives& a, const Objectives& b) {
    return a[0] > b[0] || (a[0] == b[0] && a[1] > b[1]);
  });
  double area = 0.0;
  double covered = reference[1];
  for (const auto& p : pts) {
    if (p[1] > covered) {
      area += (p[0] - reference[0]) * (p[1] - covered);
      covered = p[1];
    }
  }
  return area;
}

double hypervolume(const ParetoArchive& archive, const Objectives& reference) {
  return hypervolume(archive.feasible_objectives(), reference);
}

}  // namespace ressize
