#include "ressize/decision_space.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ressize {

DecisionSpace::DecisionSpace(std::vector<Variable> variables) : vars_(std::move(variables)) {
  if (vars_.empty()) throw std::invalid_argument("decision space needs at least one variable");
  for (const auto& v : vars_) {
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper) || !(v.lower < v.upper))
      throw std::invalid_argument(fmt::format("variable '{}' needs finite bounds with lower < upper", v.name));
  }
}

std::vector<std::string> DecisionSpace::names() const {
  std::vector<std::string> out;
  out.reserve(vars_.size());
  for (const auto& v : vars_) out.push_back(v.name);
  return out;
}

Eigen::Index DecisionSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return static_cast<Eigen::Index>(i);
  throw std::out_of_range(fmt::format("no decision variable '{}'", name));
}

Eigen::VectorXd DecisionSpace::lower() const {
  Eigen::VectorXd lo(dims());
  for (Eigen::Index i = 0; i < dims(); ++i) lo[i] = (*this)[i].lower;
  return lo;
}

Eigen::VectorXd DecisionSpace::upper() const {
  Eigen::VectorXd hi(dims());
  for (Eigen::Index i = 0; i < dims(); ++i) hi[i] = (*this)[i].upper;
  return hi;
}

Eigen::VectorXd DecisionSpace::from_unit(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd lo = lower();
  return lo.array() + u.array() * (upper() - lo).array();
}

Eigen::VectorXd DecisionSpace::to_unit(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd lo = lower();
  return (x - lo).array() / (upper() - lo).array();
}

Eigen::VectorXd DecisionSpace::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower()).cwiseMin(upper());
}

Eigen::VectorXd DecisionSpace::round_discrete(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = x;
  for (Eigen::Index i = 0; i < dims(); ++i) {
    if ((*this)[i].kind == VariableKind::Continuous) continue;
    out[i] = std::clamp(std::round(out[i]), std::ceil((*this)[i].lower), std::floor((*this)[i].upper));
  }
  return out;
}

}  // namespace ressize
