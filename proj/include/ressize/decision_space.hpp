#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace ressize {

enum class VariableKind : std::uint8_t { Continuous, IntegerHour, DayOfYear };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  VariableKind kind = VariableKind::Continuous;
};

/// Box-bounded decision vector. Search moves happen in the unit cube; discrete
/// variables are rounded when a position is decoded for evaluation.
class DecisionSpace {
public:
  DecisionSpace() = default;
  explicit DecisionSpace(std::vector<Variable> variables);

  Eigen::Index dims() const { return static_cast<Eigen::Index>(vars_.size()); }
  const Variable& operator[](Eigen::Index i) const { return vars_[static_cast<std::size_t>(i)]; }
  const std::vector<Variable>& variables() const { return vars_; }
  std::vector<std::string> names() const;
  Eigen::Index index_of(const std::string& name) const;

  Eigen::VectorXd lower() const;
  Eigen::VectorXd upper() const;

  Eigen::VectorXd from_unit(const Eigen::VectorXd& u) const;
  Eigen::VectorXd to_unit(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
  Eigen::VectorXd round_discrete(const Eigen::VectorXd& x) const;
  /// Unit-cube position to the vector handed to the evaluator.
  Eigen::VectorXd decode(const Eigen::VectorXd& u) const { return round_discrete(clamp(from_unit(u))); }

private:
  std::vector<Variable> vars_;
};

}  // namespace ressize
