#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mdl/errors.hpp"

namespace mdl {

// Observation sequence handed to every model-fitting and coding routine.
// Categorical sequences carry their alphabet size; regression sequences carry
// a fixed design matrix row per outcome.
class DataSequence {
public:
  enum class Kind { Categorical, Real, Regression };

  DataSequence() : kind_(Kind::Categorical), arity_(2) {}

  static DataSequence categorical(std::vector<int> values, int arity);
  // Convenience for binary strings like "0011".
  static DataSequence bits(std::string_view s);
  static DataSequence real(std::vector<double> values);
  static DataSequence regression(Eigen::MatrixXd x, Eigen::VectorXd y);

  Kind kind() const { return kind_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  int arity() const { return arity_; }
  int cat(std::size_t i) const { return cats_[i]; }
  const std::vector<int>& cats() const { return cats_; }

  double value(std::size_t i) const { return reals_[i]; }
  const std::vector<double>& values() const { return reals_; }

  const Eigen::MatrixXd& design() const { return x_; }
  const Eigen::VectorXd& response() const { return y_; }

  DataSequence prefix(std::size_t len) const;
  DataSequence suffix(std::size_t from) const;
  DataSequence appended_cat(int symbol) const;
  DataSequence appended_real(double v) const;

private:
  Kind kind_;
  int arity_ = 0;
  std::vector<int> cats_;
  std::vector<double> reals_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
};

}  // namespace mdl
