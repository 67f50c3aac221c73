#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdl/data.hpp"
#include "mdl/errors.hpp"

namespace mdl {

enum class FamilyKind {
  Bernoulli,
  Multinomial,
  MarkovChain,
  GaussianLocation,
  LinearRegression,
  Singleton,
};

// Parameter values plus the free-parameter count of the family they belong to.
// Probability-vector families store the full probability vector even though
// the last entry is determined by the others.
struct ParamVector {
  std::vector<double> values;
  int dimension = 0;
};

class ModelFamily {
public:
  static ModelFamily bernoulli();
  static ModelFamily multinomial(int arity);
  static ModelFamily markov_chain(int order, int arity);
  static ModelFamily gaussian_location(double sigma2);
  static ModelFamily linear_regression(int covariates, double sigma2);
  // One fixed distribution; zero free parameters.
  static ModelFamily singleton(ModelFamily base, ParamVector point);

  FamilyKind kind() const { return kind_; }
  int arity() const { return arity_; }
  int order() const { return order_; }
  double sigma2() const { return sigma2_; }
  int covariate_count() const { return covariates_; }
  // Number of free parameters k.
  int dimension() const;
  // Markov chains: arity^order conditioning contexts; 1 for everything categorical else.
  int context_count() const;
  bool categorical() const;
  DataSequence::Kind data_kind() const;
  const ModelFamily& base() const;
  const ParamVector& point() const;
  std::string label() const;

private:
  ModelFamily() = default;
  FamilyKind kind_ = FamilyKind::Bernoulli;
  int arity_ = 0;
  int order_ = 0;
  int covariates_ = 0;
  double sigma2_ = 1.0;
  std::shared_ptr<const ModelFamily> base_;
  ParamVector point_;
};

struct SufficientStats {
  long long n = 0;
  // Categorical: arity entries; Markov: context_count * arity transition counts.
  std::vector<long long> counts;
  // Markov: leading symbols coded with the uniform start distribution.
  long long uniform_prefix = 0;
  double sum = 0.0;
  double sumsq = 0.0;
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;
  double yty = 0.0;

  static SufficientStats of(const ModelFamily& family, const DataSequence& data);
  // Accumulate outcome i of `data`; repeated calls over i = 0..n-1 must match of().
  void add(const ModelFamily& family, const DataSequence& data, std::size_t i);
};

// Non-negative tilt v(theta) that biases the fit (and the matching code
// length) toward favored parameters.  Uniform recovers plain ML.
class LuckinessFunction {
public:
  enum class Form { Uniform, GaussianOnCoefficients, DiscretizedMass, StartUpData, Custom };

  static LuckinessFunction uniform();
  // v(beta) = exp(-beta^T sigma_lk^{-1} beta / (2 sigma^2)); the family's noise
  // variance sets the scale.  For GaussianLocation, sigma_lk is 1x1.
  static LuckinessFunction gaussian_on_coefficients(Eigen::MatrixXd sigma_lk);
  static LuckinessFunction discretized_mass(std::vector<ParamVector> grid,
                                            std::vector<double> mass);
  // v(theta) = likelihood of the first m outcomes under theta.
  static LuckinessFunction start_up_data(int m);
  // Arbitrary evaluator, linear domain; used with 1-d families.
  static LuckinessFunction custom(std::function<double(const ParamVector&)> v);

  Form form() const { return form_; }
  const Eigen::MatrixXd& sigma_lk() const { return sigma_lk_; }
  int startup() const { return startup_; }
  const std::vector<ParamVector>& grid() const { return grid_; }
  const std::vector<double>& mass() const { return mass_; }

  // log v(theta); -inf where v vanishes.  StartUpData needs the data sequence.
  double log_value(const ModelFamily& family, const ParamVector& params,
                   const DataSequence* data = nullptr) const;

private:
  Form form_ = Form::Uniform;
  Eigen::MatrixXd sigma_lk_;
  int startup_ = 0;
  std::vector<ParamVector> grid_;
  std::vector<double> mass_;
  std::function<double(const ParamVector&)> custom_;
};

// log p_theta(data) in nats; -inf when the parameters give some outcome zero
// probability.  Boundary parameters are legal.
double log_likelihood(const ModelFamily& family, const ParamVector& params,
                      const DataSequence& data);
double log_likelihood(const ModelFamily& family, const ParamVector& params,
                      const SufficientStats& stats);

// Maximum-likelihood parameters; uniform/zero on empty data.
ParamVector mle(const ModelFamily& family, const DataSequence& data);
ParamVector mle(const ModelFamily& family, const SufficientStats& stats);

// argmax_theta p_theta(data) * v(theta).
ParamVector mdl_estimate(const ModelFamily& family, const LuckinessFunction& v,
                         const DataSequence& data);

// Highest achievable log p_theta(data) * v(theta); shared by the NML and
// two-part machinery.
double max_luckiness_log_likelihood(const ModelFamily& family,
                                    const LuckinessFunction& v,
                                    const DataSequence& data);

namespace detail {
// Markov conditioning context of outcome i (symbols i-order..i-1 as a base-r
// number); requires i >= order.
int markov_context(const DataSequence& data, std::size_t i, int order, int arity);
// Max log-likelihood of a categorical count vector: sum_j c_j log(c_j / n).
double categorical_ml_loglik(const std::vector<long long>& counts);
}  // namespace detail

}  // namespace mdl
