#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdl/complexity.hpp"
#include "mdl/models.hpp"

namespace mdl {

class PriorSpec {
public:
  enum class Kind { Beta, Dirichlet, Normal };

  // alpha_one / alpha_zero are the pseudo-counts for outcomes 1 and 0.
  static PriorSpec beta(double alpha_one, double alpha_zero);
  static PriorSpec dirichlet(std::vector<double> alpha);
  static PriorSpec symmetric_dirichlet(int arity, double alpha);
  // Beta(1/2, 1/2) resp. Dirichlet(1/2, ..., 1/2); per context for Markov chains.
  static PriorSpec jeffreys(const ModelFamily& family);
  // Conjugate location prior N(mean, variance) for GaussianLocation.
  static PriorSpec normal(double mean, double variance);

  Kind kind() const { return kind_; }
  // Category-indexed pseudo-counts (index j belongs to symbol j).
  const std::vector<double>& alpha() const { return alpha_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }

private:
  Kind kind_ = Kind::Beta;
  std::vector<double> alpha_;
  double mean_ = 0.0;
  double variance_ = 1.0;
};

struct PlugInEstimator {
  enum class Kind { Ml, SmoothedMl };
  Kind kind = Kind::SmoothedMl;
  // Predictive (m_j + add) / (m + total); total defaults to arity * add.
  double add = 0.5;
  double total = 0.0;

  static PlugInEstimator ml();
  static PlugInEstimator smoothed_ml(double add);
  static PlugInEstimator smoothed_ml(double add, double total);
};

namespace detail {

// Shared machinery behind UniversalDistribution: one subclass per kind.
struct UDistImpl;

}  // namespace detail

// A distribution over whole sequences used as a one-part code.  Horizon-bound
// kinds (NML, two-part, switch with renormalized prior) are evaluated at the
// horizon given per call: log_joint uses the data length, and predictives are
// marginal ratios at the full sequence's length, so the chain rule telescopes
// exactly for every kind.
class UniversalDistribution {
public:
  enum class Kind {
    BayesConjugate,
    BayesConditional,
    NmlExact,
    LnmlRegression,
    TwoPart,
    PreqPlugin,
    Switch,
  };

  double log_joint(const DataSequence& data) const;
  // log P(outcome i | first i outcomes), horizon = full.size().
  double log_predictive(const DataSequence& full, std::size_t i) const;
  // log P(first |prefix| outcomes = prefix) under horizon-n coding;
  // the empty prefix gives the total log-mass (0 for proper kinds).
  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const;

  Kind kind() const;
  const ModelFamily& family() const;
  std::string label() const;

  explicit UniversalDistribution(std::shared_ptr<const detail::UDistImpl> impl);

private:
  std::shared_ptr<const detail::UDistImpl> impl_;
};

UniversalDistribution make_bayes(const ModelFamily& family, const PriorSpec& prior);
// GaussianLocation with an improper uniform location prior; the first
// `startup` outcomes are coded for free and the rest conditionally.
UniversalDistribution make_bayes_conditional(const ModelFamily& family, int startup);
UniversalDistribution make_nml(const ModelFamily& family,
                               const LuckinessFunction& v = LuckinessFunction::uniform());
UniversalDistribution make_lnml_regression(const ModelFamily& family,
                                           const Eigen::MatrixXd& sigma_lk);
UniversalDistribution make_two_part(const ModelFamily& family,
                                    std::vector<ParamVector> grid,
                                    std::vector<double> mass);
UniversalDistribution make_preq_plugin(const ModelFamily& family,
                                       const PlugInEstimator& estimator);

double bayes_log_marginal(const ModelFamily& family, const PriorSpec& prior,
                          const DataSequence& data);
double bayes_log_predictive(const ModelFamily& family, const PriorSpec& prior,
                            const DataSequence& history, int next_symbol);
double bayes_log_predictive(const ModelFamily& family, const PriorSpec& prior,
                            const DataSequence& history, double next_value);
double conditional_bayes_log(const ModelFamily& family, int startup,
                             const DataSequence& data);
double nml_log_marginal(const ModelFamily& family, const LuckinessFunction& v,
                        const DataSequence& data);
double lnml_regression_log(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           double sigma2, const Eigen::MatrixXd& sigma_lk);
double two_part_log(const ModelFamily& family, const std::vector<ParamVector>& grid,
                    const std::vector<double>& mass, const DataSequence& data);
double preq_plugin_log(const ModelFamily& family, const PlugInEstimator& estimator,
                       const DataSequence& data);

// Per-outcome -log predictive under the plug-in strategy, one pass.
std::vector<double> preq_plugin_step_losses(const ModelFamily& family,
                                            const PlugInEstimator& estimator,
                                            const DataSequence& data);

// max_theta log p_theta(data) - log u(data).
double regret(const UniversalDistribution& u, const DataSequence& data);

// COMP used by the NML code for `family` at horizon n (provenance included).
ComplexityValue nml_comp(const ModelFamily& family, const LuckinessFunction& v,
                         std::int64_t n);

}  // namespace mdl
