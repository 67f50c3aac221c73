#pragma once

#include <string>
#include <vector>

#include "mdl/universal.hpp"

namespace mdl {

struct Candidate {
  std::string label;
  UniversalDistribution dist;
  // -log pi(gamma): the model-index part of the code length.
  double prior_nats = 0.0;

  Candidate(std::string l, UniversalDistribution d, double prior = 0.0)
      : label(std::move(l)), dist(std::move(d)), prior_nats(prior) {}
};

struct SelectionRow {
  std::string label;
  double codelength_nats = 0.0;
  double prior_nats = 0.0;
  double data_nats = 0.0;
  int dimension = 0;
  int rank = 0;
};

struct SelectionResult {
  // Sorted by total code length, best first.
  std::vector<SelectionRow> rows;
  std::string winner;
  // "none", "dimension", or "label": which rule picked the winner.
  std::string tie_break;
};

// Two-part selection: minimize prior_nats - log u(data); near-equal lengths
// (within 1e-12) break toward the smaller dimension, then the smaller label.
SelectionResult select(const std::vector<Candidate>& candidates, const DataSequence& data);

// log(m+1) + log binom(m, k): subset size, then the subset itself.
double gamma_code_length(int m, int k);

struct VarSelConfig {
  double sigma2 = 1.0;
  // Sigma_lk = luckiness_scale * identity on the selected coefficients.
  double luckiness_scale = 1.0;
  enum class Strategy { Auto, Exhaustive, Greedy } strategy = Strategy::Auto;
};

struct VarSelResult {
  std::vector<int> selected;
  double codelength_nats = 0.0;
  std::string strategy;
  // Subsets evaluated, in evaluation order, with total code lengths.
  std::vector<std::pair<std::vector<int>, double>> trace;
};

// MDL subset selection for fixed-design regression: code length is the
// gamma subset code plus the luckiness-regression code of the submatrix.
// Exhaustive up to 20 covariates; greedy forward beyond (or on request),
// stopping as soon as the code length stops decreasing.
VarSelResult variable_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const VarSelConfig& config);

// Jeffreys-Dirichlet Bayes comparison across Markov orders 0..max_order;
// a one-letter alphabet short-circuits to order 0.
SelectionResult markov_order_select(const DataSequence& data, int max_order);

}  // namespace mdl
