#include "mdl/selection.hpp"

#include <algorithm>
#include <cmath>

namespace mdl {

namespace {

double log_binom_d(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& x, const std::vector<int>& cols) {
  Eigen::MatrixXd s(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) s.col(j) = x.col(cols[j]);
  return s;
}

double subset_codelength(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const VarSelConfig& config, const std::vector<int>& cols) {
  int m = static_cast<int>(x.cols());
  int k = static_cast<int>(cols.size());
  double model_part = gamma_code_length(m, k);
  Eigen::MatrixXd xs = submatrix(x, cols);
  Eigen::MatrixXd sigma_lk =
      config.luckiness_scale * Eigen::MatrixXd::Identity(k, k);
  double data_part = -lnml_regression_log(xs, y, config.sigma2, sigma_lk);
  return model_part + data_part;
}

}  // namespace

SelectionResult select(const std::vector<Candidate>& candidates, const DataSequence& data) {
  if (candidates.empty()) throw InvalidInput("selection needs at least one candidate");
  SelectionResult result;
  result.rows.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    SelectionRow row;
    row.label = c.label;
    row.prior_nats = c.prior_nats;
    row.data_nats = -c.dist.log_joint(data);
    row.codelength_nats = row.prior_nats + row.data_nats;
    row.dimension = c.dist.family().dimension();
    result.rows.push_back(std::move(row));
  }
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [&](const SelectionRow& a, const SelectionRow& b) {
                     if (!near(a.codelength_nats, b.codelength_nats)) {
                       return a.codelength_nats < b.codelength_nats;
                     }
                     if (a.dimension != b.dimension) return a.dimension < b.dimension;
                     return a.label < b.label;
                   });
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    result.rows[i].rank = static_cast<int>(i) + 1;
  }
  result.winner = result.rows.front().label;
  result.tie_break = "none";
  if (result.rows.size() > 1 &&
      near(result.rows[0].codelength_nats, result.rows[1].codelength_nats)) {
    result.tie_break = result.rows[0].dimension != result.rows[1].dimension
                           ? "dimension"
                           : "label";
  }
  return result;
}

double gamma_code_length(int m, int k) {
  if (m < 0 || k < 0 || k > m) throw InvalidInput("subset code needs 0 <= k <= m");
  return std::log(m + 1.0) + log_binom_d(m, k);
}

VarSelResult variable_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const VarSelConfig& config) {
  if (x.rows() != y.size()) throw InvalidInput("design matrix rows must match response length");
  if (!(config.sigma2 > 0.0)) throw InvalidInput("noise variance must be positive");
  if (!(config.luckiness_scale > 0.0)) throw InvalidInput("luckiness scale must be positive");
  int m = static_cast<int>(x.cols());
  bool exhaustive;
  switch (config.strategy) {
    case VarSelConfig::Strategy::Exhaustive:
      if (m > 20) throw InvalidInput("exhaustive search is capped at 20 covariates");
      exhaustive = true;
      break;
    case VarSelConfig::Strategy::Greedy:
      exhaustive = false;
      break;
    default:
      exhaustive = m <= 20;
  }
  VarSelResult result;
  if (exhaustive) {
    result.strategy = "exhaustive";
    double best = 0.0;
    std::vector<int> best_cols;
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
      std::vector<int> cols;
      for (int j = 0; j < m; ++j) {
        if (bits & (1u << j)) cols.push_back(j);
      }
      double len = subset_codelength(x, y, config, cols);
      result.trace.emplace_back(cols, len);
      // Strict improvement keeps the earlier (smaller, lexicographic) subset
      // on ties; the enumeration order makes that deterministic.
      if (bits == 0 || len < best - 1e-12 ||
          (len < best + 1e-12 && cols.size() < best_cols.size())) {
        best = len;
        best_cols = cols;
      }
    }
    result.selected = best_cols;
    result.codelength_nats = best;
    return result;
  }
  result.strategy = "greedy";
  std::vector<int> cols;
  double best = subset_codelength(x, y, config, cols);
  result.trace.emplace_back(cols, best);
  std::vector<bool> used(m, false);
  while (static_cast<int>(cols.size()) < m) {
    int pick = -1;
    double pick_len = best;
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      std::vector<int> trial = cols;
      trial.push_back(j);
      std::sort(trial.begin(), trial.end());
      double len = subset_codelength(x, y, config, trial);
      if (len < pick_len - 1e-12) {
        pick_len = len;
        pick = j;
      }
    }
    if (pick < 0) break;
    used[pick] = true;
    cols.push_back(pick);
    std::sort(cols.begin(), cols.end());
    best = pick_len;
    result.trace.emplace_back(cols, best);
  }
  result.selected = cols;
  result.codelength_nats = best;
  return result;
}

SelectionResult markov_order_select(const DataSequence& data, int max_order) {
  if (data.kind() != DataSequence::Kind::Categorical) {
    throw InvalidInput("order selection needs a categorical sequence");
  }
  if (max_order < 0) throw InvalidInput("maximum order must be non-negative");
  int r = data.arity();
  std::vector<Candidate> candidates;
  int top = r == 1 ? 0 : max_order;
  for (int o = 0; o <= top; ++o) {
    ModelFamily family = ModelFamily::markov_chain(o, r);
    candidates.emplace_back("order=" + std::to_string(o),
                            make_bayes(family, PriorSpec::jeffreys(family)));
  }
  return select(candidates, data);
}

}  // namespace mdl
