#include "mdl/universal.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>

#include "mdl/kernels.hpp"
#include "mdl/universal_impl.hpp"

namespace mdl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double normal_lpdf(double x, double mean, double var) {
  double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
}

double composition_count(std::int64_t d, int r) {
  double c = 1.0;
  for (int j = 1; j < r; ++j) c *= static_cast<double>(d + j) / j;
  return c;
}

// Visit every split of d items into r ordered groups.
void for_each_composition(std::int64_t d, int r,
                          const std::function<void(const std::vector<std::int64_t>&)>& f) {
  std::vector<std::int64_t> c(r, 0);
  c[0] = d;
  while (true) {
    f(c);
    int j = 0;
    while (j < r - 1 && c[j] == 0) ++j;
    if (j == r - 1) break;
    std::int64_t head = c[j];
    c[j] = 0;
    c[0] = head - 1;
    ++c[j + 1];
  }
}

double log_multinom(std::int64_t d, const std::vector<std::int64_t>& parts) {
  double v = std::lgamma(static_cast<double>(d) + 1.0);
  for (std::int64_t p : parts) v -= std::lgamma(static_cast<double>(p) + 1.0);
  return v;
}

double markov_ml_loglik(const SufficientStats& stats, int contexts, int r) {
  double ll = -static_cast<double>(stats.uniform_prefix) * std::log(static_cast<double>(r));
  std::vector<long long> row(r);
  for (int c = 0; c < contexts; ++c) {
    for (int j = 0; j < r; ++j) row[j] = stats.counts[static_cast<std::size_t>(c) * r + j];
    ll += detail::categorical_ml_loglik(row);
  }
  return ll;
}

DataSequence sequence_from_counts(const std::vector<std::int64_t>& counts, int r) {
  std::vector<int> seq;
  std::int64_t n = 0;
  for (std::int64_t c : counts) n += c;
  seq.reserve(n);
  for (int j = 0; j < r; ++j) {
    for (std::int64_t i = 0; i < counts[j]; ++i) seq.push_back(j);
  }
  return DataSequence::categorical(std::move(seq), r);
}

void require_horizon(const DataSequence& prefix, std::int64_t horizon) {
  if (horizon < static_cast<std::int64_t>(prefix.size())) {
    throw InvalidInput("horizon shorter than the prefix");
  }
}

using Kind = UniversalDistribution::Kind;

struct PointImpl : detail::UDistImpl {
  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    require_horizon(prefix, horizon);
    return log_likelihood(family, ParamVector{}, prefix);
  }
};

struct BayesCategoricalImpl : detail::UDistImpl {
  std::vector<double> alpha;  // per-symbol pseudo-counts, shared across contexts
  double alpha_total = 0.0;

  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    require_horizon(prefix, horizon);
    SufficientStats stats = SufficientStats::of(family, prefix);
    int r = family.arity();
    int q = family.context_count();
    double ll = -static_cast<double>(stats.uniform_prefix) * std::log(static_cast<double>(r));
    for (int c = 0; c < q; ++c) {
      long long total = 0;
      for (int j = 0; j < r; ++j) total += stats.counts[static_cast<std::size_t>(c) * r + j];
      if (total == 0) continue;
      ll += std::lgamma(alpha_total) - std::lgamma(alpha_total + total);
      for (int j = 0; j < r; ++j) {
        long long m = stats.counts[static_cast<std::size_t>(c) * r + j];
        if (m > 0) ll += std::lgamma(alpha[j] + m) - std::lgamma(alpha[j]);
      }
    }
    return ll;
  }

  double log_predictive(const DataSequence& full, std::size_t i) const override {
    int r = family.arity();
    if (family.kind() == FamilyKind::MarkovChain && static_cast<int>(i) < family.order()) {
      return -std::log(static_cast<double>(r));
    }
    SufficientStats stats = SufficientStats::of(family, full.prefix(i));
    int ctx = family.kind() == FamilyKind::MarkovChain
                  ? detail::markov_context(full, i, family.order(), r)
                  : 0;
    long long total = 0;
    for (int j = 0; j < r; ++j) total += stats.counts[static_cast<std::size_t>(ctx) * r + j];
    long long m = stats.counts[static_cast<std::size_t>(ctx) * r + full.cat(i)];
    return std::log((m + alpha[full.cat(i)]) / (total + alpha_total));
  }
};

struct BayesGaussianImpl : detail::UDistImpl {
  double prior_mean = 0.0;
  double prior_var = 1.0;

  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    require_horizon(prefix, horizon);
    double s2 = family.sigma2();
    double acc = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      double prec = 1.0 / prior_var + static_cast<double>(i) / s2;
      double post_var = 1.0 / prec;
      double post_mean = post_var * (prior_mean / prior_var + sum / s2);
      acc += normal_lpdf(prefix.value(i), post_mean, post_var + s2);
      sum += prefix.value(i);
    }
    return acc;
  }

  double log_predictive(const DataSequence& full, std::size_t i) const override {
    double s2 = family.sigma2();
    double sum = 0.0;
    for (std::size_t j = 0; j < i; ++j) sum += full.value(j);
    double prec = 1.0 / prior_var + static_cast<double>(i) / s2;
    double post_var = 1.0 / prec;
    double post_mean = post_var * (prior_mean / prior_var + sum / s2);
    return normal_lpdf(full.value(i), post_mean, post_var + s2);
  }
};

struct BayesConditionalImpl : detail::UDistImpl {
  int startup = 1;

  double log_joint(const DataSequence& data) const override {
    if (data.size() <= static_cast<std::size_t>(startup)) {
      throw InvalidInput("start-up covers all the data; nothing left to code");
    }
    return log_prefix_marginal(data, static_cast<std::int64_t>(data.size()));
  }

  double log_predictive(const DataSequence& full, std::size_t i) const override {
    if (i < static_cast<std::size_t>(startup)) return 0.0;
    double s2 = family.sigma2();
    double sum = 0.0;
    for (std::size_t j = 0; j < i; ++j) sum += full.value(j);
    double mean = sum / static_cast<double>(i);
    double var = s2 * (1.0 + 1.0 / static_cast<double>(i));
    return normal_lpdf(full.value(i), mean, var);
  }

  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    require_horizon(prefix, horizon);
    double acc = 0.0;
    for (std::size_t i = startup; i < prefix.size(); ++i) {
      acc += log_predictive(prefix, i);
    }
    return acc;
  }
};

struct NmlImpl : detail::UDistImpl {
  LuckinessFunction v;
  bool uniform_v = true;
  mutable std::mutex memo_mutex;
  mutable std::map<std::int64_t, double> comp_memo;

  double comp_at(std::int64_t n) const {
    std::lock_guard lock(memo_mutex);
    auto it = comp_memo.find(n);
    if (it != comp_memo.end()) return it->second;
    double nats = nml_comp(family, v, n).nats;
    comp_memo.emplace(n, nats);
    return nats;
  }

  // Best attainable log p * v for total counts at sample size n.
  double fit_log(const std::vector<std::int64_t>& counts) const {
    if (uniform_v) {
      std::vector<long long> c(counts.begin(), counts.end());
      return detail::categorical_ml_loglik(c);
    }
    return max_luckiness_log_likelihood(family, v,
                                        sequence_from_counts(counts, family.arity()));
  }

  double log_joint(const DataSequence& data) const override {
    std::int64_t n = static_cast<std::int64_t>(data.size());
    if (n == 0) return 0.0;
    if (family.kind() == FamilyKind::MarkovChain) {
      SufficientStats stats = SufficientStats::of(family, data);
      return markov_ml_loglik(stats, family.context_count(), family.arity()) - comp_at(n);
    }
    if (uniform_v) {
      SufficientStats stats = SufficientStats::of(family, data);
      return detail::categorical_ml_loglik(stats.counts) - comp_at(n);
    }
    return max_luckiness_log_likelihood(family, v, data) - comp_at(n);
  }

  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    require_horizon(prefix, horizon);
    if (horizon == 0) return 0.0;
    std::int64_t l = static_cast<std::int64_t>(prefix.size());
    std::int64_t d = horizon - l;
    int r = family.arity();
    if (family.kind() == FamilyKind::MarkovChain) {
      double count = std::pow(static_cast<double>(r), static_cast<double>(d));
      if (count > 65536.0) {
        throw InvalidInput("markov prefix marginal needs too many suffix continuations");
      }
      std::vector<double> terms;
      std::vector<int> suffix(d, 0);
      while (true) {
        DataSequence full = prefix;
        for (int s : suffix) full = full.appended_cat(s);
        SufficientStats stats = SufficientStats::of(family, full);
        terms.push_back(markov_ml_loglik(stats, family.context_count(), r));
        int pos = static_cast<int>(d) - 1;
        while (pos >= 0 && suffix[pos] == r - 1) {
          suffix[pos] = 0;
          --pos;
        }
        if (pos < 0) break;
        ++suffix[pos];
      }
      return kernels::logsumexp(terms) - comp_at(horizon);
    }
    if (composition_count(d, r) > 2e5) {
      throw InvalidInput("prefix marginal needs too many count completions");
    }
    SufficientStats stats = SufficientStats::of(family, prefix);
    std::vector<double> terms;
    std::vector<std::int64_t> total(r);
    for_each_composition(d, r, [&](const std::vector<std::int64_t>& s) {
      for (int j = 0; j < r; ++j) total[j] = stats.counts[j] + s[j];
      terms.push_back(log_multinom(d, s) + fit_log(total));
    });
    return kernels::logsumexp(terms) - comp_at(horizon);
  }
};

struct LnmlImpl : detail::UDistImpl {
  Eigen::MatrixXd sigma_lk;
  Eigen::MatrixXd prior_prec;
  double logdet_sigma = 0.0;

  double log_joint(const DataSequence& data) const override {
    std::int64_t n = static_cast<std::int64_t>(data.size());
    if (n == 0) return 0.0;
    SufficientStats stats = SufficientStats::of(family, data);
    double s2 = family.sigma2();
    Eigen::MatrixXd a = stats.xtx + prior_prec;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    Eigen::VectorXd beta = ldlt.solve(stats.xty);
    double rss = stats.yty - 2.0 * beta.dot(stats.xty) + beta.dot(stats.xtx * beta);
    double pen = beta.dot(prior_prec * beta);
    double logdet_a = 0.0;
    for (int j = 0; j < a.rows(); ++j) logdet_a += std::log(ldlt.vectorD()(j));
    double neg = (rss + pen) / (2.0 * s2) + 0.5 * n * std::log(2.0 * M_PI * s2) +
                 0.5 * logdet_a + 0.5 * logdet_sigma;
    return -neg;
  }

  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    require_horizon(prefix, horizon);
    return log_joint(prefix);
  }
};

struct TwoPartImpl : detail::UDistImpl {
  std::vector<ParamVector> grid;
  std::vector<double> mass;

  double best_code_stats(const SufficientStats& stats) const {
    double best = kNegInf;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (mass[g] <= 0.0) continue;
      double cand = std::log(mass[g]) + log_likelihood(family, grid[g], stats);
      if (cand > best) best = cand;
    }
    return best;
  }

  double log_joint(const DataSequence& data) const override {
    return best_code_stats(SufficientStats::of(family, data));
  }

  // The deficient mass sits on a separate halt outcome, so only the first
  // step's predictive is sub-normalized; later steps are proper ratios.
  double log_predictive(const DataSequence& full, std::size_t i) const override {
    std::int64_t horizon = static_cast<std::int64_t>(full.size());
    double hi = log_prefix_marginal(full.prefix(i + 1), horizon);
    if (i == 0) return hi;
    return hi - log_prefix_marginal(full.prefix(i), horizon);
  }

  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    require_horizon(prefix, horizon);
    if (!family.categorical()) {
      throw InvalidInput("two-part prefix marginals are only supported for categorical families");
    }
    std::int64_t d = horizon - static_cast<std::int64_t>(prefix.size());
    int r = family.arity();
    if (family.kind() == FamilyKind::MarkovChain) {
      double count = std::pow(static_cast<double>(r), static_cast<double>(d));
      if (count > 65536.0) {
        throw InvalidInput("markov prefix marginal needs too many suffix continuations");
      }
      std::vector<double> terms;
      std::vector<int> suffix(d, 0);
      while (true) {
        DataSequence full = prefix;
        for (int s : suffix) full = full.appended_cat(s);
        terms.push_back(best_code_stats(SufficientStats::of(family, full)));
        int pos = static_cast<int>(d) - 1;
        while (pos >= 0 && suffix[pos] == r - 1) {
          suffix[pos] = 0;
          --pos;
        }
        if (pos < 0) break;
        ++suffix[pos];
      }
      return kernels::logsumexp(terms);
    }
    if (composition_count(d, r) > 2e5) {
      throw InvalidInput("prefix marginal needs too many count completions");
    }
    SufficientStats stats = SufficientStats::of(family, prefix);
    std::vector<double> terms;
    for_each_composition(d, r, [&](const std::vector<std::int64_t>& s) {
      SufficientStats total = stats;
      for (int j = 0; j < r; ++j) total.counts[j] += s[j];
      total.n = horizon;
      terms.push_back(log_multinom(d, s) + best_code_stats(total));
    });
    return kernels::logsumexp(terms);
  }
};

struct PreqImpl : detail::UDistImpl {
  PlugInEstimator est;

  double categorical_pred(long long m, long long total, int r) const {
    if (est.kind == PlugInEstimator::Kind::Ml) {
      if (total == 0) return 1.0 / r;
      return static_cast<double>(m) / static_cast<double>(total);
    }
    return (static_cast<double>(m) + est.add) / (static_cast<double>(total) + est.total);
  }

  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    require_horizon(prefix, horizon);
    double acc = 0.0;
    for (double loss : step_losses(prefix)) acc -= loss;
    return acc;
  }

  double log_predictive(const DataSequence& full, std::size_t i) const override {
    if (family.kind() == FamilyKind::GaussianLocation) {
      double sum = 0.0;
      for (std::size_t j = 0; j < i; ++j) sum += full.value(j);
      double mean = i == 0 ? 0.0 : sum / static_cast<double>(i);
      return normal_lpdf(full.value(i), mean, family.sigma2());
    }
    int r = family.arity();
    int order = family.kind() == FamilyKind::MarkovChain ? family.order() : 0;
    if (static_cast<int>(i) < order) return -std::log(static_cast<double>(r));
    SufficientStats stats = SufficientStats::of(family, full.prefix(i));
    int ctx = order > 0 ? detail::markov_context(full, i, order, r) : 0;
    long long total = 0;
    for (int j = 0; j < r; ++j) total += stats.counts[static_cast<std::size_t>(ctx) * r + j];
    long long m = stats.counts[static_cast<std::size_t>(ctx) * r + full.cat(i)];
    double p = categorical_pred(m, total, r);
    return p > 0.0 ? std::log(p) : kNegInf;
  }

  // One pass with running counts; -log predictive per outcome.
  std::vector<double> step_losses(const DataSequence& data) const {
    std::vector<double> losses;
    losses.reserve(data.size());
    if (family.kind() == FamilyKind::GaussianLocation) {
      double sum = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        double mean = i == 0 ? 0.0 : sum / static_cast<double>(i);
        losses.push_back(-normal_lpdf(data.value(i), mean, family.sigma2()));
        sum += data.value(i);
      }
      return losses;
    }
    int r = family.arity();
    int order = family.kind() == FamilyKind::MarkovChain ? family.order() : 0;
    int q = family.context_count();
    std::vector<long long> counts(static_cast<std::size_t>(q) * r, 0);
    std::vector<long long> totals(q, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (static_cast<int>(i) < order) {
        losses.push_back(std::log(static_cast<double>(r)));
        continue;
      }
      int ctx = order > 0 ? detail::markov_context(data, i, order, r) : 0;
      long long m = counts[static_cast<std::size_t>(ctx) * r + data.cat(i)];
      double p = categorical_pred(m, totals[ctx], r);
      losses.push_back(p > 0.0 ? -std::log(p)
                               : std::numeric_limits<double>::infinity());
      ++counts[static_cast<std::size_t>(ctx) * r + data.cat(i)];
      ++totals[ctx];
    }
    return losses;
  }
};

std::shared_ptr<PointImpl> make_point_impl(const ModelFamily& family, Kind kind) {
  auto impl = std::make_shared<PointImpl>();
  impl->family = family;
  impl->kind = kind;
  impl->label = family.label();
  return impl;
}

}  // namespace

PriorSpec PriorSpec::beta(double alpha_one, double alpha_zero) {
  if (!(alpha_one > 0.0) || !(alpha_zero > 0.0)) {
    throw UnsupportedPrior("beta pseudo-counts must be positive");
  }
  PriorSpec p;
  p.kind_ = Kind::Beta;
  p.alpha_ = {alpha_zero, alpha_one};
  return p;
}

PriorSpec PriorSpec::dirichlet(std::vector<double> alpha) {
  if (alpha.empty()) throw UnsupportedPrior("dirichlet needs at least one category");
  for (double a : alpha) {
    if (!(a > 0.0)) throw UnsupportedPrior("dirichlet pseudo-counts must be positive");
  }
  PriorSpec p;
  p.kind_ = Kind::Dirichlet;
  p.alpha_ = std::move(alpha);
  return p;
}

PriorSpec PriorSpec::symmetric_dirichlet(int arity, double alpha) {
  if (arity < 1) throw UnsupportedPrior("dirichlet needs at least one category");
  return dirichlet(std::vector<double>(arity, alpha));
}

PriorSpec PriorSpec::jeffreys(const ModelFamily& family) {
  if (!family.categorical()) {
    throw UnsupportedPrior("jeffreys prior is only proper for categorical families here");
  }
  return symmetric_dirichlet(family.arity(), 0.5);
}

PriorSpec PriorSpec::normal(double mean, double variance) {
  if (!(variance > 0.0)) throw UnsupportedPrior("location prior variance must be positive");
  PriorSpec p;
  p.kind_ = Kind::Normal;
  p.mean_ = mean;
  p.variance_ = variance;
  return p;
}

PlugInEstimator PlugInEstimator::ml() {
  PlugInEstimator e;
  e.kind = Kind::Ml;
  e.add = 0.0;
  e.total = 0.0;
  return e;
}

PlugInEstimator PlugInEstimator::smoothed_ml(double add) {
  if (!(add > 0.0)) throw InvalidInput("smoothing pseudo-count must be positive");
  PlugInEstimator e;
  e.kind = Kind::SmoothedMl;
  e.add = add;
  e.total = 0.0;  // filled in per family as arity * add
  return e;
}

PlugInEstimator PlugInEstimator::smoothed_ml(double add, double total) {
  if (!(add > 0.0) || !(total > 0.0)) {
    throw InvalidInput("smoothing pseudo-counts must be positive");
  }
  PlugInEstimator e;
  e.kind = Kind::SmoothedMl;
  e.add = add;
  e.total = total;
  return e;
}

UniversalDistribution::UniversalDistribution(std::shared_ptr<const detail::UDistImpl> impl)
    : impl_(std::move(impl)) {}

double UniversalDistribution::log_joint(const DataSequence& data) const {
  return impl_->log_joint(data);
}

double UniversalDistribution::log_predictive(const DataSequence& full, std::size_t i) const {
  if (i >= full.size()) throw InvalidInput("predictive index beyond sequence end");
  return impl_->log_predictive(full, i);
}

double UniversalDistribution::log_prefix_marginal(const DataSequence& prefix,
                                                  std::int64_t horizon) const {
  return impl_->log_prefix_marginal(prefix, horizon);
}

UniversalDistribution::Kind UniversalDistribution::kind() const { return impl_->kind; }

const ModelFamily& UniversalDistribution::family() const { return impl_->family; }

std::string UniversalDistribution::label() const { return impl_->label; }

UniversalDistribution make_bayes(const ModelFamily& family, const PriorSpec& prior) {
  if (family.kind() == FamilyKind::Singleton) {
    return UniversalDistribution(make_point_impl(family, Kind::BayesConjugate));
  }
  if (family.categorical()) {
    if (prior.kind() == PriorSpec::Kind::Normal) {
      throw UnsupportedPrior("normal prior does not fit a categorical family");
    }
    if (static_cast<int>(prior.alpha().size()) != family.arity()) {
      throw UnsupportedPrior("prior pseudo-counts do not match the alphabet");
    }
    auto impl = std::make_shared<BayesCategoricalImpl>();
    impl->family = family;
    impl->kind = Kind::BayesConjugate;
    impl->label = "bayes[" + family.label() + "]";
    impl->alpha = prior.alpha();
    for (double a : impl->alpha) impl->alpha_total += a;
    return UniversalDistribution(impl);
  }
  if (family.kind() == FamilyKind::GaussianLocation) {
    if (prior.kind() != PriorSpec::Kind::Normal) {
      throw UnsupportedPrior("gaussian location needs a normal prior");
    }
    auto impl = std::make_shared<BayesGaussianImpl>();
    impl->family = family;
    impl->kind = Kind::BayesConjugate;
    impl->label = "bayes[" + family.label() + "]";
    impl->prior_mean = prior.mean();
    impl->prior_var = prior.variance();
    return UniversalDistribution(impl);
  }
  throw UnsupportedPrior("no conjugate bayes code for " + family.label() +
                         "; regression uses the luckiness code");
}

UniversalDistribution make_bayes_conditional(const ModelFamily& family, int startup) {
  if (family.kind() != FamilyKind::GaussianLocation) {
    throw UnsupportedPrior("conditional bayes with an improper prior is gaussian-only");
  }
  if (startup < 1) {
    throw InvalidInput("start-up must cover at least one outcome");
  }
  auto impl = std::make_shared<BayesConditionalImpl>();
  impl->family = family;
  impl->kind = Kind::BayesConditional;
  impl->label = "cond-bayes[" + family.label() + "]";
  impl->startup = startup;
  return UniversalDistribution(impl);
}

UniversalDistribution make_nml(const ModelFamily& family, const LuckinessFunction& v) {
  if (family.kind() == FamilyKind::Singleton) {
    return UniversalDistribution(make_point_impl(family, Kind::NmlExact));
  }
  // Raise divergence and unsupported-tilt problems at construction.
  nml_comp(family, v, 1);
  auto impl = std::make_shared<NmlImpl>();
  impl->family = family;
  impl->kind = Kind::NmlExact;
  impl->label = "nml[" + family.label() + "]";
  impl->v = v;
  impl->uniform_v = v.form() == LuckinessFunction::Form::Uniform;
  return UniversalDistribution(impl);
}

UniversalDistribution make_lnml_regression(const ModelFamily& family,
                                           const Eigen::MatrixXd& sigma_lk) {
  if (family.kind() != FamilyKind::LinearRegression) {
    throw InvalidInput("luckiness-regression code needs a linear regression family");
  }
  int m = family.covariate_count();
  if (sigma_lk.rows() != m || sigma_lk.cols() != m) {
    throw InvalidLuckiness("luckiness covariance does not match covariate count");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_lk);
  if (llt.info() != Eigen::Success) {
    throw InvalidLuckiness("luckiness covariance must be positive definite");
  }
  auto impl = std::make_shared<LnmlImpl>();
  impl->family = family;
  impl->kind = Kind::LnmlRegression;
  impl->label = "lnml[" + family.label() + "]";
  impl->sigma_lk = sigma_lk;
  impl->prior_prec = llt.solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::MatrixXd l = llt.matrixL();
  for (int j = 0; j < m; ++j) impl->logdet_sigma += 2.0 * std::log(l(j, j));
  return UniversalDistribution(impl);
}

UniversalDistribution make_two_part(const ModelFamily& family,
                                    std::vector<ParamVector> grid,
                                    std::vector<double> mass) {
  if (grid.empty() || grid.size() != mass.size()) {
    throw InvalidInput("two-part code needs matching non-empty grid and mass");
  }
  double total = 0.0;
  bool any = false;
  for (double w : mass) {
    if (!(w >= 0.0)) throw InvalidInput("two-part mass must be non-negative");
    if (w > 0.0) any = true;
    total += w;
  }
  if (!any) throw InvalidInput("two-part code needs some positive mass");
  if (total > 1.0 + 1e-9) {
    throw InvalidInput("two-part mass must sum to at most 1");
  }
  auto impl = std::make_shared<TwoPartImpl>();
  impl->family = family;
  impl->kind = Kind::TwoPart;
  impl->label = "two-part[" + family.label() + "]";
  impl->grid = std::move(grid);
  impl->mass = std::move(mass);
  return UniversalDistribution(impl);
}

UniversalDistribution make_preq_plugin(const ModelFamily& family,
                                       const PlugInEstimator& estimator) {
  PlugInEstimator est = estimator;
  if (family.kind() == FamilyKind::GaussianLocation) {
    if (est.kind != PlugInEstimator::Kind::Ml) {
      throw InvalidInput("gaussian plug-in supports the ml estimator only");
    }
  } else if (family.categorical()) {
    if (est.kind == PlugInEstimator::Kind::SmoothedMl && est.total == 0.0) {
      est.total = family.arity() * est.add;
    }
  } else {
    throw InvalidInput("plug-in code supports categorical and gaussian families");
  }
  auto impl = std::make_shared<PreqImpl>();
  impl->family = family;
  impl->kind = Kind::PreqPlugin;
  impl->label = "preq[" + family.label() + "]";
  impl->est = est;
  return UniversalDistribution(impl);
}

double bayes_log_marginal(const ModelFamily& family, const PriorSpec& prior,
                          const DataSequence& data) {
  return make_bayes(family, prior).log_joint(data);
}

double bayes_log_predictive(const ModelFamily& family, const PriorSpec& prior,
                            const DataSequence& history, int next_symbol) {
  DataSequence full = history.appended_cat(next_symbol);
  return make_bayes(family, prior).log_predictive(full, history.size());
}

double bayes_log_predictive(const ModelFamily& family, const PriorSpec& prior,
                            const DataSequence& history, double next_value) {
  DataSequence full = history.appended_real(next_value);
  return make_bayes(family, prior).log_predictive(full, history.size());
}

double conditional_bayes_log(const ModelFamily& family, int startup,
                             const DataSequence& data) {
  return make_bayes_conditional(family, startup).log_joint(data);
}

double nml_log_marginal(const ModelFamily& family, const LuckinessFunction& v,
                        const DataSequence& data) {
  return make_nml(family, v).log_joint(data);
}

double lnml_regression_log(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           double sigma2, const Eigen::MatrixXd& sigma_lk) {
  ModelFamily family = ModelFamily::linear_regression(static_cast<int>(x.cols()), sigma2);
  return make_lnml_regression(family, sigma_lk)
      .log_joint(DataSequence::regression(x, y));
}

double two_part_log(const ModelFamily& family, const std::vector<ParamVector>& grid,
                    const std::vector<double>& mass, const DataSequence& data) {
  return make_two_part(family, grid, mass).log_joint(data);
}

double preq_plugin_log(const ModelFamily& family, const PlugInEstimator& estimator,
                       const DataSequence& data) {
  return make_preq_plugin(family, estimator).log_joint(data);
}

std::vector<double> preq_plugin_step_losses(const ModelFamily& family,
                                            const PlugInEstimator& estimator,
                                            const DataSequence& data) {
  UniversalDistribution u = make_preq_plugin(family, estimator);
  // The factory validated and defaulted the estimator; rebuild the impl view.
  auto impl = std::make_shared<PreqImpl>();
  impl->family = family;
  impl->est = estimator;
  if (family.categorical() && impl->est.kind == PlugInEstimator::Kind::SmoothedMl &&
      impl->est.total == 0.0) {
    impl->est.total = family.arity() * impl->est.add;
  }
  return impl->step_losses(data);
}

double regret(const UniversalDistribution& u, const DataSequence& data) {
  double best = max_luckiness_log_likelihood(u.family(), LuckinessFunction::uniform(), data);
  return best - u.log_joint(data);
}

ComplexityValue nml_comp(const ModelFamily& family, const LuckinessFunction& v,
                         std::int64_t n) {
  switch (family.kind()) {
    case FamilyKind::Singleton:
      return {0.0, CompMethod::ExactSum};
    case FamilyKind::Bernoulli:
    case FamilyKind::Multinomial:
      if (v.form() == LuckinessFunction::Form::Uniform) {
        return comp_multinomial_exact(n, family.arity());
      }
      return {comp_categorical_luckiness(family, v, n), CompMethod::ExactSum};
    case FamilyKind::MarkovChain:
      if (v.form() != LuckinessFunction::Form::Uniform) {
        throw InvalidInput("markov NML supports the uniform luckiness only");
      }
      return comp_markov(family.order(), family.arity(), n);
    case FamilyKind::GaussianLocation:
      throw ComplexityDiverges("gaussian location has an infinite NML normalizer");
    case FamilyKind::LinearRegression:
      throw ComplexityDiverges(
          "linear regression has an infinite NML normalizer; use the luckiness code");
  }
  throw InvalidInput("unknown family");
}

}  // namespace mdl
