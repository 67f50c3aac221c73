#include "mdl/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mdl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

long long ipow(int base, int exp) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

// c * log(theta) with the 0 * log 0 = 0 convention.
double count_log_term(long long c, double theta) {
  if (c == 0) return 0.0;
  return static_cast<double>(c) * std::log(theta);
}

void check_prob_vector(const std::vector<double>& p, std::size_t lo, std::size_t len,
                       const char* what) {
  double s = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    double v = p[lo + j];
    if (!(v >= -1e-12) || !(v <= 1.0 + 1e-12)) {
      throw InvalidInput(std::string(what) + ": probabilities must lie in [0,1]");
    }
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) {
    throw InvalidInput(std::string(what) + ": probabilities must sum to 1");
  }
}

void check_params(const ModelFamily& family, const ParamVector& params) {
  std::size_t want = 0;
  switch (family.kind()) {
    case FamilyKind::Bernoulli: want = 1; break;
    case FamilyKind::Multinomial: want = family.arity(); break;
    case FamilyKind::MarkovChain:
      want = static_cast<std::size_t>(family.context_count()) * family.arity();
      break;
    case FamilyKind::GaussianLocation: want = 1; break;
    case FamilyKind::LinearRegression: want = family.covariate_count(); break;
    case FamilyKind::Singleton:
      if (!params.values.empty() &&
          params.values.size() != family.point().values.size()) {
        throw InvalidInput("singleton parameters must be empty or match the point");
      }
      return;
  }
  if (params.values.size() != want) {
    throw InvalidInput("parameter vector has wrong length for " + family.label());
  }
  if (family.kind() == FamilyKind::Bernoulli) {
    double t = params.values[0];
    if (!(t >= 0.0) || !(t <= 1.0)) throw InvalidInput("bernoulli parameter outside [0,1]");
  } else if (family.kind() == FamilyKind::Multinomial) {
    check_prob_vector(params.values, 0, family.arity(), "multinomial");
  } else if (family.kind() == FamilyKind::MarkovChain) {
    for (int c = 0; c < family.context_count(); ++c) {
      check_prob_vector(params.values, static_cast<std::size_t>(c) * family.arity(),
                        family.arity(), "markov row");
    }
  }
}

void check_data_kind(const ModelFamily& family, const DataSequence& data) {
  if (data.kind() != family.data_kind()) {
    throw InvalidInput("data kind does not match family " + family.label());
  }
  if (family.categorical() && data.arity() != family.arity()) {
    throw InvalidInput("data alphabet does not match family " + family.label());
  }
  if (family.kind() == FamilyKind::LinearRegression && !data.empty() &&
      data.design().cols() != family.covariate_count()) {
    throw InvalidInput("design matrix width does not match family " + family.label());
  }
  if (family.kind() == FamilyKind::Singleton) check_data_kind(family.base(), data);
}

ParamVector make_params(std::vector<double> values, int dim) {
  ParamVector p;
  p.values = std::move(values);
  p.dimension = dim;
  return p;
}

// Maximize f on [a, b] by golden-section, assuming f is unimodal on the
// bracket; the callers pre-scan a grid so a good bracket comes in.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  const double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

namespace detail {

int markov_context(const DataSequence& data, std::size_t i, int order, int arity) {
  int ctx = 0;
  for (int j = order; j >= 1; --j) {
    ctx = ctx * arity + data.cat(i - j);
  }
  return ctx;
}

double categorical_ml_loglik(const std::vector<long long>& counts) {
  long long n = 0;
  for (long long c : counts) n += c;
  if (n == 0) return 0.0;
  double ll = 0.0;
  for (long long c : counts) {
    if (c > 0) ll += static_cast<double>(c) * std::log(static_cast<double>(c) / n);
  }
  return ll;
}

}  // namespace detail

ModelFamily ModelFamily::bernoulli() {
  ModelFamily f;
  f.kind_ = FamilyKind::Bernoulli;
  f.arity_ = 2;
  return f;
}

ModelFamily ModelFamily::multinomial(int arity) {
  if (arity < 1) throw InvalidInput("multinomial arity must be at least 1");
  ModelFamily f;
  f.kind_ = FamilyKind::Multinomial;
  f.arity_ = arity;
  return f;
}

ModelFamily ModelFamily::markov_chain(int order, int arity) {
  if (order < 0) throw InvalidInput("markov order must be non-negative");
  if (arity < 1) throw InvalidInput("markov arity must be at least 1");
  if (order > 0 && ipow(arity, order) > (1 << 20)) {
    throw InvalidInput("markov context space too large");
  }
  ModelFamily f;
  f.kind_ = FamilyKind::MarkovChain;
  f.arity_ = arity;
  f.order_ = order;
  return f;
}

ModelFamily ModelFamily::gaussian_location(double sigma2) {
  if (!(sigma2 > 0.0)) throw InvalidInput("gaussian variance must be positive");
  ModelFamily f;
  f.kind_ = FamilyKind::GaussianLocation;
  f.sigma2_ = sigma2;
  return f;
}

ModelFamily ModelFamily::linear_regression(int covariates, double sigma2) {
  if (covariates < 0) throw InvalidInput("covariate count must be non-negative");
  if (!(sigma2 > 0.0)) throw InvalidInput("regression noise variance must be positive");
  ModelFamily f;
  f.kind_ = FamilyKind::LinearRegression;
  f.covariates_ = covariates;
  f.sigma2_ = sigma2;
  return f;
}

ModelFamily ModelFamily::singleton(ModelFamily base, ParamVector point) {
  if (base.kind_ == FamilyKind::Singleton) throw InvalidInput("nested singleton family");
  check_params(base, point);
  ModelFamily f;
  f.kind_ = FamilyKind::Singleton;
  f.arity_ = base.arity_;
  f.order_ = base.order_;
  f.covariates_ = base.covariates_;
  f.sigma2_ = base.sigma2_;
  f.base_ = std::make_shared<ModelFamily>(std::move(base));
  f.point_ = std::move(point);
  return f;
}

int ModelFamily::dimension() const {
  switch (kind_) {
    case FamilyKind::Bernoulli: return 1;
    case FamilyKind::Multinomial: return arity_ - 1;
    case FamilyKind::MarkovChain: return context_count() * (arity_ - 1);
    case FamilyKind::GaussianLocation: return 1;
    case FamilyKind::LinearRegression: return covariates_;
    case FamilyKind::Singleton: return 0;
  }
  return 0;
}

int ModelFamily::context_count() const {
  if (kind_ == FamilyKind::MarkovChain) return static_cast<int>(ipow(arity_, order_));
  if (kind_ == FamilyKind::Singleton) return base().context_count();
  return 1;
}

bool ModelFamily::categorical() const {
  switch (kind_) {
    case FamilyKind::Bernoulli:
    case FamilyKind::Multinomial:
    case FamilyKind::MarkovChain:
      return true;
    case FamilyKind::Singleton:
      return base().categorical();
    default:
      return false;
  }
}

DataSequence::Kind ModelFamily::data_kind() const {
  switch (kind_) {
    case FamilyKind::Bernoulli:
    case FamilyKind::Multinomial:
    case FamilyKind::MarkovChain:
      return DataSequence::Kind::Categorical;
    case FamilyKind::GaussianLocation:
      return DataSequence::Kind::Real;
    case FamilyKind::LinearRegression:
      return DataSequence::Kind::Regression;
    case FamilyKind::Singleton:
      return base().data_kind();
  }
  return DataSequence::Kind::Categorical;
}

const ModelFamily& ModelFamily::base() const {
  if (kind_ != FamilyKind::Singleton || !base_) {
    throw InvalidInput("base() is only defined for singleton families");
  }
  return *base_;
}

const ParamVector& ModelFamily::point() const {
  if (kind_ != FamilyKind::Singleton) {
    throw InvalidInput("point() is only defined for singleton families");
  }
  return point_;
}

std::string ModelFamily::label() const {
  std::ostringstream os;
  switch (kind_) {
    case FamilyKind::Bernoulli: os << "bernoulli"; break;
    case FamilyKind::Multinomial: os << "multinomial(" << arity_ << ")"; break;
    case FamilyKind::MarkovChain: os << "markov(" << order_ << "," << arity_ << ")"; break;
    case FamilyKind::GaussianLocation: os << "gaussian(sigma2=" << sigma2_ << ")"; break;
    case FamilyKind::LinearRegression:
      os << "linreg(m=" << covariates_ << ",sigma2=" << sigma2_ << ")";
      break;
    case FamilyKind::Singleton: os << "point[" << base().label() << "]"; break;
  }
  return os.str();
}

SufficientStats SufficientStats::of(const ModelFamily& family, const DataSequence& data) {
  check_data_kind(family, data);
  SufficientStats s;
  if (family.categorical()) {
    s.counts.assign(static_cast<std::size_t>(family.context_count()) * family.arity(), 0);
  }
  if (family.kind() == FamilyKind::LinearRegression) {
    int m = family.covariate_count();
    s.xtx = Eigen::MatrixXd::Zero(m, m);
    s.xty = Eigen::VectorXd::Zero(m);
  }
  for (std::size_t i = 0; i < data.size(); ++i) s.add(family, data, i);
  return s;
}

void SufficientStats::add(const ModelFamily& family, const DataSequence& data,
                          std::size_t i) {
  const ModelFamily& f =
      family.kind() == FamilyKind::Singleton ? family.base() : family;
  switch (f.kind()) {
    case FamilyKind::Bernoulli:
    case FamilyKind::Multinomial:
      if (counts.empty()) counts.assign(f.arity(), 0);
      ++counts[data.cat(i)];
      break;
    case FamilyKind::MarkovChain: {
      if (counts.empty()) {
        counts.assign(static_cast<std::size_t>(f.context_count()) * f.arity(), 0);
      }
      if (static_cast<int>(i) < f.order()) {
        ++uniform_prefix;
      } else {
        int ctx = detail::markov_context(data, i, f.order(), f.arity());
        ++counts[static_cast<std::size_t>(ctx) * f.arity() + data.cat(i)];
      }
      break;
    }
    case FamilyKind::GaussianLocation: {
      double v = data.value(i);
      sum += v;
      sumsq += v * v;
      break;
    }
    case FamilyKind::LinearRegression: {
      int m = f.covariate_count();
      if (xtx.rows() != m) {
        xtx = Eigen::MatrixXd::Zero(m, m);
        xty = Eigen::VectorXd::Zero(m);
      }
      Eigen::VectorXd xi = data.design().row(i).transpose();
      xtx.noalias() += xi * xi.transpose();
      xty.noalias() += data.response()(i) * xi;
      yty += data.response()(i) * data.response()(i);
      break;
    }
    case FamilyKind::Singleton:
      break;
  }
  ++n;
}

double log_likelihood(const ModelFamily& family, const ParamVector& params,
                      const SufficientStats& stats) {
  check_params(family, params);
  switch (family.kind()) {
    case FamilyKind::Bernoulli: {
      double t = params.values[0];
      return count_log_term(stats.counts[1], t) + count_log_term(stats.counts[0], 1.0 - t);
    }
    case FamilyKind::Multinomial: {
      double ll = 0.0;
      for (int j = 0; j < family.arity(); ++j) {
        ll += count_log_term(stats.counts[j], params.values[j]);
      }
      return ll;
    }
    case FamilyKind::MarkovChain: {
      int r = family.arity();
      double ll = -static_cast<double>(stats.uniform_prefix) * std::log(static_cast<double>(r));
      for (std::size_t idx = 0; idx < stats.counts.size(); ++idx) {
        ll += count_log_term(stats.counts[idx], params.values[idx]);
      }
      return ll;
    }
    case FamilyKind::GaussianLocation: {
      double mu = params.values[0];
      double s2 = family.sigma2();
      double quad = stats.sumsq - 2.0 * mu * stats.sum + stats.n * mu * mu;
      return -0.5 * stats.n * std::log(2.0 * M_PI * s2) - quad / (2.0 * s2);
    }
    case FamilyKind::LinearRegression: {
      Eigen::Map<const Eigen::VectorXd> beta(params.values.data(), params.values.size());
      double s2 = family.sigma2();
      double quad = stats.yty - 2.0 * beta.dot(stats.xty) + beta.dot(stats.xtx * beta);
      return -0.5 * stats.n * std::log(2.0 * M_PI * s2) - quad / (2.0 * s2);
    }
    case FamilyKind::Singleton:
      return log_likelihood(family.base(), family.point(), stats);
  }
  return kNegInf;
}

double log_likelihood(const ModelFamily& family, const ParamVector& params,
                      const DataSequence& data) {
  check_data_kind(family, data);
  return log_likelihood(family, params, SufficientStats::of(
      family.kind() == FamilyKind::Singleton ? family.base() : family, data));
}

ParamVector mle(const ModelFamily& family, const SufficientStats& stats) {
  switch (family.kind()) {
    case FamilyKind::Bernoulli: {
      double t = stats.n == 0 ? 0.5
                              : static_cast<double>(stats.counts[1]) / stats.n;
      return make_params({t}, 1);
    }
    case FamilyKind::Multinomial: {
      int r = family.arity();
      std::vector<double> p(r, 1.0 / r);
      if (stats.n > 0) {
        for (int j = 0; j < r; ++j) {
          p[j] = static_cast<double>(stats.counts[j]) / stats.n;
        }
      }
      return make_params(std::move(p), r - 1);
    }
    case FamilyKind::MarkovChain: {
      int r = family.arity();
      int q = family.context_count();
      std::vector<double> p(static_cast<std::size_t>(q) * r, 1.0 / r);
      for (int c = 0; c < q; ++c) {
        long long rowsum = 0;
        for (int j = 0; j < r; ++j) rowsum += stats.counts[static_cast<std::size_t>(c) * r + j];
        if (rowsum == 0) continue;
        for (int j = 0; j < r; ++j) {
          p[static_cast<std::size_t>(c) * r + j] =
              static_cast<double>(stats.counts[static_cast<std::size_t>(c) * r + j]) / rowsum;
        }
      }
      return make_params(std::move(p), family.dimension());
    }
    case FamilyKind::GaussianLocation: {
      double mu = stats.n == 0 ? 0.0 : stats.sum / stats.n;
      return make_params({mu}, 1);
    }
    case FamilyKind::LinearRegression: {
      int m = family.covariate_count();
      if (stats.n == 0) return make_params(std::vector<double>(m, 0.0), m);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(stats.xtx);
      if (lu.rank() < m) {
        throw DegenerateDesign("normal equations are singular; supply a gaussian luckiness");
      }
      Eigen::VectorXd beta = stats.xtx.ldlt().solve(stats.xty);
      return make_params(std::vector<double>(beta.data(), beta.data() + m), m);
    }
    case FamilyKind::Singleton:
      return family.point();
  }
  throw InvalidInput("unknown family");
}

ParamVector mle(const ModelFamily& family, const DataSequence& data) {
  check_data_kind(family, data);
  if (family.kind() == FamilyKind::Singleton) return family.point();
  return mle(family, SufficientStats::of(family, data));
}

LuckinessFunction LuckinessFunction::uniform() { return LuckinessFunction(); }

LuckinessFunction LuckinessFunction::gaussian_on_coefficients(Eigen::MatrixXd sigma_lk) {
  if (sigma_lk.rows() != sigma_lk.cols() || sigma_lk.rows() == 0) {
    throw InvalidLuckiness("gaussian luckiness needs a square covariance");
  }
  LuckinessFunction v;
  v.form_ = Form::GaussianOnCoefficients;
  v.sigma_lk_ = std::move(sigma_lk);
  return v;
}

LuckinessFunction LuckinessFunction::discretized_mass(std::vector<ParamVector> grid,
                                                      std::vector<double> mass) {
  if (grid.empty() || grid.size() != mass.size()) {
    throw InvalidLuckiness("discretized luckiness needs matching non-empty grid and mass");
  }
  double total = 0.0;
  for (double w : mass) {
    if (!(w >= 0.0)) throw InvalidLuckiness("discretized mass must be non-negative");
    total += w;
  }
  if (total > 1.0 + 1e-9) {
    throw InvalidLuckiness("discretized mass must sum to at most 1");
  }
  LuckinessFunction v;
  v.form_ = Form::DiscretizedMass;
  v.grid_ = std::move(grid);
  v.mass_ = std::move(mass);
  return v;
}

LuckinessFunction LuckinessFunction::start_up_data(int m) {
  if (m < 0) throw InvalidLuckiness("start-up length must be non-negative");
  LuckinessFunction v;
  v.form_ = Form::StartUpData;
  v.startup_ = m;
  return v;
}

LuckinessFunction LuckinessFunction::custom(std::function<double(const ParamVector&)> f) {
  if (!f) throw InvalidLuckiness("custom luckiness needs an evaluator");
  LuckinessFunction v;
  v.form_ = Form::Custom;
  v.custom_ = std::move(f);
  return v;
}

double LuckinessFunction::log_value(const ModelFamily& family, const ParamVector& params,
                                    const DataSequence* data) const {
  switch (form_) {
    case Form::Uniform:
      return 0.0;
    case Form::GaussianOnCoefficients: {
      Eigen::Map<const Eigen::VectorXd> beta(params.values.data(), params.values.size());
      if (beta.size() != sigma_lk_.rows()) {
        throw InvalidLuckiness("luckiness covariance does not match parameter length");
      }
      Eigen::LLT<Eigen::MatrixXd> llt(sigma_lk_);
      if (llt.info() != Eigen::Success) {
        throw InvalidLuckiness("luckiness covariance must be positive definite");
      }
      double quad = beta.dot(llt.solve(beta));
      return -quad / (2.0 * family.sigma2());
    }
    case Form::DiscretizedMass: {
      for (std::size_t g = 0; g < grid_.size(); ++g) {
        if (grid_[g].values.size() != params.values.size()) continue;
        bool same = true;
        for (std::size_t j = 0; j < params.values.size(); ++j) {
          if (std::abs(grid_[g].values[j] - params.values[j]) > 1e-12) {
            same = false;
            break;
          }
        }
        if (same) return mass_[g] > 0.0 ? std::log(mass_[g]) : kNegInf;
      }
      return kNegInf;
    }
    case Form::StartUpData: {
      if (data == nullptr) {
        throw InvalidLuckiness("start-up luckiness needs the data sequence");
      }
      std::size_t m = std::min<std::size_t>(startup_, data->size());
      return log_likelihood(family, params, data->prefix(m));
    }
    case Form::Custom: {
      double v = custom_(params);
      if (std::isnan(v) || v < 0.0) {
        throw InvalidLuckiness("custom luckiness returned a negative value");
      }
      return v > 0.0 ? std::log(v) : kNegInf;
    }
  }
  return 0.0;
}

ParamVector mdl_estimate(const ModelFamily& family, const LuckinessFunction& v,
                         const DataSequence& data) {
  check_data_kind(family, data);
  if (family.kind() == FamilyKind::Singleton) return family.point();
  switch (v.form()) {
    case LuckinessFunction::Form::Uniform:
      return mle(family, data);
    case LuckinessFunction::Form::StartUpData: {
      int m = v.startup();
      if (m < 0 || static_cast<std::size_t>(m) > data.size()) {
        throw InvalidLuckiness("start-up length exceeds the data");
      }
      // The tilt re-codes the leading outcomes, so they enter the combined
      // objective twice; fold a second copy into the sufficient stats.
      SufficientStats stats = SufficientStats::of(family, data);
      SufficientStats head = SufficientStats::of(family, data.prefix(m));
      stats.n += head.n;
      stats.uniform_prefix += head.uniform_prefix;
      for (std::size_t j = 0; j < head.counts.size(); ++j) stats.counts[j] += head.counts[j];
      stats.sum += head.sum;
      stats.sumsq += head.sumsq;
      if (head.xtx.size() > 0) {
        stats.xtx += head.xtx;
        stats.xty += head.xty;
        stats.yty += head.yty;
      }
      return mle(family, stats);
    }
    case LuckinessFunction::Form::DiscretizedMass: {
      double best = kNegInf;
      const ParamVector* best_p = nullptr;
      for (std::size_t g = 0; g < v.grid().size(); ++g) {
        if (v.mass()[g] <= 0.0) continue;
        double score = log_likelihood(family, v.grid()[g], data) + std::log(v.mass()[g]);
        if (best_p == nullptr || score > best) {
          best = score;
          best_p = &v.grid()[g];
        }
      }
      if (best_p == nullptr) throw InvalidLuckiness("discretized luckiness has no mass");
      return *best_p;
    }
    case LuckinessFunction::Form::GaussianOnCoefficients: {
      if (family.kind() == FamilyKind::LinearRegression) {
        int m = family.covariate_count();
        if (v.sigma_lk().rows() != m) {
          throw InvalidLuckiness("luckiness covariance does not match covariate count");
        }
        SufficientStats stats = SufficientStats::of(family, data);
        Eigen::LLT<Eigen::MatrixXd> llt(v.sigma_lk());
        if (llt.info() != Eigen::Success) {
          throw InvalidLuckiness("luckiness covariance must be positive definite");
        }
        Eigen::MatrixXd prior_prec = llt.solve(Eigen::MatrixXd::Identity(m, m));
        Eigen::VectorXd beta = (stats.xtx + prior_prec).ldlt().solve(stats.xty);
        return make_params(std::vector<double>(beta.data(), beta.data() + m), m);
      }
      if (family.kind() == FamilyKind::GaussianLocation) {
        if (v.sigma_lk().rows() != 1 || !(v.sigma_lk()(0, 0) > 0.0)) {
          throw InvalidLuckiness("gaussian-location luckiness needs a positive 1x1 scale");
        }
        SufficientStats stats = SufficientStats::of(family, data);
        double mu = stats.sum / (stats.n + 1.0 / v.sigma_lk()(0, 0));
        return make_params({mu}, 1);
      }
      throw InvalidLuckiness("gaussian luckiness applies to coefficient families");
    }
    case LuckinessFunction::Form::Custom: {
      if (family.kind() != FamilyKind::Bernoulli) {
        throw InvalidInput("custom luckiness maximization is only supported for bernoulli");
      }
      SufficientStats stats = SufficientStats::of(family, data);
      auto objective = [&](double t) {
        ParamVector p = make_params({t}, 1);
        return log_likelihood(family, p, stats) + v.log_value(family, p);
      };
      const double lo = 1e-9, hi = 1.0 - 1e-9;
      // Coarse scan to find a unimodal bracket, then golden-section refine.
      const int grid_n = 128;
      int best_i = 0;
      double best_f = kNegInf;
      for (int i = 0; i <= grid_n; ++i) {
        double t = lo + (hi - lo) * i / grid_n;
        double f = objective(t);
        if (f > best_f) {
          best_f = f;
          best_i = i;
        }
      }
      double a = lo + (hi - lo) * std::max(0, best_i - 1) / grid_n;
      double b = lo + (hi - lo) * std::min(grid_n, best_i + 1) / grid_n;
      double t = golden_max(objective, a, b, 1e-10);
      return make_params({t}, 1);
    }
  }
  throw InvalidLuckiness("unknown luckiness form");
}

double max_luckiness_log_likelihood(const ModelFamily& family,
                                    const LuckinessFunction& v,
                                    const DataSequence& data) {
  ParamVector est = mdl_estimate(family, v, data);
  return log_likelihood(family, est, data) + v.log_value(family, est, &data);
}

}  // namespace mdl
