#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "mdl/models.hpp"

using mdl::DataSequence;
using mdl::LuckinessFunction;
using mdl::ModelFamily;
using mdl::ParamVector;
using mdl::SufficientStats;

namespace {

ParamVector params(std::vector<double> v, int dim) {
  ParamVector p;
  p.values = std::move(v);
  p.dimension = dim;
  return p;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("dimensions and labels") {
  CHECK(ModelFamily::bernoulli().dimension() == 1);
  CHECK(ModelFamily::multinomial(4).dimension() == 3);
  CHECK(ModelFamily::markov_chain(2, 3).dimension() == 9 * 2);
  CHECK(ModelFamily::markov_chain(2, 3).context_count() == 9);
  CHECK(ModelFamily::gaussian_location(2.0).dimension() == 1);
  CHECK(ModelFamily::linear_regression(3, 1.0).dimension() == 3);
  ModelFamily point = ModelFamily::singleton(ModelFamily::bernoulli(), params({0.5}, 0));
  CHECK(point.dimension() == 0);
  CHECK(ModelFamily::bernoulli().label() == "bernoulli");
  CHECK(ModelFamily::multinomial(3).label() == "multinomial(3)");
  CHECK(ModelFamily::markov_chain(1, 2).label() == "markov(1,2)");
}

TEST_CASE("bernoulli likelihood with boundary parameters") {
  DataSequence zeros = DataSequence::bits("0000");
  CHECK(mdl::log_likelihood(ModelFamily::bernoulli(), params({0.0}, 1), zeros) == 0.0);
  DataSequence mixed = DataSequence::bits("0010");
  CHECK(mdl::log_likelihood(ModelFamily::bernoulli(), params({0.0}, 1), mixed) ==
        -std::numeric_limits<double>::infinity());
  CHECK(mdl::log_likelihood(ModelFamily::bernoulli(), params({0.25}, 1), mixed) ==
        doctest::Approx(3.0 * std::log(0.75) + std::log(0.25)).epsilon(1e-14));
}

TEST_CASE("markov likelihood conditions on the uniform start") {
  ModelFamily chain = ModelFamily::markov_chain(1, 2);
  // rows: p(.|0), p(.|1)
  ParamVector theta = params({0.9, 0.1, 0.2, 0.8}, 2);
  DataSequence seq = DataSequence::bits("00110");
  double expect = std::log(0.5) + std::log(0.9) + std::log(0.1) + std::log(0.8) +
                  std::log(0.2);
  CHECK(mdl::log_likelihood(chain, theta, seq) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("markov order zero equals multinomial") {
  ModelFamily order0 = ModelFamily::markov_chain(0, 3);
  ModelFamily multi = ModelFamily::multinomial(3);
  std::mt19937_64 rng(42);
  ParamVector theta = params({0.2, 0.5, 0.3}, 2);
  for (int rep = 0; rep < 20; ++rep) {
    DataSequence seq = DataSequence::categorical(testutil::random_cats(rng, 30, 3), 3);
    CHECK(mdl::log_likelihood(order0, theta, seq) ==
          doctest::Approx(mdl::log_likelihood(multi, theta, seq)).epsilon(1e-13));
  }
}

TEST_CASE("sufficient stats match incremental accumulation") {
  std::mt19937_64 rng(7);
  ModelFamily chain = ModelFamily::markov_chain(2, 2);
  DataSequence seq = DataSequence::categorical(testutil::random_cats(rng, 40, 2), 2);
  SufficientStats whole = SufficientStats::of(chain, seq);
  SufficientStats step;
  for (std::size_t i = 0; i < seq.size(); ++i) step.add(chain, seq, i);
  CHECK(whole.n == step.n);
  CHECK(whole.uniform_prefix == step.uniform_prefix);
  CHECK(whole.counts == step.counts);
}

TEST_CASE("mle closed forms") {
  CHECK(mdl::mle(ModelFamily::bernoulli(), DataSequence::bits("0110")).values[0] ==
        doctest::Approx(0.5));
  CHECK(mdl::mle(ModelFamily::bernoulli(), DataSequence::bits("")).values[0] ==
        doctest::Approx(0.5));
  DataSequence reals = DataSequence::real({1.0, 3.0});
  CHECK(mdl::mle(ModelFamily::gaussian_location(1.0), reals).values[0] == doctest::Approx(2.0));
  ParamVector multi = mdl::mle(ModelFamily::multinomial(3),
                               DataSequence::categorical({0, 1, 1, 2}, 3));
  CHECK(multi.values[0] == doctest::Approx(0.25));
  CHECK(multi.values[1] == doctest::Approx(0.5));
  CHECK(multi.values[2] == doctest::Approx(0.25));
}

TEST_CASE("mle beats random parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  DataSequence seq = DataSequence::bits("0110100011");
  ModelFamily bern = ModelFamily::bernoulli();
  double best = mdl::log_likelihood(bern, mdl::mle(bern, seq), seq);
  for (int rep = 0; rep < 100; ++rep) {
    CHECK(best >= mdl::log_likelihood(bern, params({u(rng)}, 1), seq) - 1e-9);
  }
}

TEST_CASE("regression mle solves the normal equations") {
  std::mt19937_64 rng(3);
  int n = 30, m = 3;
  Eigen::MatrixXd x(n, m);
  Eigen::VectorXd y(n);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) x(i, j) = g(rng);
    y(i) = 1.5 * x(i, 0) - 0.5 * x(i, 2) + 0.1 * g(rng);
  }
  ModelFamily reg = ModelFamily::linear_regression(m, 1.0);
  ParamVector beta = mdl::mle(reg, DataSequence::regression(x, y));
  Eigen::Map<const Eigen::VectorXd> b(beta.values.data(), m);
  Eigen::VectorXd grad = x.transpose() * (y - x * b);
  CHECK(grad.norm() < 1e-8);
}

TEST_CASE("degenerate designs are rejected") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 2, 2, 4, 3, 6, -1, -2;  // second column is twice the first
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  CHECK_THROWS_AS(mdl::mle(ModelFamily::linear_regression(2, 1.0),
                           DataSequence::regression(x, y)),
                  mdl::DegenerateDesign);
}

TEST_CASE("uniform luckiness estimate equals mle") {
  DataSequence seq = DataSequence::bits("110100");
  ParamVector a = mdl::mle(ModelFamily::bernoulli(), seq);
  ParamVector b = mdl::mdl_estimate(ModelFamily::bernoulli(), LuckinessFunction::uniform(), seq);
  CHECK(a.values[0] == doctest::Approx(b.values[0]).epsilon(1e-12));
}

TEST_CASE("gaussian luckiness ridge closed forms") {
  // Location family: argmax of -sum (x-mu)^2/2 - mu^2/(2 s) is sum/(n + 1/s).
  DataSequence reals = DataSequence::real({2.0, 4.0, 3.0});
  Eigen::MatrixXd s11(1, 1);
  s11 << 1.0;
  ParamVector mu = mdl::mdl_estimate(ModelFamily::gaussian_location(1.0),
                                     LuckinessFunction::gaussian_on_coefficients(s11), reals);
  CHECK(mu.values[0] == doctest::Approx(9.0 / 4.0).epsilon(1e-12));

  std::mt19937_64 rng(5);
  int n = 25, m = 3;
  Eigen::MatrixXd x(n, m);
  Eigen::VectorXd y(n);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) x(i, j) = g(rng);
    y(i) = x(i, 1) + 0.3 * g(rng);
  }
  Eigen::MatrixXd sigma = 0.5 * Eigen::MatrixXd::Identity(m, m);
  ModelFamily reg = ModelFamily::linear_regression(m, 1.0);
  ParamVector est = mdl::mdl_estimate(
      reg, LuckinessFunction::gaussian_on_coefficients(sigma),
      DataSequence::regression(x, y));
  Eigen::VectorXd direct =
      (x.transpose() * x + 2.0 * Eigen::MatrixXd::Identity(m, m))
          .ldlt()
          .solve(x.transpose() * y);
  for (int j = 0; j < m; ++j) CHECK(est.values[j] == doctest::Approx(direct(j)).epsilon(1e-10));

  // No random perturbation improves the penalized objective.
  auto objective = [&](const Eigen::VectorXd& b) {
    double rss = (y - x * b).squaredNorm();
    return -0.5 * rss - 0.5 * b.dot(sigma.llt().solve(b));
  };
  Eigen::Map<const Eigen::VectorXd> bhat(est.values.data(), m);
  double at_est = objective(bhat);
  std::normal_distribution<double> step(0.0, 0.2);
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd other = bhat;
    for (int j = 0; j < m; ++j) other(j) += step(rng);
    CHECK(at_est >= objective(other) - 1e-9);
  }
}

TEST_CASE("ridge regularizes a degenerate design") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 2, 2, 4, 3, 6, -1, -2;
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  ParamVector est = mdl::mdl_estimate(ModelFamily::linear_regression(2, 1.0),
                                      LuckinessFunction::gaussian_on_coefficients(sigma),
                                      DataSequence::regression(x, y));
  for (double b : est.values) CHECK(std::isfinite(b));
}

TEST_CASE("discretized mass picks the best weighted codeword") {
  std::vector<ParamVector> grid{params({0.1}, 1), params({0.9}, 1)};
  std::vector<double> mass{0.5, 0.5};
  DataSequence ones = DataSequence::bits("1111");
  ParamVector pick = mdl::mdl_estimate(
      ModelFamily::bernoulli(), LuckinessFunction::discretized_mass(grid, mass), ones);
  CHECK(pick.values[0] == doctest::Approx(0.9));

  // A lopsided mass can overturn the likelihood ordering.
  std::vector<double> skew{1.0 - 1e-9, 1e-9};
  DataSequence one_flip = DataSequence::bits("1");
  ParamVector cheap = mdl::mdl_estimate(
      ModelFamily::bernoulli(), LuckinessFunction::discretized_mass(grid, skew), one_flip);
  CHECK(cheap.values[0] == doctest::Approx(0.1));
}

TEST_CASE("custom bernoulli luckiness matches calculus") {
  // v(theta) = theta (1 - theta): argmax of theta^{k+1} (1-theta)^{n-k+1}
  // is (k+1)/(n+2).
  LuckinessFunction v = LuckinessFunction::custom([](const ParamVector& p) {
    return p.values[0] * (1.0 - p.values[0]);
  });
  DataSequence data = DataSequence::bits("11");
  ParamVector est = mdl::mdl_estimate(ModelFamily::bernoulli(), v, data);
  CHECK(est.values[0] == doctest::Approx(0.75).epsilon(1e-7));

  DataSequence longer = DataSequence::bits("1101110111");
  ParamVector est2 = mdl::mdl_estimate(ModelFamily::bernoulli(), v, longer);
  CHECK(est2.values[0] == doctest::Approx(9.0 / 12.0).epsilon(1e-7));
}

TEST_CASE("negative custom luckiness is rejected") {
  LuckinessFunction v =
      LuckinessFunction::custom([](const ParamVector&) { return -1.0; });
  CHECK_THROWS_AS(
      mdl::mdl_estimate(ModelFamily::bernoulli(), v, DataSequence::bits("01")),
      mdl::InvalidLuckiness);
}

TEST_CASE("start-up luckiness folds the prefix in twice") {
  // data 1100, m=2: combined counts are (1100) + (11) -> 4 ones, 2 zeros.
  DataSequence data = DataSequence::bits("1100");
  ParamVector est = mdl::mdl_estimate(ModelFamily::bernoulli(),
                                      LuckinessFunction::start_up_data(2), data);
  CHECK(est.values[0] == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK_THROWS_AS(mdl::mdl_estimate(ModelFamily::bernoulli(),
                                    LuckinessFunction::start_up_data(5), data),
                  mdl::InvalidLuckiness);

  double top = mdl::max_luckiness_log_likelihood(ModelFamily::bernoulli(),
                                                 LuckinessFunction::start_up_data(2), data);
  double direct = 4.0 * std::log(4.0 / 6.0) + 2.0 * std::log(2.0 / 6.0);
  CHECK(top == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("singleton families carry their point") {
  ModelFamily point = ModelFamily::singleton(ModelFamily::bernoulli(), params({0.25}, 0));
  DataSequence data = DataSequence::bits("10");
  double ll = mdl::log_likelihood(point, ParamVector{}, data);
  CHECK(ll == doctest::Approx(std::log(0.25) + std::log(0.75)).epsilon(1e-14));
  ParamVector est = mdl::mdl_estimate(point, LuckinessFunction::uniform(), data);
  CHECK(est.values[0] == doctest::Approx(0.25));
}

}  // TEST_SUITE
