#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "mdl/complexity.hpp"
#include "mdl/kernels.hpp"
#include "mdl/models.hpp"

using mdl::ComplexityValue;
using mdl::CompMethod;
using mdl::DataSequence;
using mdl::LuckinessFunction;
using mdl::ModelFamily;
using mdl::ParamVector;

namespace {

// log sum over all strings of max_theta p_theta(x), by brute force.
double comp_by_enumeration(int n, int r) {
  ModelFamily family = r == 2 ? ModelFamily::bernoulli() : ModelFamily::multinomial(r);
  std::vector<double> terms;
  testutil::for_each_string(n, r, [&](const DataSequence& seq) {
    terms.push_back(mdl::log_likelihood(family, mdl::mle(family, seq), seq));
  });
  return mdl::kernels::logsumexp(terms);
}

// Same sum grouped by count vector: walk compositions of n into r parts.
double comp_by_compositions(int n, int r) {
  std::vector<int> counts(r, 0);
  counts[0] = n;
  std::vector<double> terms;
  auto term = [&]() {
    double log_mult = std::lgamma(n + 1.0);
    double log_ml = 0.0;
    for (int j = 0; j < r; ++j) {
      log_mult -= std::lgamma(counts[j] + 1.0);
      if (counts[j] > 0) log_ml += counts[j] * std::log(static_cast<double>(counts[j]) / n);
    }
    terms.push_back(log_mult + log_ml);
  };
  while (true) {
    term();
    // next composition in colex order
    int i = 0;
    while (i < r - 1 && counts[i] == 0) ++i;
    if (i == r - 1) break;
    int head = counts[i];
    counts[i] = 0;
    counts[0] = head - 1;
    counts[i + 1] += 1;
  }
  return mdl::kernels::logsumexp(terms);
}

double comp_markov_binary_order1_brute(int n) {
  std::vector<double> terms;
  ModelFamily chain = ModelFamily::markov_chain(1, 2);
  testutil::for_each_binary(n, [&](const DataSequence& seq) {
    terms.push_back(mdl::log_likelihood(chain, mdl::mle(chain, seq), seq));
  });
  return mdl::kernels::logsumexp(terms);
}

}  // namespace

TEST_SUITE("complexity") {

TEST_CASE("small bernoulli normalizers are exact rationals") {
  CHECK(std::exp(mdl::comp_bernoulli_exact(2).nats) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(std::exp(mdl::comp_bernoulli_exact(3).nats) ==
        doctest::Approx(78.0 / 27.0).epsilon(1e-12));
  CHECK(mdl::comp_bernoulli_exact(0).nats == 0.0);
  CHECK(mdl::comp_bernoulli_exact(1).nats == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("exact multinomial matches full enumeration") {
  for (int n = 1; n <= 8; ++n) {
    CHECK(mdl::comp_multinomial_exact(n, 2).nats ==
          doctest::Approx(comp_by_enumeration(n, 2)).epsilon(1e-10));
  }
  for (int n = 1; n <= 6; ++n) {
    CHECK(mdl::comp_multinomial_exact(n, 3).nats ==
          doctest::Approx(comp_by_enumeration(n, 3)).epsilon(1e-10));
  }
  CHECK(mdl::comp_multinomial_exact(5, 4).nats ==
        doctest::Approx(comp_by_enumeration(5, 4)).epsilon(1e-10));
}

TEST_CASE("recurrence matches the composition walk at larger sizes") {
  CHECK(mdl::comp_multinomial_exact(30, 4).nats ==
        doctest::Approx(comp_by_compositions(30, 4)).epsilon(1e-10));
  CHECK(mdl::comp_multinomial_exact(60, 3).nats ==
        doctest::Approx(comp_by_compositions(60, 3)).epsilon(1e-10));
}

TEST_CASE("scaled recurrence survives huge alphabets") {
  double a = mdl::comp_multinomial_exact(100, 100000).nats;
  double b = mdl::comp_multinomial_exact(100, 1000000).nats;
  CHECK(std::isfinite(a));
  CHECK(std::isfinite(b));
  CHECK(b > a);
  CHECK(mdl::comp_multinomial_exact(200, 100000).nats > a);
  CHECK(mdl::comp_multinomial_exact(1, 1).nats == 0.0);
}

TEST_CASE("normalizer grows in both n and r") {
  double prev = 0.0;
  for (int n = 1; n <= 40; ++n) {
    double c = mdl::comp_multinomial_exact(n, 3).nats;
    CHECK(c >= prev - 1e-12);
    prev = c;
  }
  for (int r = 2; r <= 6; ++r) {
    CHECK(mdl::comp_multinomial_exact(20, r + 1).nats >
          mdl::comp_multinomial_exact(20, r).nats);
  }
}

TEST_CASE("cache answers repeat queries") {
  std::uint64_t h0, m0;
  mdl::comp_cache_counters(&h0, &m0);
  double first = mdl::comp_multinomial_exact(137, 5).nats;
  std::uint64_t h1, m1;
  mdl::comp_cache_counters(&h1, &m1);
  CHECK(m1 > m0);
  double again = mdl::comp_multinomial_exact(137, 5).nats;
  std::uint64_t h2, m2;
  mdl::comp_cache_counters(&h2, &m2);
  CHECK(h2 > h1);
  CHECK(m2 == m1);
  CHECK(first == again);
}

TEST_CASE("szpankowski approximation sits close to the exact value") {
  ComplexityValue s = mdl::comp_multinomial_szpankowski(100, 50);
  CHECK(s.method == CompMethod::Szpankowski);
  CHECK(s.nats == doctest::Approx(53.07619734937778).epsilon(1e-10));
  CHECK(std::fabs(s.nats - mdl::comp_multinomial_exact(100, 50).nats) < 0.1);
  CHECK(std::fabs(mdl::comp_multinomial_szpankowski(1000, 100).nats -
                  mdl::comp_multinomial_exact(1000, 100).nats) < 0.1);
  CHECK(std::fabs(mdl::comp_multinomial_szpankowski(100, 2).nats -
                  mdl::comp_multinomial_exact(100, 2).nats) < 0.5);
}

TEST_CASE("jeffreys integrals in closed form") {
  CHECK(mdl::jeffreys_integral_multinomial(2).value ==
        doctest::Approx(std::acos(-1.0)).epsilon(1e-12));
  CHECK(mdl::jeffreys_integral_multinomial(3).value ==
        doctest::Approx(2.0 * std::acos(-1.0)).epsilon(1e-12));
  CHECK(mdl::jeffreys_integral_multinomial(4).value ==
        doctest::Approx(std::pow(std::acos(-1.0), 2) / std::tgamma(2.0)).epsilon(1e-12));
}

TEST_CASE("jeffreys integral agrees with importance sampling") {
  // Sample Dirichlet(3/4) and weight by Z(3/4) * prod theta^{-1/4} to hit
  // the integrand prod theta^{-1/2} without boundary blowups.
  const int r = 3;
  const double alpha = 0.75;
  std::mt19937_64 rng(12345);
  std::gamma_distribution<double> gam(alpha, 1.0);
  double log_z = r * std::lgamma(alpha) - std::lgamma(r * alpha);
  double acc = 0.0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    double g[r], tot = 0.0;
    for (int j = 0; j < r; ++j) {
      g[j] = gam(rng);
      tot += g[j];
    }
    double log_w = log_z;
    for (int j = 0; j < r; ++j) log_w += -(alpha - 1.0) * std::log(g[j] / tot) - 0.5 * std::log(g[j] / tot);
    acc += std::exp(log_w);
  }
  double estimate = acc / trials;
  CHECK(estimate == doctest::Approx(mdl::jeffreys_integral_multinomial(r).value).epsilon(0.05));
}

TEST_CASE("asymptotic expansion converges on the bernoulli normalizer") {
  mdl::FisherIntegral fisher = mdl::jeffreys_integral_multinomial(2);
  double prev_gap = 1e9;
  for (std::int64_t n : {100, 1000, 10000}) {
    double approx = mdl::comp_asymptotic(1, n, fisher).nats;
    double exact = mdl::comp_multinomial_exact(n, 2).nats;
    double gap = std::fabs(approx - exact);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.05);
  CHECK(mdl::comp_asymptotic(1, 100, fisher).method == CompMethod::Asymptotic);
}

TEST_CASE("asymptotic error paths") {
  mdl::FisherIntegral fisher = mdl::jeffreys_integral_multinomial(2);
  CHECK_THROWS_AS(mdl::comp_asymptotic(1, 0, fisher), mdl::InvalidInput);
  mdl::FisherIntegral divergent;
  divergent.value = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(mdl::comp_asymptotic(1, 100, divergent), mdl::ComplexityDiverges);
  mdl::FisherIntegral zero;
  zero.value = 0.0;
  CHECK_THROWS_AS(mdl::comp_asymptotic(1, 100, zero), mdl::ComplexityDiverges);
}

TEST_CASE("markov normalizers") {
  CHECK(mdl::comp_markov(1, 1, 50).nats == 0.0);
  for (int n : {1, 4, 9}) {
    CHECK(mdl::comp_markov(0, 3, n).nats ==
          doctest::Approx(mdl::comp_multinomial_exact(n, 3).nats).epsilon(1e-12));
  }
  for (int n = 3; n <= 10; ++n) {
    CHECK(mdl::comp_markov(1, 2, n).nats ==
          doctest::Approx(comp_markov_binary_order1_brute(n)).epsilon(1e-9));
  }
}

TEST_CASE("higher order markov agrees with enumeration where feasible") {
  ModelFamily chain = ModelFamily::markov_chain(2, 2);
  std::vector<double> terms;
  testutil::for_each_binary(6, [&](const DataSequence& seq) {
    terms.push_back(mdl::log_likelihood(chain, mdl::mle(chain, seq), seq));
  });
  double brute = mdl::kernels::logsumexp(terms);
  ComplexityValue got = mdl::comp_markov(2, 2, 6);
  if (got.method != CompMethod::Asymptotic) {
    CHECK(got.nats == doctest::Approx(brute).epsilon(1e-9));
  }

  ModelFamily tern = ModelFamily::markov_chain(1, 3);
  std::vector<double> tern_terms;
  testutil::for_each_string(6, 3, [&](const DataSequence& seq) {
    tern_terms.push_back(mdl::log_likelihood(tern, mdl::mle(tern, seq), seq));
  });
  double tern_brute = mdl::kernels::logsumexp(tern_terms);
  ComplexityValue tern_got = mdl::comp_markov(1, 3, 6);
  if (tern_got.method != CompMethod::Asymptotic) {
    CHECK(tern_got.nats == doctest::Approx(tern_brute).epsilon(1e-9));
  }
}

TEST_CASE("luckiness-tilted normalizer against a dense grid") {
  LuckinessFunction v = LuckinessFunction::custom([](const ParamVector& p) {
    return p.values[0] * (1.0 - p.values[0]);
  });
  const int n = 10;
  std::vector<double> terms;
  testutil::for_each_binary(n, [&](const DataSequence& seq) {
    int k = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) k += seq.cat(i);
    // argmax of theta^{k+1}(1-theta)^{n-k+1} is (k+1)/(n+2)
    double t = (k + 1.0) / (n + 2.0);
    terms.push_back((k + 1.0) * std::log(t) + (n - k + 1.0) * std::log(1.0 - t));
  });
  double expect = mdl::kernels::logsumexp(terms);
  CHECK(mdl::comp_categorical_luckiness(ModelFamily::bernoulli(), v, n) ==
        doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("uniform luckiness recovers the plain normalizer") {
  for (int n : {1, 5, 12}) {
    CHECK(mdl::comp_categorical_luckiness(ModelFamily::bernoulli(),
                                          LuckinessFunction::uniform(), n) ==
          doctest::Approx(mdl::comp_multinomial_exact(n, 2).nats).epsilon(1e-9));
  }
  CHECK(mdl::comp_categorical_luckiness(ModelFamily::multinomial(3),
                                        LuckinessFunction::uniform(), 6) ==
        doctest::Approx(mdl::comp_multinomial_exact(6, 3).nats).epsilon(1e-6));
}

}  // TEST_SUITE
