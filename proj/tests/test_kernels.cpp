#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "mdl/kernels.hpp"

namespace k = mdl::kernels;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

struct ForceGuard {
  explicit ForceGuard(k::IsaLevel level) { k::force_level(level); }
  ~ForceGuard() { k::force_level(k::IsaLevel::Avx2); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reductions on small hand inputs") {
  std::vector<double> v{3.0, -1.0, 2.5, 0.5};
  CHECK(k::scalar::sum(v) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(k::scalar::max(v) == 3.0);
  CHECK(k::scalar::dot(v, v) == doctest::Approx(9.0 + 1.0 + 6.25 + 0.25).epsilon(1e-15));
  CHECK(k::scalar::sum_sq_dev(v, 1.25) ==
        doctest::Approx(3.0625 + 5.0625 + 1.5625 + 0.5625).epsilon(1e-14));
}

TEST_CASE("empty and single-element edge cases") {
  std::vector<double> none;
  std::vector<double> one{4.25};
  CHECK(k::sum(none) == 0.0);
  CHECK(k::max(none) == -kInf);
  CHECK(k::logsumexp(none) == -kInf);
  CHECK(k::sum(one) == 4.25);
  CHECK(k::max(one) == 4.25);
  CHECK(k::logsumexp(one) == doctest::Approx(4.25).epsilon(1e-15));
}

TEST_CASE("compensated scalar sum survives cancellation") {
  std::vector<double> v{1e16, 1.0, -1e16};
  CHECK(k::scalar::sum(v) == 1.0);
}

TEST_CASE("logsumexp is shift stable") {
  std::vector<double> v{1000.0, 999.0, 998.0};
  double expect = 1000.0 + std::log(1.0 + std::exp(-1.0) + std::exp(-2.0));
  CHECK(k::logsumexp(v) == doctest::Approx(expect).epsilon(1e-14));
  std::vector<double> w{-1100.0, -1100.5};
  CHECK(std::isfinite(k::logsumexp(w)));
  CHECK(k::logsumexp(w) == doctest::Approx(-1100.0 + std::log(1.0 + std::exp(-0.5))));
}

TEST_CASE("logsumexp with -inf entries ignores them") {
  std::vector<double> v{-kInf, 0.3, -kInf};
  CHECK(k::logsumexp(v) == doctest::Approx(0.3).epsilon(1e-15));
  std::vector<double> all{-kInf, -kInf};
  CHECK(k::logsumexp(all) == -kInf);
}

TEST_CASE("avx2 variants match scalar on random input") {
  if (!k::avx2::available()) return;
  std::mt19937_64 rng(1234);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
    std::vector<double> v = random_vec(rng, n, -30.0, 30.0);
    std::vector<double> w = random_vec(rng, n, -2.0, 2.0);
    CAPTURE(n);
    CHECK(k::avx2::sum(v) == doctest::Approx(k::scalar::sum(v)).epsilon(1e-12));
    CHECK(k::avx2::max(v) == k::scalar::max(v));
    CHECK(k::avx2::dot(v, w) == doctest::Approx(k::scalar::dot(v, w)).epsilon(1e-12));
    CHECK(k::avx2::sum_sq_dev(v, 0.75) ==
          doctest::Approx(k::scalar::sum_sq_dev(v, 0.75)).epsilon(1e-12));
    if (n > 0) {
      CHECK(k::avx2::logsumexp(v) == doctest::Approx(k::scalar::logsumexp(v)).epsilon(1e-13));
    }
  }
}

TEST_CASE("avx2 logsumexp handles wide ranges and -inf") {
  if (!k::avx2::available()) return;
  std::vector<double> wide{-750.0, -10.0, 0.0, 5.0, -kInf};
  CHECK(k::avx2::logsumexp(wide) == doctest::Approx(k::scalar::logsumexp(wide)).epsilon(1e-13));
  std::vector<double> tiny{-1000.0, -1000.0};
  CHECK(k::avx2::logsumexp(tiny) == doctest::Approx(k::scalar::logsumexp(tiny)).epsilon(1e-13));
}

TEST_CASE("force_level pins dispatch") {
  {
    ForceGuard guard(k::IsaLevel::Scalar);
    CHECK(k::active_level() == k::IsaLevel::Scalar);
    std::vector<double> v{1.0, 2.0, 3.0};
    CHECK(k::sum(v) == 6.0);
  }
  k::IsaLevel got = k::force_level(k::IsaLevel::Avx2);
  CHECK(got == k::active_level());
  if (k::avx2::available()) {
    CHECK(got == k::IsaLevel::Avx2);
  } else {
    CHECK(got == k::IsaLevel::Scalar);
  }
}

TEST_CASE("dispatched results agree under both pinned levels") {
  std::mt19937_64 rng(99);
  std::vector<double> v = random_vec(rng, 257, -5.0, 5.0);
  double s_scalar, l_scalar;
  {
    ForceGuard guard(k::IsaLevel::Scalar);
    s_scalar = k::sum(v);
    l_scalar = k::logsumexp(v);
  }
  double s_fast = k::sum(v);
  double l_fast = k::logsumexp(v);
  CHECK(s_fast == doctest::Approx(s_scalar).epsilon(1e-12));
  CHECK(l_fast == doctest::Approx(l_scalar).epsilon(1e-13));
}

}  // TEST_SUITE
