#include "mdl/kernels.hpp"

#include <cmath>
#include <limits>

#if defined(MDLKIT_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
#define MDLKIT_AVX2_ENABLED 1
#include <immintrin.h>
#endif

namespace mdl::kernels::avx2 {

#if defined(MDLKIT_AVX2_ENABLED)

namespace {

bool cpu_ok() {
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
}

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, swapped));
}

// exp on four lanes: argument reduction against a split ln2, degree-13
// Taylor polynomial on |r| <= ln2/2, then a 2^k exponent rebuild.
// Arguments below -708 flush to zero; NaN propagates.
__m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d lower = _mm256_set1_pd(-708.0);

  __m256d too_small = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  __m256d xc = _mm256_max_pd(lower, x);

  __m256d k = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, xc);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.6059043836821613e-10);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.08767569878681e-09));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.505210838544172e-08));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.755731922398589e-07));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985893e-06));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.48015873015873e-05));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.984126984126984e-04));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.388888888888889e-03));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.333333333333333e-03));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664e-02));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666666e-01));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  __m256d scale = _mm256_castsi256_pd(bits);

  __m256d res = _mm256_mul_pd(p, scale);
  return _mm256_andnot_pd(too_small, res);
}

}  // namespace

bool available() { return cpu_ok(); }

double sum(std::span<const double> x) {
  if (!cpu_ok()) return scalar::sum(x);
  std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double max(std::span<const double> x) {
  if (!cpu_ok()) return scalar::max(x);
  std::size_t n = x.size();
  double m = -std::numeric_limits<double>::infinity();
  __m256d acc = _mm256_set1_pd(m);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_max_pd(acc, _mm256_loadu_pd(x.data() + i));
  }
  m = hmax(acc);
  for (; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

double logsumexp(std::span<const double> x) {
  if (!cpu_ok()) return scalar::logsumexp(x);
  double m = max(x);
  if (!std::isfinite(m)) return m;
  std::size_t n = x.size();
  __m256d vm = _mm256_set1_pd(m);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), vm);
    acc = _mm256_add_pd(acc, exp_pd(v));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

double sum_sq_dev(std::span<const double> x, double center) {
  if (!cpu_ok()) return scalar::sum_sq_dev(x, center);
  std::size_t n = x.size();
  __m256d vc = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), vc);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double d = x[i] - center;
    s += d * d;
  }
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (!cpu_ok()) return scalar::dot(a, b);
  std::size_t n = a.size() < b.size() ? a.size() : b.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                          _mm256_loadu_pd(b.data() + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

#else  // !MDLKIT_AVX2_ENABLED

bool available() { return false; }

double sum(std::span<const double> x) { return scalar::sum(x); }
double max(std::span<const double> x) { return scalar::max(x); }
double logsumexp(std::span<const double> x) { return scalar::logsumexp(x); }
double sum_sq_dev(std::span<const double> x, double center) {
  return scalar::sum_sq_dev(x, center);
}
double dot(std::span<const double> a, std::span<const double> b) {
  return scalar::dot(a, b);
}

#endif

}  // namespace mdl::kernels::avx2
