#include "mdl/kernels.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace mdl::kernels {

namespace scalar {

double sum(std::span<const double> x) {
  // Neumaier-compensated summation.
  double s = 0.0, c = 0.0;
  for (double v : x) {
    double t = s + v;
    if (std::abs(s) >= std::abs(v)) {
      c += (s - t) + v;
    } else {
      c += (v - t) + s;
    }
    s = t;
  }
  return s + c;
}

double max(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) {
    if (v > m) m = v;
  }
  return m;
}

double logsumexp(std::span<const double> x) {
  double m = max(x);
  if (!std::isfinite(m)) return m;
  double s = 0.0, c = 0.0;
  for (double v : x) {
    double e = std::exp(v - m);
    double t = s + e;
    if (std::abs(s) >= e) {
      c += (s - t) + e;
    } else {
      c += (e - t) + s;
    }
    s = t;
  }
  return m + std::log(s + c);
}

double sum_sq_dev(std::span<const double> x, double center) {
  double s = 0.0;
  for (double v : x) {
    double d = v - center;
    s += d * d;
  }
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace scalar

namespace {

std::atomic<IsaLevel> g_forced{IsaLevel::Avx2};

IsaLevel effective() {
  IsaLevel f = g_forced.load(std::memory_order_relaxed);
  if (f == IsaLevel::Avx2 && avx2::available()) return IsaLevel::Avx2;
  return IsaLevel::Scalar;
}

}  // namespace

IsaLevel detected_level() {
  return avx2::available() ? IsaLevel::Avx2 : IsaLevel::Scalar;
}

IsaLevel active_level() { return effective(); }

IsaLevel force_level(IsaLevel level) {
  g_forced.store(level, std::memory_order_relaxed);
  return effective();
}

double sum(std::span<const double> x) {
  return effective() == IsaLevel::Avx2 ? avx2::sum(x) : scalar::sum(x);
}

double max(std::span<const double> x) {
  return effective() == IsaLevel::Avx2 ? avx2::max(x) : scalar::max(x);
}

double logsumexp(std::span<const double> x) {
  return effective() == IsaLevel::Avx2 ? avx2::logsumexp(x) : scalar::logsumexp(x);
}

double sum_sq_dev(std::span<const double> x, double center) {
  return effective() == IsaLevel::Avx2 ? avx2::sum_sq_dev(x, center)
                                       : scalar::sum_sq_dev(x, center);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return effective() == IsaLevel::Avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

}  // namespace mdl::kernels
