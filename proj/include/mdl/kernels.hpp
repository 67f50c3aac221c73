#pragma once

#include <cstddef>
#include <span>

// Numeric reduction kernels used throughout the library.  Each kernel has a
// scalar reference implementation and, on x86-64 builds, an AVX2 variant.
// The unqualified entry points dispatch at runtime; tests pin the level to
// cross-check the variants against each other.

namespace mdl::kernels {

enum class IsaLevel { Scalar, Avx2 };

// Best level this build supports on the current CPU.
IsaLevel detected_level();

// Level currently used by the dispatching entry points.
IsaLevel active_level();

// Pin dispatch to `level` if supported; Scalar is always accepted.
// Returns the level actually in effect afterwards.
IsaLevel force_level(IsaLevel level);

double sum(std::span<const double> x);
double max(std::span<const double> x);  // -inf on empty input
double logsumexp(std::span<const double> x);  // -inf on empty input
double sum_sq_dev(std::span<const double> x, double center);
double dot(std::span<const double> a, std::span<const double> b);

namespace scalar {
double sum(std::span<const double> x);
double max(std::span<const double> x);
double logsumexp(std::span<const double> x);
double sum_sq_dev(std::span<const double> x, double center);
double dot(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

namespace avx2 {
// True when the AVX2 variants were compiled in and the CPU supports them.
bool available();
// These fall back to the scalar kernels when available() is false.
double sum(std::span<const double> x);
double max(std::span<const double> x);
double logsumexp(std::span<const double> x);
double sum_sq_dev(std::span<const double> x, double center);
double dot(std::span<const double> a, std::span<const double> b);
}  // namespace avx2

}  // namespace mdl::kernels
