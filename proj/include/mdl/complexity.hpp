#pragma once

#include <cstdint>
#include <string>

#include "mdl/models.hpp"

namespace mdl {

// How a COMP value was obtained; Asymptotic values carry no exactness claim.
enum class CompMethod { ExactSum, Recurrence, Szpankowski, Asymptotic };

const char* comp_method_name(CompMethod m);

struct ComplexityValue {
  double nats = 0.0;
  CompMethod method = CompMethod::ExactSum;
};

struct FisherIntegral {
  // Integral of sqrt(det I(theta)) over the parameter space.
  double value = 0.0;
  std::string closed_form;
};

// log sum over binary count splits of binom(n, n1) (n1/n)^n1 (n0/n)^n0; 0 for n = 0.
ComplexityValue comp_bernoulli_exact(std::int64_t n);

// Exact multinomial normalizer via the linear-domain two-term recurrence in
// scaled floating point; r = 1 gives 0, r = 2 the direct sum.
ComplexityValue comp_multinomial_exact(std::int64_t n, int r);

ComplexityValue comp_multinomial_szpankowski(std::int64_t n, int r);

// (k/2) log(n / 2pi) + log fisher.value.
ComplexityValue comp_asymptotic(int k, std::int64_t n, const FisherIntegral& fisher);

// pi^{r/2} / Gamma(r/2).
FisherIntegral jeffreys_integral_multinomial(int r);

// Markov-chain normalizer: exact for order 0 (multinomial), for binary
// order-1 chains (run combinatorics), and for tiny full enumerations;
// asymptotic with q = arity^order independent per-context Jeffreys integrals
// otherwise, flagged by the method field.
ComplexityValue comp_markov(int order, int arity, std::int64_t n);

// Luckiness-tilted normalizer log sum over count vectors of
// multiplicity * max_theta p_theta * v(theta), for Bernoulli (any n) and
// Multinomial (composition enumeration, capped).
double comp_categorical_luckiness(const ModelFamily& family, const LuckinessFunction& v,
                                  std::int64_t n);

// The (n, r) multinomial cache shared across modules; append-only.
void comp_cache_counters(std::uint64_t* hits, std::uint64_t* misses);

}  // namespace mdl
