#pragma once

#include <cstdint>
#include <vector>

#include "mdl/universal.hpp"

namespace mdl {

struct EvidenceReport {
  // D = log p0(data) - log u1(data); large negative D is evidence against
  // the null, since the alternative then compresses the data better.
  double d_nats = 0.0;
  // exp(D) = p0 / u1.
  double ratio = 1.0;
  // min(ratio, 1); valid conservatively because P0(ratio <= a) <= a.
  double p_conservative = 1.0;
  double alpha = 0.05;
  bool reject = false;
};

// Point null (zero-dimensional family) against a universal alternative.
EvidenceReport evidence(const UniversalDistribution& null_dist,
                        const UniversalDistribution& alternative,
                        const DataSequence& data, double alpha);

// Multiply batch ratios (add D); an empty list is the identity report.
EvidenceReport combine(const std::vector<EvidenceReport>& batches, double alpha);

struct Type1Result {
  std::int64_t trials = 0;
  std::int64_t rejections = 0;
  double rate = 0.0;
  double alpha = 0.05;
  // alpha + 3 sqrt(alpha (1-alpha) / trials).
  double bound = 0.0;
  bool within_bound = false;
};

// Draw `trials` datasets of length n from the point null and measure the
// rejection rate at level alpha.  Trials are grouped into fixed blocks with
// independently seeded generators, so the tally is reproducible and
// thread-count independent.
Type1Result type1_simulate(const UniversalDistribution& null_dist,
                           const UniversalDistribution& alternative, int n,
                           std::int64_t trials, double alpha, std::uint64_t seed,
                           int threads = 1);

}  // namespace mdl
