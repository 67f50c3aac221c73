#pragma once

#include <cstdint>
#include <functional>

#include "mdl/universal.hpp"

namespace mdl {

// Mixture over "switch from u0 to u1 at outcome i" strategies: the first
// i-1 outcomes are coded by u0, the rest by u1 conditioned on them, with
// both components evaluated at the shared coding horizon.  i = 1 means u1
// throughout.
struct SwitchSpec {
  enum class Truncation {
    // Restrict the index prior to {1..n} and rescale it to sum to 1.
    Renormalize,
    // Keep the untruncated prior on {1..n} and give the residual mass to a
    // never-switch component (u0 for the whole sequence).
    SubDistribution,
  };

  UniversalDistribution u0;
  UniversalDistribution u1;
  Truncation truncation = Truncation::Renormalize;
  // log prior mass on switch index i >= 1; empty uses 1 / (i (i+1)).
  std::function<double(std::int64_t)> log_prior;

  SwitchSpec(UniversalDistribution a, UniversalDistribution b)
      : u0(std::move(a)), u1(std::move(b)) {}
};

UniversalDistribution make_switch(const SwitchSpec& spec);

double switch_log_marginal(const SwitchSpec& spec, const DataSequence& data);

struct SwitchBoundReport {
  bool holds = false;
  // Switch index achieving the best oracle code length (n+1 = never switch).
  std::int64_t witness = 0;
  double switch_code_nats = 0.0;
  double bound_nats = 0.0;
};

// Renormalize mode: -log u_switch <= min_i [-log u0(z^{i-1}) - log u1(rest)]
// + 2 log n.  Sub-distribution mode: -log u_switch <= -log u0(z^n) + the
// never-switch prior cost.
SwitchBoundReport switch_regret_bound_check(const SwitchSpec& spec,
                                            const DataSequence& data);

}  // namespace mdl
