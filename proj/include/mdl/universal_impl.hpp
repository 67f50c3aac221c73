#pragma once

// Internal: the polymorphic core behind UniversalDistribution.  Only the
// library's own translation units should include this.

#include <cstdint>

#include "mdl/universal.hpp"

namespace mdl::detail {

struct UDistImpl {
  virtual ~UDistImpl() = default;

  virtual double log_prefix_marginal(const DataSequence& prefix,
                                     std::int64_t horizon) const = 0;

  virtual double log_joint(const DataSequence& data) const {
    return log_prefix_marginal(data, static_cast<std::int64_t>(data.size()));
  }

  // Marginal ratio at the full sequence's horizon; overridden where a closed
  // form is cheaper.
  virtual double log_predictive(const DataSequence& full, std::size_t i) const {
    std::int64_t horizon = static_cast<std::int64_t>(full.size());
    return log_prefix_marginal(full.prefix(i + 1), horizon) -
           log_prefix_marginal(full.prefix(i), horizon);
  }

  ModelFamily family = ModelFamily::bernoulli();  // factories overwrite
  UniversalDistribution::Kind kind = UniversalDistribution::Kind::BayesConjugate;
  std::string label;
};

}  // namespace mdl::detail
