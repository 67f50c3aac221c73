#include "mdl/switchdist.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mdl/kernels.hpp"
#include "mdl/universal_impl.hpp"

namespace mdl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double default_log_prior(std::int64_t i) {
  return -std::log(static_cast<double>(i)) - std::log(static_cast<double>(i + 1));
}

struct SwitchImpl : detail::UDistImpl {
  SwitchSpec spec;

  explicit SwitchImpl(SwitchSpec s) : spec(std::move(s)) {}

  double raw_log_prior(std::int64_t i) const {
    return spec.log_prior ? spec.log_prior(i) : default_log_prior(i);
  }

  // Per-index log weights on {1..n} plus the log residual ("never switch")
  // mass; Renormalize rescales and leaves no residual.
  void index_weights(std::int64_t n, std::vector<double>* w, double* log_tail) const {
    w->resize(n);
    std::vector<double> raw(n);
    for (std::int64_t i = 1; i <= n; ++i) raw[i - 1] = raw_log_prior(i);
    double total = kernels::logsumexp(raw);
    if (spec.truncation == SwitchSpec::Truncation::Renormalize) {
      for (std::int64_t i = 0; i < n; ++i) (*w)[i] = raw[i] - total;
      *log_tail = kNegInf;
      return;
    }
    if (total > 1e-12) {
      throw InvalidInput("switch index prior mass exceeds 1");
    }
    *w = raw;
    double residual = -std::expm1(total);  // 1 - sum of raw masses
    *log_tail = residual > 0.0 ? std::log(residual) : kNegInf;
  }

  double log_prefix_marginal(const DataSequence& prefix, std::int64_t horizon) const override {
    if (horizon < static_cast<std::int64_t>(prefix.size())) {
      throw InvalidInput("horizon shorter than the prefix");
    }
    if (horizon == 0) return 0.0;
    std::int64_t l = static_cast<std::int64_t>(prefix.size());
    std::vector<double> w;
    double log_tail = kNegInf;
    index_weights(horizon, &w, &log_tail);

    // Component marginals at the shared horizon for every split point.
    std::vector<double> m0(l + 1), m1(l + 1);
    for (std::int64_t j = 0; j <= l; ++j) {
      DataSequence p = prefix.prefix(j);
      m0[j] = spec.u0.log_prefix_marginal(p, horizon);
      m1[j] = spec.u1.log_prefix_marginal(p, horizon);
    }

    std::vector<double> terms;
    terms.reserve(l + 2);
    for (std::int64_t i = 1; i <= l; ++i) {
      terms.push_back(w[i - 1] + m0[i - 1] + m1[l] - m1[i - 1]);
    }
    // Indices past the prefix all code the prefix entirely with u0.
    std::vector<double> later(w.begin() + l, w.end());
    if (log_tail != kNegInf) later.push_back(log_tail);
    if (!later.empty()) {
      terms.push_back(kernels::logsumexp(later) + m0[l]);
    }
    return kernels::logsumexp(terms);
  }
};

}  // namespace

UniversalDistribution make_switch(const SwitchSpec& spec) {
  auto impl = std::make_shared<SwitchImpl>(spec);
  impl->family = spec.u1.family();
  impl->kind = UniversalDistribution::Kind::Switch;
  impl->label = "switch[" + spec.u0.label() + "->" + spec.u1.label() + "]";
  return UniversalDistribution(impl);
}

double switch_log_marginal(const SwitchSpec& spec, const DataSequence& data) {
  return make_switch(spec).log_joint(data);
}

SwitchBoundReport switch_regret_bound_check(const SwitchSpec& spec,
                                            const DataSequence& data) {
  std::int64_t n = static_cast<std::int64_t>(data.size());
  SwitchBoundReport report;
  double code = -switch_log_marginal(spec, data);
  report.switch_code_nats = code;
  if (n == 0) {
    report.holds = true;
    report.witness = 1;
    report.bound_nats = 0.0;
    return report;
  }
  if (spec.truncation == SwitchSpec::Truncation::SubDistribution) {
    double raw_total = kNegInf;
    {
      std::vector<double> raw(n);
      for (std::int64_t i = 1; i <= n; ++i) {
        raw[i - 1] = spec.log_prior ? spec.log_prior(i)
                                    : -std::log(static_cast<double>(i)) -
                                          std::log(static_cast<double>(i + 1));
      }
      raw_total = kernels::logsumexp(raw);
    }
    double residual = -std::expm1(raw_total);
    double never_cost = residual > 0.0 ? -std::log(residual)
                                       : std::numeric_limits<double>::infinity();
    report.witness = n + 1;
    report.bound_nats = -spec.u0.log_joint(data) + never_cost;
    report.holds = code <= report.bound_nats + 1e-9;
    return report;
  }
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_i = 1;
  for (std::int64_t i = 1; i <= n; ++i) {
    DataSequence head = data.prefix(i - 1);
    double oracle = -spec.u0.log_prefix_marginal(head, n) -
                    (spec.u1.log_prefix_marginal(data, n) -
                     spec.u1.log_prefix_marginal(head, n));
    if (oracle < best) {
      best = oracle;
      best_i = i;
    }
  }
  report.witness = best_i;
  report.bound_nats = best + 2.0 * std::log(static_cast<double>(n));
  report.holds = code <= report.bound_nats + 1e-9;
  return report;
}

}  // namespace mdl
