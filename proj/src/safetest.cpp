#include "mdl/safetest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace mdl {

namespace {

void check_level(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw InvalidInput("significance level must lie strictly between 0 and 1");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

EvidenceReport report_from_d(double d, double alpha) {
  EvidenceReport r;
  r.d_nats = d;
  r.ratio = std::exp(d);
  r.p_conservative = std::min(r.ratio, 1.0);
  r.alpha = alpha;
  r.reject = r.ratio <= alpha;
  return r;
}

}  // namespace

EvidenceReport evidence(const UniversalDistribution& null_dist,
                        const UniversalDistribution& alternative,
                        const DataSequence& data, double alpha) {
  check_level(alpha);
  if (null_dist.family().kind() != FamilyKind::Singleton) {
    throw UnsupportedComposite("the null must be a single distribution, not a family");
  }
  double log_p0 = null_dist.log_joint(data);
  double log_u1 = alternative.log_joint(data);
  return report_from_d(log_p0 - log_u1, alpha);
}

EvidenceReport combine(const std::vector<EvidenceReport>& batches, double alpha) {
  check_level(alpha);
  double d = 0.0;
  for (const EvidenceReport& b : batches) d += b.d_nats;
  return report_from_d(d, alpha);
}

Type1Result type1_simulate(const UniversalDistribution& null_dist,
                           const UniversalDistribution& alternative, int n,
                           std::int64_t trials, double alpha, std::uint64_t seed,
                           int threads) {
  check_level(alpha);
  if (n < 1) throw InvalidInput("sequence length must be positive");
  if (trials < 1) throw InvalidInput("trial count must be positive");
  if (threads < 1) threads = 1;
  if (null_dist.family().kind() != FamilyKind::Singleton) {
    throw UnsupportedComposite("the null must be a single distribution, not a family");
  }
  const ModelFamily& base = null_dist.family().base();
  if (!base.categorical() || base.kind() == FamilyKind::MarkovChain) {
    throw InvalidInput("simulation supports bernoulli and multinomial nulls");
  }
  int r = base.arity();
  std::vector<double> cdf(r, 0.0);
  {
    const ParamVector& point = null_dist.family().point();
    if (base.kind() == FamilyKind::Bernoulli) {
      cdf[0] = 1.0 - point.values[0];
      cdf[1] = 1.0;
    } else {
      double acc = 0.0;
      for (int j = 0; j < r; ++j) {
        acc += point.values[j];
        cdf[j] = acc;
      }
    }
  }

  constexpr std::int64_t kBlock = 256;
  std::int64_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<std::int64_t> block_rejections(blocks, 0);

  auto run_block = [&](std::int64_t b) {
    std::mt19937_64 rng(splitmix64(seed ^ static_cast<std::uint64_t>(b)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::int64_t lo = b * kBlock;
    std::int64_t hi = std::min(trials, lo + kBlock);
    std::int64_t rejected = 0;
    std::vector<int> seq(n);
    for (std::int64_t t = lo; t < hi; ++t) {
      for (int i = 0; i < n; ++i) {
        double u = unif(rng);
        int v = 0;
        while (v < r - 1 && u > cdf[v]) ++v;
        seq[i] = v;
      }
      DataSequence data = DataSequence::categorical(seq, r);
      double d = null_dist.log_joint(data) - alternative.log_joint(data);
      if (std::exp(d) <= alpha) ++rejected;
    }
    block_rejections[b] = rejected;
  };

  if (threads == 1 || blocks == 1) {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::int64_t> next{0};
    int workers = std::min<std::int64_t>(threads, blocks);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::int64_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
          run_block(b);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  Type1Result result;
  result.trials = trials;
  for (std::int64_t b = 0; b < blocks; ++b) result.rejections += block_rejections[b];
  result.rate = static_cast<double>(result.rejections) / static_cast<double>(trials);
  result.alpha = alpha;
  result.bound = alpha + 3.0 * std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(trials));
  result.within_bound = result.rate <= result.bound;
  return result;
}

}  // namespace mdl
