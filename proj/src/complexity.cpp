#include "mdl/complexity.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <vector>

#include "mdl/kernels.hpp"

namespace mdl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_binom(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// Non-negative number m * 2^e kept normalized so the recurrence can run in
// the linear domain without overflowing (COMP can exceed exp-range of double).
struct ScaledReal {
  double mant = 0.0;
  std::int64_t ex = 0;

  static ScaledReal from_log(double l) {
    ScaledReal s;
    if (l == kNegInf) return s;
    s.ex = static_cast<std::int64_t>(std::floor(l / M_LN2));
    s.mant = std::exp(l - static_cast<double>(s.ex) * M_LN2);
    s.normalize();
    return s;
  }

  void normalize() {
    if (mant == 0.0) {
      ex = 0;
      return;
    }
    int e2 = 0;
    mant = std::frexp(mant, &e2);
    ex += e2;
  }

  ScaledReal& operator+=(const ScaledReal& o) {
    if (o.mant == 0.0) return *this;
    if (mant == 0.0) {
      *this = o;
      return *this;
    }
    if (ex >= o.ex) {
      std::int64_t d = ex - o.ex;
      if (d < 1000) mant += std::ldexp(o.mant, -static_cast<int>(d));
    } else {
      std::int64_t d = o.ex - ex;
      double m = o.mant;
      if (d < 1000) m += std::ldexp(mant, -static_cast<int>(d));
      mant = m;
      ex = o.ex;
    }
    normalize();
    return *this;
  }

  ScaledReal& operator*=(double f) {
    mant *= f;
    normalize();
    return *this;
  }

  double log() const {
    if (mant == 0.0) return kNegInf;
    return std::log(mant) + static_cast<double>(ex) * M_LN2;
  }
};

std::shared_mutex g_cache_mutex;
std::map<std::pair<std::int64_t, int>, double> g_cache;
std::atomic<std::uint64_t> g_cache_hits{0};
std::atomic<std::uint64_t> g_cache_misses{0};

bool cache_lookup(std::int64_t n, int r, double* out) {
  std::shared_lock lock(g_cache_mutex);
  auto it = g_cache.find({n, r});
  if (it == g_cache.end()) {
    g_cache_misses.fetch_add(1, std::memory_order_relaxed);
    return false;
  }
  g_cache_hits.fetch_add(1, std::memory_order_relaxed);
  *out = it->second;
  return true;
}

void cache_store(std::int64_t n, int r, double v) {
  std::unique_lock lock(g_cache_mutex);
  g_cache.emplace(std::make_pair(n, r), v);
}

double bernoulli_comp_nats(std::int64_t n) {
  if (n == 0) return 0.0;
  std::vector<double> terms;
  terms.reserve(n + 1);
  for (std::int64_t n1 = 0; n1 <= n; ++n1) {
    std::int64_t n0 = n - n1;
    double t = log_binom(n, n1);
    if (n1 > 0) t += n1 * std::log(static_cast<double>(n1) / n);
    if (n0 > 0) t += n0 * std::log(static_cast<double>(n0) / n);
    terms.push_back(t);
  }
  return kernels::logsumexp(terms);
}

// Exact binary order-1 Markov normalizer by summing over run patterns:
// a sequence is determined by its start symbol, end symbol, zero/one counts
// and run counts, with binomial multiplicities for the run length splits.
double markov_binary_order1_nats(std::int64_t n) {
  if (n <= 1) return 0.0;
  std::vector<double> terms;
  // Pure sequences; their single observed row fits perfectly.
  terms.push_back(std::log(0.5));
  terms.push_back(std::log(0.5));
  auto cell = [](std::int64_t c, std::int64_t rowsum) {
    return c == 0 ? 0.0
                  : static_cast<double>(c) *
                        std::log(static_cast<double>(c) / static_cast<double>(rowsum));
  };
  for (std::int64_t n0 = 1; n0 <= n - 1; ++n0) {
    std::int64_t n1 = n - n0;
    for (int s = 0; s <= 1; ++s) {
      for (int e = 0; e <= 1; ++e) {
        // Alternating runs force the run-count relation per (start, end).
        std::int64_t kmax = std::min(n0, n1);
        for (std::int64_t k = 1; k <= kmax + 1; ++k) {
          std::int64_t k1, k0;
          if (s == 0 && e == 0) {
            k1 = k;
            k0 = k + 1;
          } else if (s == 1 && e == 1) {
            k0 = k;
            k1 = k + 1;
          } else {
            k0 = k;
            k1 = k;
          }
          if (k0 > n0 || k1 > n1) continue;
          std::int64_t t01 = k1 - (s == 1 ? 1 : 0);
          std::int64_t t10 = k0 - (s == 0 ? 1 : 0);
          std::int64_t t00 = n0 - k0;
          std::int64_t t11 = n1 - k1;
          std::int64_t row0 = t00 + t01;
          std::int64_t row1 = t10 + t11;
          double ml = cell(t00, row0) + cell(t01, row0) + cell(t10, row1) + cell(t11, row1);
          double mult = log_binom(n0 - 1, k0 - 1) + log_binom(n1 - 1, k1 - 1);
          terms.push_back(std::log(0.5) + mult + ml);
        }
      }
    }
  }
  return kernels::logsumexp(terms);
}

// Enumerate every length-n sequence; used for tiny Markov state spaces.
double markov_enumerate_nats(int order, int r, std::int64_t n) {
  ModelFamily family = ModelFamily::markov_chain(order, r);
  std::vector<int> seq(n, 0);
  std::vector<double> terms;
  while (true) {
    DataSequence data = DataSequence::categorical(seq, r);
    SufficientStats stats = SufficientStats::of(family, data);
    ParamVector ml = mle(family, stats);
    terms.push_back(log_likelihood(family, ml, stats));
    int pos = static_cast<int>(n) - 1;
    while (pos >= 0 && seq[pos] == r - 1) {
      seq[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++seq[pos];
  }
  return kernels::logsumexp(terms);
}

}  // namespace

const char* comp_method_name(CompMethod m) {
  switch (m) {
    case CompMethod::ExactSum: return "exact-sum";
    case CompMethod::Recurrence: return "recurrence";
    case CompMethod::Szpankowski: return "szpankowski";
    case CompMethod::Asymptotic: return "asymptotic";
  }
  return "unknown";
}

ComplexityValue comp_bernoulli_exact(std::int64_t n) {
  if (n < 0) throw InvalidInput("sample size must be non-negative");
  double v;
  if (!cache_lookup(n, 2, &v)) {
    v = bernoulli_comp_nats(n);
    cache_store(n, 2, v);
  }
  return {v, CompMethod::ExactSum};
}

ComplexityValue comp_multinomial_exact(std::int64_t n, int r) {
  if (n < 0) throw InvalidInput("sample size must be non-negative");
  if (r < 1) throw InvalidInput("alphabet size must be at least 1");
  if (r == 1 || n == 0) return {0.0, r <= 2 ? CompMethod::ExactSum : CompMethod::Recurrence};
  if (r == 2) return comp_bernoulli_exact(n);
  double v;
  if (cache_lookup(n, r, &v)) return {v, CompMethod::Recurrence};
  // Two-term recurrence upward in the alphabet size, carried in the linear
  // domain; normalizers grow past double range for large n * r.
  ScaledReal prev2 = ScaledReal::from_log(0.0);
  ScaledReal prev1 = ScaledReal::from_log(comp_bernoulli_exact(n).nats);
  double nd = static_cast<double>(n);
  for (int k = 3; k <= r; ++k) {
    ScaledReal cur = prev2;
    cur *= nd / (k - 2);
    cur += prev1;
    double nats = cur.log();
    if (!cache_lookup(n, k, &v)) cache_store(n, k, nats);
    prev2 = prev1;
    prev1 = cur;
  }
  return {prev1.log(), CompMethod::Recurrence};
}

ComplexityValue comp_multinomial_szpankowski(std::int64_t n, int r) {
  if (n < 1) throw InvalidInput("approximation needs a positive sample size");
  if (r < 1) throw InvalidInput("alphabet size must be at least 1");
  double alpha = static_cast<double>(r) / static_cast<double>(n);
  double ca = 0.5 + 0.5 * std::sqrt(1.0 + 4.0 / alpha);
  double nats = n * (std::log(alpha) + (alpha + 2.0) * std::log(ca) - 1.0 / ca) -
                0.5 * std::log(ca + 2.0 / alpha);
  return {nats, CompMethod::Szpankowski};
}

ComplexityValue comp_asymptotic(int k, std::int64_t n, const FisherIntegral& fisher) {
  if (n < 1) throw InvalidInput("asymptotic expansion needs a positive sample size");
  if (k < 0) throw InvalidInput("parameter count must be non-negative");
  if (!(fisher.value > 0.0) || !std::isfinite(fisher.value)) {
    throw ComplexityDiverges("fisher integral must be finite and positive");
  }
  double nats = 0.5 * k * std::log(static_cast<double>(n) / (2.0 * M_PI)) +
                std::log(fisher.value);
  return {nats, CompMethod::Asymptotic};
}

FisherIntegral jeffreys_integral_multinomial(int r) {
  if (r < 1) throw InvalidInput("alphabet size must be at least 1");
  FisherIntegral f;
  f.value = std::exp(0.5 * r * std::log(M_PI) - std::lgamma(0.5 * r));
  f.closed_form = "pi^{r/2} / Gamma(r/2)";
  return f;
}

ComplexityValue comp_markov(int order, int arity, std::int64_t n) {
  if (n < 0) throw InvalidInput("sample size must be non-negative");
  if (arity < 1) throw InvalidInput("alphabet size must be at least 1");
  if (order < 0) throw InvalidInput("order must be non-negative");
  if (arity == 1) return {0.0, CompMethod::ExactSum};
  if (order == 0) return comp_multinomial_exact(n, arity);
  if (n <= order) return {0.0, CompMethod::ExactSum};
  if (arity == 2 && order == 1 && n <= 4096) {
    return {markov_binary_order1_nats(n), CompMethod::ExactSum};
  }
  double cost = static_cast<double>(n) * std::pow(static_cast<double>(arity),
                                                  static_cast<double>(n));
  if (cost <= 2e6) {
    return {markov_enumerate_nats(order, arity, n), CompMethod::ExactSum};
  }
  std::int64_t q = 1;
  for (int i = 0; i < order; ++i) q *= arity;
  int k = static_cast<int>(q) * (arity - 1);
  double log_fisher = static_cast<double>(q) *
                      std::log(jeffreys_integral_multinomial(arity).value);
  double nats = 0.5 * k * std::log(static_cast<double>(n) / (2.0 * M_PI)) + log_fisher;
  return {nats, CompMethod::Asymptotic};
}

double comp_categorical_luckiness(const ModelFamily& family, const LuckinessFunction& v,
                                  std::int64_t n) {
  if (n < 0) throw InvalidInput("sample size must be non-negative");
  if (v.form() == LuckinessFunction::Form::StartUpData) {
    throw InvalidLuckiness("start-up luckiness has no horizon-level normalizer");
  }
  if (n == 0) return 0.0;
  if (family.kind() == FamilyKind::Bernoulli) {
    if (v.form() == LuckinessFunction::Form::Uniform) return comp_bernoulli_exact(n).nats;
    std::vector<double> terms;
    terms.reserve(n + 1);
    for (std::int64_t n1 = 0; n1 <= n; ++n1) {
      std::vector<int> seq(n, 0);
      for (std::int64_t i = 0; i < n1; ++i) seq[i] = 1;
      DataSequence data = DataSequence::categorical(std::move(seq), 2);
      terms.push_back(log_binom(n, n1) + max_luckiness_log_likelihood(family, v, data));
    }
    return kernels::logsumexp(terms);
  }
  if (family.kind() == FamilyKind::Multinomial) {
    if (v.form() == LuckinessFunction::Form::Uniform) {
      return comp_multinomial_exact(n, family.arity()).nats;
    }
    int r = family.arity();
    double combos = 1.0;
    for (int j = 1; j < r; ++j) combos *= static_cast<double>(n + j) / j;
    if (combos > 2e5) {
      throw InvalidInput("luckiness-tilted multinomial normalizer too large to enumerate");
    }
    // Walk all count vectors (compositions of n into r parts).
    std::vector<std::int64_t> c(r, 0);
    c[0] = n;
    std::vector<double> terms;
    double log_nfact = std::lgamma(static_cast<double>(n) + 1.0);
    while (true) {
      double mult = log_nfact;
      for (int j = 0; j < r; ++j) mult -= std::lgamma(static_cast<double>(c[j]) + 1.0);
      std::vector<int> seq;
      seq.reserve(n);
      for (int j = 0; j < r; ++j) {
        for (std::int64_t i = 0; i < c[j]; ++i) seq.push_back(j);
      }
      DataSequence data = DataSequence::categorical(std::move(seq), r);
      terms.push_back(mult + max_luckiness_log_likelihood(family, v, data));
      // Next composition in colex order.
      int j = 0;
      while (j < r - 1 && c[j] == 0) ++j;
      if (j == r - 1) break;
      std::int64_t head = c[j];
      c[j] = 0;
      c[0] = head - 1;
      ++c[j + 1];
    }
    return kernels::logsumexp(terms);
  }
  throw InvalidInput("luckiness normalizer supported for bernoulli and multinomial only");
}

void comp_cache_counters(std::uint64_t* hits, std::uint64_t* misses) {
  if (hits) *hits = g_cache_hits.load(std::memory_order_relaxed);
  if (misses) *misses = g_cache_misses.load(std::memory_order_relaxed);
}

}  // namespace mdl
