// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdl/bnscore.hpp"
#include "mdl/complexity.hpp"
#include "mdl/safetest.hpp"
#include "mdl/selection.hpp"
#include "mdl/switchdist.hpp"
#include "mdl/universal.hpp"

using mdl::BnScoreKind;
using mdl::CategoricalDataset;
using mdl::DagStructure;
using mdl::DataSequence;
using mdl::ModelFamily;
using mdl::PlugInEstimator;
using mdl::PriorSpec;
using mdl::SwitchSpec;
using mdl::UniversalDistribution;

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

DataSequence bits_of_mask(std::uint32_t mask, int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<int>((mask >> i) & 1u);
  return DataSequence::categorical(std::move(v), 2);
}

DataSequence random_cats(std::mt19937_64& rng, int n, int arity) {
  std::uniform_int_distribution<int> pick(0, arity - 1);
  std::vector<int> v(n);
  for (int& x : v) x = pick(rng);
  return DataSequence::categorical(std::move(v), 2 > arity ? 2 : arity);
}

UniversalDistribution jeffreys_bayes() {
  ModelFamily bern = ModelFamily::bernoulli();
  return make_bayes(bern, PriorSpec::jeffreys(bern));
}

UniversalDistribution point_half() {
  mdl::ParamVector p;
  p.values = {0.5};
  p.dimension = 0;
  return make_nml(ModelFamily::singleton(ModelFamily::bernoulli(), p));
}

mdl::ParamVector params(std::vector<double> v, int dim) {
  mdl::ParamVector p;
  p.values = std::move(v);
  p.dimension = dim;
  return p;
}

bool criterion_normalizers() {
  double two = std::exp(mdl::comp_bernoulli_exact(2).nats);
  double three = std::exp(mdl::comp_bernoulli_exact(3).nats);
  return near(two, 2.5, 1e-12) && near(three, 78.0 / 27.0, 1e-12);
}

bool criterion_horizon() {
  UniversalDistribution u = make_nml(ModelFamily::bernoulli());
  DataSequence zz = DataSequence::bits("00");
  double at2 = std::exp(u.log_joint(zz));
  double at3 = std::exp(u.log_prefix_marginal(zz, 3));
  return near(at2, 0.4, 1e-12) && near(at3, 31.0 / 78.0, 1e-12) && at3 < at2;
}

bool criterion_jeffreys_plugin() {
  ModelFamily bern = ModelFamily::bernoulli();
  PriorSpec half = PriorSpec::beta(0.5, 0.5);
  PlugInEstimator kt = PlugInEstimator::smoothed_ml(0.5);
  for (int n = 1; n <= 10; ++n) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      DataSequence seq = bits_of_mask(mask, n);
      double preq = mdl::preq_plugin_log(bern, kt, seq);
      double bayes = mdl::bayes_log_marginal(bern, half, seq);
      if (!near(preq, bayes, 1e-12)) return false;
    }
  }
  return true;
}

bool chain_rule_holds(const UniversalDistribution& u, const DataSequence& seq) {
  double sum = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) sum += u.log_predictive(seq, i);
  return near(sum, u.log_joint(seq), 1e-9);
}

bool criterion_chain_rule() {
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ModelFamily bern = ModelFamily::bernoulli();
  ModelFamily tri = ModelFamily::multinomial(3);
  ModelFamily chain = ModelFamily::markov_chain(1, 2);
  std::vector<std::pair<UniversalDistribution, int>> categorical = {
      {make_bayes(bern, PriorSpec::jeffreys(bern)), 2},
      {make_bayes(tri, PriorSpec::symmetric_dirichlet(3, 1.0)), 3},
      {make_bayes(chain, PriorSpec::jeffreys(chain)), 2},
      {make_nml(bern), 2},
      {make_two_part(bern, {params({0.3}, 1), params({0.7}, 1)}, {0.25, 0.25}), 2},
      {make_preq_plugin(bern, PlugInEstimator::smoothed_ml(0.5)), 2},
  };
  for (auto trunc : {SwitchSpec::Truncation::Renormalize,
                     SwitchSpec::Truncation::SubDistribution}) {
    SwitchSpec spec(point_half(), jeffreys_bayes());
    spec.truncation = trunc;
    categorical.push_back({make_switch(spec), 2});
  }
  for (const auto& [u, arity] : categorical) {
    for (int rep = 0; rep < 100; ++rep) {
      int n = 1 + static_cast<int>(rng() % 40);
      if (!chain_rule_holds(u, random_cats(rng, n, arity))) return false;
    }
  }

  UniversalDistribution cond =
      make_bayes_conditional(ModelFamily::gaussian_location(1.0), 1);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + static_cast<int>(rng() % 39);
    std::vector<double> v(n);
    for (double& x : v) x = gauss(rng);
    if (!chain_rule_holds(cond, DataSequence::real(std::move(v)))) return false;
  }

  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.2, 0.3, 0.3, 0.8;
  UniversalDistribution lnml =
      make_lnml_regression(ModelFamily::linear_regression(2, 0.9), sigma);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 1 + static_cast<int>(rng() % 40);
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = gauss(rng);
      x(i, 1) = gauss(rng);
      y(i) = gauss(rng);
    }
    if (!chain_rule_holds(lnml, DataSequence::regression(x, y))) return false;
  }
  return true;
}

bool criterion_normalization() {
  SwitchSpec spec(point_half(), jeffreys_bayes());
  spec.truncation = SwitchSpec::Truncation::Renormalize;
  std::vector<UniversalDistribution> proper = {
      jeffreys_bayes(),
      make_nml(ModelFamily::bernoulli()),
      make_preq_plugin(ModelFamily::bernoulli(), PlugInEstimator::smoothed_ml(0.5)),
      make_switch(spec),
  };
  UniversalDistribution two_part = make_two_part(
      ModelFamily::bernoulli(), {params({0.3}, 1), params({0.7}, 1)}, {0.25, 0.25});
  for (int n = 1; n <= 10; ++n) {
    std::vector<double> sums(proper.size(), 0.0);
    double deficient = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      DataSequence seq = bits_of_mask(mask, n);
      for (std::size_t k = 0; k < proper.size(); ++k) {
        sums[k] += std::exp(proper[k].log_joint(seq));
      }
      deficient += std::exp(two_part.log_joint(seq));
    }
    for (double s : sums) {
      if (!near(s, 1.0, 1e-9)) return false;
    }
    if (deficient > 1.0 + 1e-9) return false;
  }
  return true;
}

bool criterion_szpankowski() {
  auto gap = [](std::int64_t n, int r) {
    return std::abs(mdl::comp_multinomial_szpankowski(n, r).nats -
                    mdl::comp_multinomial_exact(n, r).nats);
  };
  return gap(100, 50) <= 0.1 && gap(1000, 100) <= 0.1 && gap(100, 2) <= 0.5;
}

bool criterion_asymptotic() {
  auto gap = [](std::int64_t n) {
    double expansion = 0.5 * std::log(static_cast<double>(n) / (2.0 * M_PI)) +
                       std::log(M_PI);
    return std::abs(mdl::comp_bernoulli_exact(n).nats - expansion);
  };
  double g2 = gap(100), g3 = gap(1000), g4 = gap(10000);
  return g2 > g3 && g3 > g4 && g4 < 0.05;
}

bool criterion_switch_bound() {
  SwitchSpec spec(point_half(), jeffreys_bayes());
  spec.truncation = SwitchSpec::Truncation::Renormalize;
  for (int n = 1; n <= 10; ++n) {
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      mdl::SwitchBoundReport report =
          mdl::switch_regret_bound_check(spec, bits_of_mask(mask, n));
      if (!report.holds) return false;
    }
  }
  return true;
}

bool criterion_no_hypercompression() {
  mdl::Type1Result r =
      mdl::type1_simulate(point_half(), jeffreys_bayes(), 100, 10000, 0.05, 424242);
  double bound = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 10000.0);
  return r.within_bound && r.rate <= bound;
}

CategoricalDataset random_table(std::mt19937_64& rng, int rows,
                                std::vector<int> arities) {
  std::vector<std::vector<int>> cols;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < arities.size(); ++j) {
    std::uniform_int_distribution<int> pick(0, arities[j] - 1);
    std::vector<int> col(rows);
    for (int& x : col) x = pick(rng);
    cols.push_back(std::move(col));
    names.push_back(std::string(1, static_cast<char>('a' + j)));
  }
  return CategoricalDataset::of(std::move(names), std::move(arities), std::move(cols));
}

bool criterion_likelihood_equivalence() {
  std::mt19937_64 rng(8712);
  DagStructure xy = DagStructure::empty(2);
  xy.parents[1] = {0};
  DagStructure yx = DagStructure::empty(2);
  yx.parents[0] = {1};
  for (int rep = 0; rep < 20; ++rep) {
    CategoricalDataset data = random_table(rng, 60, {2, 2});
    for (BnScoreKind kind : {BnScoreKind::Qnml, BnScoreKind::Bdeu}) {
      double a = mdl::bn_total_score(kind, data, xy, 1.0);
      double b = mdl::bn_total_score(kind, data, yx, 1.0);
      if (!near(a, b, 1e-9)) return false;
    }
  }

  // a -> b -> c, its reversal, and the a <- b -> c fork encode the same
  // independences; all three must score identically.
  CategoricalDataset data = random_table(rng, 90, {2, 3, 2});
  DagStructure forward = DagStructure::empty(3);
  forward.parents[1] = {0};
  forward.parents[2] = {1};
  DagStructure backward = DagStructure::empty(3);
  backward.parents[1] = {2};
  backward.parents[0] = {1};
  DagStructure fork = DagStructure::empty(3);
  fork.parents[0] = {1};
  fork.parents[2] = {1};
  for (BnScoreKind kind : {BnScoreKind::Qnml, BnScoreKind::Bdeu}) {
    double f = mdl::bn_total_score(kind, data, forward, 1.0);
    double r = mdl::bn_total_score(kind, data, backward, 1.0);
    double k = mdl::bn_total_score(kind, data, fork, 1.0);
    if (!near(f, r, 1e-9) || !near(f, k, 1e-9)) return false;
  }
  return true;
}

bool criterion_fnml_decomposable() {
  std::mt19937_64 rng(5150);
  CategoricalDataset data = random_table(rng, 70, {2, 2, 3});
  DagStructure dag = DagStructure::empty(3);
  dag.parents[1] = {0};
  dag.parents[2] = {0, 1};
  double total = mdl::bn_total_score(BnScoreKind::Fnml, data, dag, 1.0);
  double by_hand = 0.0;
  for (int v = 0; v < 3; ++v) {
    by_hand += mdl::bn_local_score(BnScoreKind::Fnml, data, v, dag.parents[v], 1.0);
  }
  mdl::LocalScoreCache cache;
  double cold = mdl::bn_total_score(BnScoreKind::Fnml, data, dag, 1.0, &cache);
  double warm = mdl::bn_total_score(BnScoreKind::Fnml, data, dag, 1.0, &cache);
  return near(total, by_hand, 1e-12) && near(cold, total, 1e-12) &&
         near(warm, total, 1e-12) && cache.hits() == 3;
}

bool criterion_consistency() {
  ModelFamily bern = ModelFamily::bernoulli();
  ModelFamily chain = ModelFamily::markov_chain(1, 2);
  int family_hits = 0;
  for (int run = 0; run < 100; ++run) {
    std::mt19937_64 rng(1000 + run);
    std::bernoulli_distribution coin(0.35);
    std::vector<int> v(1500);
    for (int& x : v) x = coin(rng) ? 1 : 0;
    DataSequence seq = DataSequence::categorical(std::move(v), 2);
    std::vector<mdl::Candidate> cands;
    cands.emplace_back("bernoulli", make_bayes(bern, PriorSpec::jeffreys(bern)));
    cands.emplace_back("markov(1,2)", make_bayes(chain, PriorSpec::jeffreys(chain)));
    if (mdl::select(cands, seq).winner == "bernoulli") ++family_hits;
  }

  int order_hits = 0;
  for (int run = 0; run < 100; ++run) {
    std::mt19937_64 rng(2000 + run);
    std::bernoulli_distribution flip(0.15);
    std::vector<int> v(1500);
    v[0] = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      v[i] = flip(rng) ? 1 - v[i - 1] : v[i - 1];
    }
    DataSequence seq = DataSequence::categorical(std::move(v), 2);
    if (mdl::markov_order_select(seq, 3).winner == "order=1") ++order_hits;
  }

  int varsel_hits = 0;
  for (int run = 0; run < 100; ++run) {
    std::mt19937_64 rng(3000 + run);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int n = 200, m = 8;
    Eigen::MatrixXd x(n, m);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) x(i, j) = gauss(rng);
      y(i) = 1.5 * x(i, 3) + gauss(rng);
    }
    mdl::VarSelResult r = mdl::variable_select(x, y, mdl::VarSelConfig{});
    bool has_true = false;
    for (int j : r.selected) has_true = has_true || j == 3;
    if (has_true && r.selected.size() <= 2) ++varsel_hits;
  }
  return family_hits >= 95 && order_hits >= 95 && varsel_hits >= 95;
}

bool criterion_maximin() {
  UniversalDistribution u = make_nml(ModelFamily::bernoulli());
  double best_fit[16];
  double nml_ratio_min = 1e300, nml_ratio_max = -1e300;
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    DataSequence seq = bits_of_mask(mask, 4);
    double ones = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) ones += seq.cat(i);
    double zeros = 4.0 - ones;
    double ml = 0.0;
    if (ones > 0.0) ml += ones * std::log(ones / 4.0);
    if (zeros > 0.0) ml += zeros * std::log(zeros / 4.0);
    best_fit[mask] = std::exp(ml);
    double ratio = std::exp(u.log_joint(seq)) / best_fit[mask];
    nml_ratio_min = std::min(nml_ratio_min, ratio);
    nml_ratio_max = std::max(nml_ratio_max, ratio);
  }
  if (nml_ratio_max - nml_ratio_min > 1e-12) return false;

  std::mt19937_64 rng(616);
  std::exponential_distribution<double> unit(1.0);
  for (int draw = 0; draw < 200; ++draw) {
    double w[16], total = 0.0;
    for (double& x : w) total += (x = unit(rng));
    double worst = 1e300;
    for (int mask = 0; mask < 16; ++mask) {
      worst = std::min(worst, (w[mask] / total) / best_fit[mask]);
    }
    if (worst > nml_ratio_min + 1e-12) return false;
  }
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool run_twice_identical(const std::string& dir, const std::string& args) {
  for (int pass = 0; pass < 2; ++pass) {
    std::string cmd = std::string(MDL_CLI_PATH) + " " + args + " > " + dir +
                      "/pass" + std::to_string(pass) + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return false;
  }
  std::string first = slurp(dir + "/pass0");
  return !first.empty() && first == slurp(dir + "/pass1");
}

bool criterion_cli_determinism() {
  char tmpl[] = "/tmp/mdlaccXXXXXX";
  char* dir = mkdtemp(tmpl);
  if (dir == nullptr) return false;
  std::string root(dir);

  std::mt19937_64 rng(99);
  std::ofstream coin(root + "/coin.csv");
  coin << "flip\n";
  for (int i = 0; i < 50; ++i) coin << (rng() % 2) << "\n";
  coin.close();
  std::ofstream table(root + "/table.csv");
  table << "a,b\n";
  for (int i = 0; i < 40; ++i) {
    int a = static_cast<int>(rng() % 2);
    int b = (rng() % 10 < 8) ? a : 1 - a;
    table << a << "," << b << "\n";
  }
  table.close();

  return run_twice_identical(root, "select --input " + root + "/coin.csv --column flip") &&
         run_twice_identical(root, "bn --input " + root + "/table.csv --score qnml") &&
         run_twice_identical(root, "test --null bernoulli:0.5 --alt jeffreys "
                                   "--simulate 400 --n 30");
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    bool (*fn)();
  };
  const Entry entries[] = {
      {"bernoulli NML normalizers at n=2,3", criterion_normalizers},
      {"horizon dependence of NML(00)", criterion_horizon},
      {"KT plug-in matches Beta(1/2,1/2) Bayes", criterion_jeffreys_plugin},
      {"chain rule telescopes for every kind", criterion_chain_rule},
      {"normalization by enumeration, n <= 10", criterion_normalization},
      {"Szpankowski approximation error", criterion_szpankowski},
      {"asymptotic expansion error shrinks", criterion_asymptotic},
      {"switch code length bound", criterion_switch_bound},
      {"no-hypercompression rejection rate", criterion_no_hypercompression},
      {"qNML and BDeu likelihood equivalence", criterion_likelihood_equivalence},
      {"fNML decomposability and cache transparency", criterion_fnml_decomposable},
      {"consistency of family, order, subset selection", criterion_consistency},
      {"NML maximin fitness ratio", criterion_maximin},
      {"CLI byte-for-byte determinism", criterion_cli_determinism},
  };
  int failures = 0;
  int index = 0;
  for (const Entry& e : entries) {
    ++index;
    bool ok = e.fn();
    if (!ok) ++failures;
    std::printf("%s %2d %s\n", ok ? "PASS" : "FAIL", index, e.name);
  }
  return failures == 0 ? 0 : 1;
}
