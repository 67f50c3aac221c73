#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "mdl/data.hpp"

namespace mdl {

// Complete categorical data table, column per variable.
struct CategoricalDataset {
  std::vector<std::string> names;
  std::vector<int> arities;
  // columns[j][i]: value of variable j in row i.
  std::vector<std::vector<int>> columns;

  std::size_t variable_count() const { return columns.size(); }
  std::size_t row_count() const { return columns.empty() ? 0 : columns[0].size(); }

  static CategoricalDataset of(std::vector<std::string> names, std::vector<int> arities,
                               std::vector<std::vector<int>> columns);
};

struct DagStructure {
  // parents[v]: sorted parent indices of node v.
  std::vector<std::vector<int>> parents;

  int node_count() const { return static_cast<int>(parents.size()); }
  bool has_edge(int from, int to) const;
  bool is_acyclic() const;

  static DagStructure empty(int nodes);
};

// Memo for local scores within one scoring configuration, keyed by the
// child and its sorted parent set.
class LocalScoreCache {
public:
  bool lookup(int child, const std::vector<int>& parents, double* out) const;
  void store(int child, const std::vector<int>& parents, double value);
  std::uint64_t hits() const;
  std::uint64_t misses() const;

private:
  mutable std::mutex mutex_;
  std::map<std::pair<int, std::vector<int>>, double> map_;
  mutable std::uint64_t hits_ = 0;
  mutable std::uint64_t misses_ = 0;
};

enum class BnScoreKind { Fnml, Qnml, Bdeu };

BnScoreKind bn_score_kind_from_name(const std::string& name);
const char* bn_score_kind_name(BnScoreKind kind);

// Per parent configuration: child ML log-likelihood minus the exact
// multinomial normalizer at that configuration's count.
double fnml_local(const CategoricalDataset& data, int child, const std::vector<int>& parents);

// Difference of collapsed-variable NML joints for child+parents vs parents.
double qnml_local(const CategoricalDataset& data, int child, const std::vector<int>& parents);

// Dirichlet-equivalent marginal likelihood with total pseudo-count alpha
// spread over the child x parent-configuration cells.
double bdeu_local(const CategoricalDataset& data, int child, const std::vector<int>& parents,
                  double alpha);

double bn_local_score(BnScoreKind kind, const CategoricalDataset& data, int child,
                      const std::vector<int>& parents, double alpha);

// Sum of local scores over all nodes (all three scores decompose).
double bn_total_score(BnScoreKind kind, const CategoricalDataset& data,
                      const DagStructure& dag, double alpha,
                      LocalScoreCache* cache = nullptr);

struct HillClimbOptions {
  BnScoreKind kind = BnScoreKind::Fnml;
  double alpha = 1.0;
  int max_parents = 4;
  int max_iterations = 1000;
  // Recorded for reproducibility bookkeeping; the climb itself is
  // deterministic through the lexicographic tie rule.
  std::uint64_t seed = 0;
};

struct HillClimbResult {
  DagStructure dag;
  double score = 0.0;
  int iterations = 0;
  std::vector<double> local_scores;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
};

// Greedy structure search from the empty graph with best-improvement
// add/delete/reverse moves; ties fall to the earliest move in a fixed
// lexicographic enumeration.
HillClimbResult hill_climb(const CategoricalDataset& data, const HillClimbOptions& options);

}  // namespace mdl
