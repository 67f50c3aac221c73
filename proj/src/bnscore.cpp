#include "mdl/bnscore.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mdl/complexity.hpp"

namespace mdl {

namespace {

// Count child values per observed parent configuration.
std::map<std::int64_t, std::vector<long long>> group_counts(
    const CategoricalDataset& data, int child, const std::vector<int>& parents) {
  std::map<std::int64_t, std::vector<long long>> by_config;
  int r = data.arities[child];
  std::size_t n = data.row_count();
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t cfg = 0;
    for (int p : parents) cfg = cfg * data.arities[p] + data.columns[p][i];
    auto [it, fresh] = by_config.try_emplace(cfg);
    if (fresh) it->second.assign(r, 0);
    ++it->second[data.columns[child][i]];
  }
  return by_config;
}

void check_vars(const CategoricalDataset& data, int child, const std::vector<int>& parents) {
  int n = static_cast<int>(data.variable_count());
  if (child < 0 || child >= n) throw InvalidInput("child index out of range");
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (parents[i] < 0 || parents[i] >= n) throw InvalidInput("parent index out of range");
    if (parents[i] == child) throw InvalidInput("a node cannot parent itself");
    if (i > 0 && parents[i] <= parents[i - 1]) {
      throw InvalidInput("parent sets must be sorted and duplicate-free");
    }
  }
}

double collapsed_nml_log(const CategoricalDataset& data, const std::vector<int>& vars) {
  double arity_d = 1.0;
  for (int v : vars) arity_d *= static_cast<double>(data.arities[v]);
  if (arity_d > 1e6) {
    throw UnsupportedCardinality("collapsed variable exceeds the 1e6 cardinality cap");
  }
  int arity = static_cast<int>(arity_d);
  std::size_t n = data.row_count();
  std::map<std::int64_t, long long> counts;
  for (std::size_t i = 0; i < n; ++i) {
    std::int64_t combo = 0;
    for (int v : vars) combo = combo * data.arities[v] + data.columns[v][i];
    ++counts[combo];
  }
  double ml = 0.0;
  for (const auto& [combo, m] : counts) {
    ml += static_cast<double>(m) * std::log(static_cast<double>(m) / n);
  }
  return ml - comp_multinomial_exact(static_cast<std::int64_t>(n), arity).nats;
}

DagStructure apply_edge(const DagStructure& dag, int from, int to, bool add) {
  DagStructure next = dag;
  auto& p = next.parents[to];
  if (add) {
    p.insert(std::lower_bound(p.begin(), p.end(), from), from);
  } else {
    p.erase(std::find(p.begin(), p.end(), from));
  }
  return next;
}

}  // namespace

CategoricalDataset CategoricalDataset::of(std::vector<std::string> names,
                                          std::vector<int> arities,
                                          std::vector<std::vector<int>> columns) {
  if (names.size() != arities.size() || names.size() != columns.size()) {
    throw InvalidInput("dataset needs one name and arity per column");
  }
  if (columns.empty()) throw InvalidInput("dataset needs at least one variable");
  if (columns.size() > 64) throw InvalidInput("dataset is capped at 64 variables");
  std::size_t rows = columns[0].size();
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (arities[j] < 1) throw InvalidInput("arity must be at least 1");
    if (columns[j].size() != rows) throw InvalidInput("columns must have equal length");
    for (int v : columns[j]) {
      if (v < 0 || v >= arities[j]) throw InvalidInput("value out of range for its arity");
    }
  }
  CategoricalDataset d;
  d.names = std::move(names);
  d.arities = std::move(arities);
  d.columns = std::move(columns);
  return d;
}

bool DagStructure::has_edge(int from, int to) const {
  const auto& p = parents[to];
  return std::binary_search(p.begin(), p.end(), from);
}

bool DagStructure::is_acyclic() const {
  int n = node_count();
  std::vector<int> indegree(n, 0);
  for (int v = 0; v < n; ++v) indegree[v] = static_cast<int>(parents[v].size());
  std::vector<std::vector<int>> children(n);
  for (int v = 0; v < n; ++v) {
    for (int p : parents[v]) children[p].push_back(v);
  }
  std::vector<int> queue;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) queue.push_back(v);
  }
  int seen = 0;
  while (!queue.empty()) {
    int v = queue.back();
    queue.pop_back();
    ++seen;
    for (int c : children[v]) {
      if (--indegree[c] == 0) queue.push_back(c);
    }
  }
  return seen == n;
}

DagStructure DagStructure::empty(int nodes) {
  if (nodes < 1) throw InvalidInput("graph needs at least one node");
  if (nodes > 64) throw InvalidInput("graph is capped at 64 nodes");
  DagStructure d;
  d.parents.assign(nodes, {});
  return d;
}

bool LocalScoreCache::lookup(int child, const std::vector<int>& parents, double* out) const {
  std::lock_guard lock(mutex_);
  auto it = map_.find({child, parents});
  if (it == map_.end()) {
    ++misses_;
    return false;
  }
  ++hits_;
  *out = it->second;
  return true;
}

void LocalScoreCache::store(int child, const std::vector<int>& parents, double value) {
  std::lock_guard lock(mutex_);
  map_.emplace(std::make_pair(child, parents), value);
}

std::uint64_t LocalScoreCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::uint64_t LocalScoreCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

BnScoreKind bn_score_kind_from_name(const std::string& name) {
  if (name == "fnml") return BnScoreKind::Fnml;
  if (name == "qnml") return BnScoreKind::Qnml;
  if (name == "bdeu") return BnScoreKind::Bdeu;
  throw InvalidInput("unknown score '" + name + "' (expected fnml, qnml, or bdeu)");
}

const char* bn_score_kind_name(BnScoreKind kind) {
  switch (kind) {
    case BnScoreKind::Fnml: return "fnml";
    case BnScoreKind::Qnml: return "qnml";
    case BnScoreKind::Bdeu: return "bdeu";
  }
  return "unknown";
}

double fnml_local(const CategoricalDataset& data, int child, const std::vector<int>& parents) {
  check_vars(data, child, parents);
  int r = data.arities[child];
  double score = 0.0;
  for (const auto& [cfg, counts] : group_counts(data, child, parents)) {
    long long nc = 0;
    for (long long c : counts) nc += c;
    double ml = 0.0;
    for (long long c : counts) {
      if (c > 0) ml += static_cast<double>(c) * std::log(static_cast<double>(c) / nc);
    }
    score += ml - comp_multinomial_exact(nc, r).nats;
  }
  return score;
}

double qnml_local(const CategoricalDataset& data, int child, const std::vector<int>& parents) {
  check_vars(data, child, parents);
  std::vector<int> with_child = parents;
  with_child.insert(std::lower_bound(with_child.begin(), with_child.end(), child), child);
  return collapsed_nml_log(data, with_child) - collapsed_nml_log(data, parents);
}

double bdeu_local(const CategoricalDataset& data, int child, const std::vector<int>& parents,
                  double alpha) {
  check_vars(data, child, parents);
  if (!(alpha > 0.0)) throw InvalidInput("equivalent sample size must be positive");
  double q = 1.0;
  for (int p : parents) q *= static_cast<double>(data.arities[p]);
  if (q > 1e15) throw UnsupportedCardinality("parent configuration space too large");
  int r = data.arities[child];
  double ap = alpha / q;
  double apr = alpha / (q * r);
  double score = 0.0;
  for (const auto& [cfg, counts] : group_counts(data, child, parents)) {
    long long nc = 0;
    for (long long c : counts) nc += c;
    score += std::lgamma(ap) - std::lgamma(ap + nc);
    for (long long c : counts) {
      if (c > 0) score += std::lgamma(apr + c) - std::lgamma(apr);
    }
  }
  return score;
}

double bn_local_score(BnScoreKind kind, const CategoricalDataset& data, int child,
                      const std::vector<int>& parents, double alpha) {
  switch (kind) {
    case BnScoreKind::Fnml: return fnml_local(data, child, parents);
    case BnScoreKind::Qnml: return qnml_local(data, child, parents);
    case BnScoreKind::Bdeu: return bdeu_local(data, child, parents, alpha);
  }
  throw InvalidInput("unknown score kind");
}

double bn_total_score(BnScoreKind kind, const CategoricalDataset& data,
                      const DagStructure& dag, double alpha, LocalScoreCache* cache) {
  if (dag.node_count() != static_cast<int>(data.variable_count())) {
    throw InvalidInput("graph and dataset disagree on the variable count");
  }
  if (!dag.is_acyclic()) throw InvalidInput("structure has a cycle");
  double total = 0.0;
  for (int v = 0; v < dag.node_count(); ++v) {
    double local;
    if (cache != nullptr && cache->lookup(v, dag.parents[v], &local)) {
      total += local;
      continue;
    }
    local = bn_local_score(kind, data, v, dag.parents[v], alpha);
    if (cache != nullptr) cache->store(v, dag.parents[v], local);
    total += local;
  }
  return total;
}

HillClimbResult hill_climb(const CategoricalDataset& data, const HillClimbOptions& options) {
  int n = static_cast<int>(data.variable_count());
  if (options.max_parents < 0) throw InvalidInput("parent cap must be non-negative");
  if (options.max_iterations < 0) throw InvalidInput("iteration cap must be non-negative");
  LocalScoreCache cache;
  auto local = [&](int child, const std::vector<int>& parents) {
    double v;
    if (cache.lookup(child, parents, &v)) return v;
    v = bn_local_score(options.kind, data, child, parents, options.alpha);
    cache.store(child, parents, v);
    return v;
  };

  HillClimbResult result;
  result.dag = DagStructure::empty(n);
  std::vector<double> locals(n);
  for (int v = 0; v < n; ++v) locals[v] = local(v, {});

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double best_delta = 1e-12;
    int best_kind = -1, best_u = -1, best_v = -1;
    // Fixed enumeration: pair by pair, add before delete before reverse, so
    // equal improvements resolve the same way on every run.
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        bool edge = result.dag.has_edge(u, v);
        if (!edge && static_cast<int>(result.dag.parents[v].size()) < options.max_parents) {
          DagStructure next = apply_edge(result.dag, u, v, true);
          if (next.is_acyclic()) {
            double delta = local(v, next.parents[v]) - locals[v];
            if (delta > best_delta) {
              best_delta = delta;
              best_kind = 0;
              best_u = u;
              best_v = v;
            }
          }
        }
        if (edge) {
          DagStructure del = apply_edge(result.dag, u, v, false);
          double delta = local(v, del.parents[v]) - locals[v];
          if (delta > best_delta) {
            best_delta = delta;
            best_kind = 1;
            best_u = u;
            best_v = v;
          }
          if (static_cast<int>(result.dag.parents[u].size()) < options.max_parents) {
            DagStructure rev = apply_edge(del, v, u, true);
            if (rev.is_acyclic()) {
              double delta_rev = local(v, rev.parents[v]) - locals[v] +
                                 local(u, rev.parents[u]) - locals[u];
              if (delta_rev > best_delta) {
                best_delta = delta_rev;
                best_kind = 2;
                best_u = u;
                best_v = v;
              }
            }
          }
        }
      }
    }
    if (best_kind < 0) break;
    if (best_kind == 0) {
      result.dag = apply_edge(result.dag, best_u, best_v, true);
      locals[best_v] = local(best_v, result.dag.parents[best_v]);
    } else if (best_kind == 1) {
      result.dag = apply_edge(result.dag, best_u, best_v, false);
      locals[best_v] = local(best_v, result.dag.parents[best_v]);
    } else {
      result.dag = apply_edge(apply_edge(result.dag, best_u, best_v, false), best_v, best_u, true);
      locals[best_v] = local(best_v, result.dag.parents[best_v]);
      locals[best_u] = local(best_u, result.dag.parents[best_u]);
    }
    result.iterations = iter + 1;
  }
  result.local_scores = locals;
  result.score = 0.0;
  for (double v : locals) result.score += v;
  result.cache_hits = cache.hits();
  result.cache_misses = cache.misses();
  return result;
}

}  // namespace mdl
