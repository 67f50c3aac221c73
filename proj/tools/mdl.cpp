#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mdl/bnscore.hpp"
#include "mdl/complexity.hpp"
#include "mdl/csv.hpp"
#include "mdl/errors.hpp"
#include "mdl/models.hpp"
#include "mdl/safetest.hpp"
#include "mdl/selection.hpp"
#include "mdl/switchdist.hpp"
#include "mdl/universal.hpp"

using nlohmann::json;

namespace {

constexpr std::uint64_t kDefaultSeed = 1729;
constexpr double kLn2 = 0.6931471805599453;

struct GlobalOpts {
  std::uint64_t seed = kDefaultSeed;
  std::string format = "json";
  std::string output;
  bool bits = false;
  int threads = 1;

  double len(double nats) const {
    double v = bits ? nats / kLn2 : nats;
    return v == 0.0 ? 0.0 : v;
  }
  std::string key(const std::string& stem) const {
    return stem + (bits ? "_bits" : "_nats");
  }
};

// JSON has no inf/nan literals; the raw ML plug-in really does incur an
// infinite loss on an unseen symbol, so spell these out as strings.
json jnum(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string num_str(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return json(v).dump();
}

void flatten(const json& j, const std::string& path,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& item : j.items()) {
      flatten(item.value(), path.empty() ? item.key() : path + "." + item.key(), out);
    }
  } else if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& v : j) flatten(v, path + "." + std::to_string(i++), out);
  } else if (j.is_string()) {
    out.emplace_back(path, j.get<std::string>());
  } else {
    out.emplace_back(path, j.dump());
  }
}

void emit(const GlobalOpts& g, const json& doc) {
  std::string text;
  if (g.format == "tsv") {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(doc, "", rows);
    std::ostringstream os;
    for (const auto& [k, v] : rows) os << k << '\t' << v << '\n';
    text = os.str();
  } else {
    text = doc.dump(2) + "\n";
  }
  if (g.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(g.output);
    if (!out) throw mdl::InvalidInput("cannot write '" + g.output + "'");
    out << text;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

struct LoadedColumn {
  mdl::DataSequence data = mdl::DataSequence::bits("");
  std::vector<std::string> levels;
};

LoadedColumn load_categorical(const std::string& path, const std::string& column,
                              int arity_override) {
  mdl::CsvTable table = mdl::CsvTable::read_file(path);
  mdl::CategoricalColumn col = mdl::categorical_column(table, table.column_index(column));
  if (col.values.empty()) throw mdl::InvalidInput("column '" + column + "' has no rows");
  int arity = static_cast<int>(col.levels.size());
  if (arity_override > 0) {
    if (arity_override < arity) {
      throw mdl::InvalidInput("--arity below the number of observed levels");
    }
    arity = arity_override;
  }
  LoadedColumn out;
  out.data = mdl::DataSequence::categorical(col.values, arity);
  out.levels = std::move(col.levels);
  return out;
}

mdl::ParamVector uniform_point(int arity) {
  mdl::ParamVector p;
  if (arity == 2) {
    p.values = {0.5};
  } else {
    p.values.assign(arity, 1.0 / arity);
  }
  p.dimension = 0;
  return p;
}

mdl::ModelFamily base_categorical(int arity) {
  return arity == 2 ? mdl::ModelFamily::bernoulli() : mdl::ModelFamily::multinomial(arity);
}

json selection_doc(const GlobalOpts& g, const mdl::SelectionResult& res) {
  json rows = json::array();
  for (const auto& row : res.rows) {
    rows.push_back({{"label", row.label},
                    {g.key("codelength"), jnum(g.len(row.codelength_nats))},
                    {"rank", row.rank}});
  }
  return json{{"candidates", rows}, {"winner", res.winner}, {"tie_break", res.tie_break}};
}

// ---------------------------------------------------------------- complexity

struct ComplexityOpts {
  std::int64_t n = 0;
  int r = 2;
  std::string method = "exact";
};

void run_complexity(const GlobalOpts& g, const ComplexityOpts& o) {
  mdl::ComplexityValue value{};
  if (o.method == "szpankowski") {
    value = mdl::comp_multinomial_szpankowski(o.n, o.r);
  } else if (o.method == "asymptotic") {
    value = mdl::comp_asymptotic(o.r - 1, o.n, mdl::jeffreys_integral_multinomial(o.r));
  } else {
    value = mdl::comp_multinomial_exact(o.n, o.r);
  }
  json doc{{"subcommand", "complexity"},
           {"n", o.n},
           {"r", o.r},
           {"method", mdl::comp_method_name(value.method)},
           {g.key("comp"), jnum(g.len(value.nats))}};
  emit(g, doc);
}

// -------------------------------------------------------------------- select

struct SelectOpts {
  std::string input;
  std::string column;
  std::string families = "auto";
  std::string dist = "bayes";
  int arity = 0;
};

mdl::ModelFamily family_from_token(const std::string& token, int arity) {
  if (token == "bernoulli") {
    if (arity != 2) throw mdl::InvalidInput("bernoulli needs a binary column");
    return mdl::ModelFamily::bernoulli();
  }
  if (token == "multinomial") return mdl::ModelFamily::multinomial(arity);
  if (token.rfind("markov:", 0) == 0) {
    int order = 0;
    try {
      order = std::stoi(token.substr(7));
    } catch (const std::exception&) {
      throw mdl::InvalidInput("bad family token '" + token + "'");
    }
    return mdl::ModelFamily::markov_chain(order, arity);
  }
  throw mdl::InvalidInput("unknown family '" + token + "' (use bernoulli, multinomial, markov:K)");
}

void run_select(const GlobalOpts& g, const SelectOpts& o) {
  LoadedColumn col = load_categorical(o.input, o.column, o.arity);
  int arity = col.data.arity();

  std::vector<std::string> tokens;
  if (o.families == "auto") {
    tokens = {arity == 2 ? "bernoulli" : "multinomial", "markov:1", "markov:2"};
  } else {
    tokens = split_list(o.families);
  }
  if (tokens.empty()) throw mdl::InvalidInput("no candidate families given");

  std::vector<mdl::Candidate> candidates;
  double prior = std::log(static_cast<double>(tokens.size()));
  for (const auto& token : tokens) {
    mdl::ModelFamily family = family_from_token(token, arity);
    mdl::UniversalDistribution dist =
        o.dist == "nml" ? mdl::make_nml(family)
                        : mdl::make_bayes(family, mdl::PriorSpec::jeffreys(family));
    candidates.emplace_back(family.label(), std::move(dist), prior);
  }
  mdl::SelectionResult res = mdl::select(candidates, col.data);

  json doc = selection_doc(g, res);
  doc["subcommand"] = "select";
  doc["input"] = o.input;
  doc["column"] = o.column;
  doc["column_levels"] = col.levels;
  doc["dist"] = o.dist;
  emit(g, doc);
}

// -------------------------------------------------------------------- varsel

struct VarselOpts {
  std::string input;
  std::string response;
  std::string covariates;
  double sigma2 = 1.0;
  double scale = 1.0;
  std::string strategy = "auto";
};

std::string subset_label(const std::vector<int>& subset, const std::vector<std::string>& names) {
  std::string label = "{";
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (j) label += ",";
    label += names[subset[j]];
  }
  return label + "}";
}

void run_varsel(const GlobalOpts& g, const VarselOpts& o) {
  mdl::CsvTable table = mdl::CsvTable::read_file(o.input);
  std::vector<std::string> names;
  if (o.covariates.empty()) {
    for (const auto& name : table.header) {
      if (name != o.response) names.push_back(name);
    }
  } else {
    names = split_list(o.covariates);
  }
  if (names.empty()) throw mdl::InvalidInput("no covariate columns");

  std::vector<double> y = mdl::real_column(table, table.column_index(o.response));
  Eigen::MatrixXd x(y.size(), names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::vector<double> column = mdl::real_column(table, table.column_index(names[j]));
    for (std::size_t i = 0; i < y.size(); ++i) x(i, j) = column[i];
  }

  mdl::VarSelConfig config;
  config.sigma2 = o.sigma2;
  config.luckiness_scale = o.scale;
  if (o.strategy == "exhaustive") config.strategy = mdl::VarSelConfig::Strategy::Exhaustive;
  if (o.strategy == "greedy") config.strategy = mdl::VarSelConfig::Strategy::Greedy;
  mdl::VarSelResult res =
      mdl::variable_select(x, Eigen::Map<const Eigen::VectorXd>(y.data(), y.size()), config);

  // Rank the evaluated subsets the same way select ranks candidates: by
  // length, near-ties toward the smaller subset, then the label.
  std::vector<std::size_t> order(res.trace.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double da = res.trace[a].second, db = res.trace[b].second;
    if (std::abs(da - db) > 1e-12) return da < db;
    if (res.trace[a].first.size() != res.trace[b].first.size()) {
      return res.trace[a].first.size() < res.trace[b].first.size();
    }
    return subset_label(res.trace[a].first, names) < subset_label(res.trace[b].first, names);
  });

  json rows = json::array();
  std::vector<int> ranks(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& [subset, nats] = res.trace[order[pos]];
    rows.push_back({{"label", subset_label(subset, names)},
                    {g.key("codelength"), jnum(g.len(nats))},
                    {"rank", static_cast<int>(pos) + 1}});
  }
  std::string tie_break = "none";
  if (order.size() > 1 &&
      std::abs(res.trace[order[0]].second - res.trace[order[1]].second) <= 1e-12) {
    tie_break = res.trace[order[0]].first.size() != res.trace[order[1]].first.size()
                    ? "dimension"
                    : "label";
  }

  std::vector<std::string> selected;
  for (int j : res.selected) selected.push_back(names[j]);
  json doc{{"subcommand", "varsel"},
           {"input", o.input},
           {"response", o.response},
           {"covariates", names},
           {"strategy", res.strategy},
           {"candidates", rows},
           {"winner", subset_label(res.selected, names)},
           {"tie_break", tie_break},
           {"selected", selected},
           {g.key("codelength"), jnum(g.len(res.codelength_nats))}};
  emit(g, doc);
}

// -------------------------------------------------------------------- markov

struct MarkovOpts {
  std::string input;
  std::string column;
  int max_order = 3;
  int arity = 0;
};

void run_markov(const GlobalOpts& g, const MarkovOpts& o) {
  LoadedColumn col = load_categorical(o.input, o.column, o.arity);
  mdl::SelectionResult res = mdl::markov_order_select(col.data, o.max_order);
  json doc = selection_doc(g, res);
  doc["subcommand"] = "markov";
  doc["input"] = o.input;
  doc["column"] = o.column;
  doc["column_levels"] = col.levels;
  emit(g, doc);
}

// ------------------------------------------------------------------------ bn

struct BnOpts {
  std::string input;
  std::string score = "fnml";
  double alpha = 1.0;
  int max_parents = 4;
  int max_iters = 1000;
};

void run_bn(const GlobalOpts& g, const BnOpts& o) {
  mdl::CsvTable table = mdl::CsvTable::read_file(o.input);
  std::vector<std::string> names = table.header;
  std::vector<int> arities;
  std::vector<std::vector<int>> columns;
  for (std::size_t j = 0; j < names.size(); ++j) {
    mdl::CategoricalColumn col = mdl::categorical_column(table, static_cast<int>(j));
    arities.push_back(static_cast<int>(col.levels.size()));
    columns.push_back(std::move(col.values));
  }
  mdl::CategoricalDataset data =
      mdl::CategoricalDataset::of(names, std::move(arities), std::move(columns));

  mdl::HillClimbOptions options;
  options.kind = mdl::bn_score_kind_from_name(o.score);
  options.alpha = o.alpha;
  options.max_parents = o.max_parents;
  options.max_iterations = o.max_iters;
  options.seed = g.seed;
  mdl::HillClimbResult res = mdl::hill_climb(data, options);

  json network = json::object();
  json locals = json::object();
  for (int v = 0; v < res.dag.node_count(); ++v) {
    json parents = json::array();
    for (int p : res.dag.parents[v]) parents.push_back(names[p]);
    network[names[v]] = parents;
    locals[names[v]] = jnum(g.len(res.local_scores[v]));
  }
  json doc{{"subcommand", "bn"},
           {"score", mdl::bn_score_kind_name(options.kind)},
           {"network", network},
           {"local_scores", locals},
           {g.key("score"), jnum(g.len(res.score))},
           {"iterations", res.iterations},
           {"cache", {{"hits", res.cache_hits}, {"misses", res.cache_misses}}}};
  if (options.kind == mdl::BnScoreKind::Bdeu) doc["alpha"] = o.alpha;
  emit(g, doc);
}

// ---------------------------------------------------------------------- preq

struct PreqOpts {
  std::string input;
  std::string column;
  std::string predictors = "jeffreys,ml";
  int arity = 0;
  double sigma2 = 1.0;
  double tau2 = 1.0;
  int startup = 1;
};

struct Predictor {
  std::string label;
  mdl::UniversalDistribution dist;
};

void add_categorical_predictor(std::vector<Predictor>& out, const std::string& token,
                               int arity, const PreqOpts&) {
  mdl::ModelFamily base = base_categorical(arity);
  auto add = [&out](const std::string& label, mdl::UniversalDistribution dist) {
    for (const auto& p : out) {
      if (p.label == label) return;
    }
    out.push_back({label, std::move(dist)});
  };
  if (token == "jeffreys") {
    add("jeffreys", mdl::make_bayes(base, mdl::PriorSpec::jeffreys(base)));
  } else if (token == "laplace") {
    add("laplace", mdl::make_bayes(base, mdl::PriorSpec::symmetric_dirichlet(arity, 1.0)));
  } else if (token == "kt") {
    add("kt", mdl::make_preq_plugin(base, mdl::PlugInEstimator::smoothed_ml(0.5)));
  } else if (token == "ml") {
    add("ml", mdl::make_preq_plugin(base, mdl::PlugInEstimator::ml()));
  } else if (token == "nml") {
    add("nml", mdl::make_nml(base));
  } else if (token == "switch") {
    mdl::UniversalDistribution u0 =
        mdl::make_nml(mdl::ModelFamily::singleton(base, uniform_point(arity)));
    mdl::UniversalDistribution u1 = mdl::make_bayes(base, mdl::PriorSpec::jeffreys(base));
    add("uniform", u0);
    add("jeffreys", u1);
    mdl::SwitchSpec spec(u0, u1);
    add("switch", mdl::make_switch(spec));
  } else {
    throw mdl::InvalidInput("unknown categorical predictor '" + token + "'");
  }
}

void add_real_predictor(std::vector<Predictor>& out, const std::string& token,
                        const PreqOpts& o) {
  mdl::ModelFamily base = mdl::ModelFamily::gaussian_location(o.sigma2);
  if (token == "gaussian") {
    out.push_back({"gaussian", mdl::make_bayes(base, mdl::PriorSpec::normal(0.0, o.tau2))});
  } else if (token == "gaussian-ml") {
    out.push_back({"gaussian-ml", mdl::make_preq_plugin(base, mdl::PlugInEstimator::ml())});
  } else if (token == "startup") {
    out.push_back({"startup", mdl::make_bayes_conditional(base, o.startup)});
  } else {
    throw mdl::InvalidInput("unknown real predictor '" + token + "'");
  }
}

bool real_tokens(const std::vector<std::string>& tokens) {
  bool real = false, cat = false;
  for (const auto& t : tokens) {
    if (t == "gaussian" || t == "gaussian-ml" || t == "startup") {
      real = true;
    } else {
      cat = true;
    }
  }
  if (real && cat) throw mdl::InvalidInput("cannot mix categorical and real predictors");
  return real;
}

void run_preq(const GlobalOpts& g, const PreqOpts& o) {
  if (g.output.empty()) {
    throw mdl::InvalidInput("preq writes the regret curve to --output; pass a path");
  }
  std::vector<std::string> tokens = split_list(o.predictors);
  if (tokens.empty()) throw mdl::InvalidInput("no predictors given");
  bool real = real_tokens(tokens);

  mdl::DataSequence data = mdl::DataSequence::bits("");
  std::vector<std::string> levels;
  mdl::ModelFamily hindsight = mdl::ModelFamily::bernoulli();
  std::vector<Predictor> predictors;
  if (real) {
    mdl::CsvTable table = mdl::CsvTable::read_file(o.input);
    std::vector<double> values = mdl::real_column(table, table.column_index(o.column));
    if (values.empty()) throw mdl::InvalidInput("column '" + o.column + "' has no rows");
    data = mdl::DataSequence::real(values);
    hindsight = mdl::ModelFamily::gaussian_location(o.sigma2);
    for (const auto& t : tokens) add_real_predictor(predictors, t, o);
  } else {
    LoadedColumn col = load_categorical(o.input, o.column, o.arity);
    data = col.data;
    levels = col.levels;
    hindsight = base_categorical(data.arity());
    for (const auto& t : tokens) add_categorical_predictor(predictors, t, data.arity(), o);
  }

  std::size_t n = data.size();
  std::vector<std::vector<double>> cum(predictors.size(), std::vector<double>(n, 0.0));
  for (std::size_t p = 0; p < predictors.size(); ++p) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total -= predictors[p].dist.log_predictive(data, i);
      cum[p][i] = total;
    }
  }
  std::vector<double> hind(n, 0.0);
  mdl::SufficientStats stats = mdl::SufficientStats::of(hindsight, data.prefix(0));
  for (std::size_t i = 0; i < n; ++i) {
    stats.add(hindsight, data, i);
    hind[i] = -mdl::log_likelihood(hindsight, mdl::mle(hindsight, stats), stats);
  }

  std::ofstream curve(g.output);
  if (!curve) throw mdl::InvalidInput("cannot write '" + g.output + "'");
  curve << "step";
  for (const auto& p : predictors) curve << "," << p.label << "_" << (g.bits ? "bits" : "nats");
  curve << ",hindsight_" << (g.bits ? "bits" : "nats") << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    curve << (i + 1);
    for (std::size_t p = 0; p < predictors.size(); ++p) curve << "," << num_str(g.len(cum[p][i]));
    curve << "," << num_str(g.len(hind[i])) << "\n";
  }
  curve.close();

  json rows = json::array();
  for (std::size_t p = 0; p < predictors.size(); ++p) {
    rows.push_back({{"label", predictors[p].label},
                    {g.key("total"), jnum(g.len(cum[p][n - 1]))},
                    {g.key("regret"), jnum(g.len(cum[p][n - 1] - hind[n - 1]))}});
  }
  json doc{{"subcommand", "preq"},
           {"input", o.input},
           {"column", o.column},
           {"n", n},
           {"curve", g.output},
           {"predictors", rows}};
  if (!levels.empty()) doc["column_levels"] = levels;
  GlobalOpts to_stdout = g;
  to_stdout.output.clear();
  emit(to_stdout, doc);
}

// ---------------------------------------------------------------------- test

struct TestOpts {
  std::string null_spec = "bernoulli:0.5";
  std::string alt = "jeffreys";
  double alpha = 0.05;
  std::vector<std::string> data_files;
  std::string column;
  std::string mode = "restart";
  std::int64_t simulate = 0;
  int n = 100;
};

mdl::UniversalDistribution parse_null(const std::string& spec, double* theta) {
  if (spec.rfind("bernoulli:", 0) != 0) {
    throw mdl::InvalidInput("--null must look like bernoulli:0.5");
  }
  double p = 0.0;
  try {
    p = std::stod(spec.substr(10));
  } catch (const std::exception&) {
    throw mdl::InvalidInput("bad null parameter in '" + spec + "'");
  }
  if (!(p > 0.0 && p < 1.0)) throw mdl::InvalidInput("null parameter must be inside (0,1)");
  *theta = p;
  mdl::ParamVector point;
  point.values = {p};
  point.dimension = 0;
  return mdl::make_nml(mdl::ModelFamily::singleton(mdl::ModelFamily::bernoulli(), point));
}

mdl::DataSequence load_bits(const std::string& path, const std::string& column) {
  mdl::CsvTable table = mdl::CsvTable::read_file(path);
  int j = column.empty() ? 0 : table.column_index(column);
  std::vector<int> values;
  for (const auto& row : table.rows) {
    const std::string& cell = row[j];
    if (cell == "0") {
      values.push_back(0);
    } else if (cell == "1") {
      values.push_back(1);
    } else {
      throw mdl::InvalidInput("test data must be 0/1, got '" + cell + "' in " + path);
    }
  }
  if (values.empty()) throw mdl::InvalidInput("no rows in " + path);
  return mdl::DataSequence::categorical(values, 2);
}

void run_test(const GlobalOpts& g, const TestOpts& o) {
  double theta = 0.5;
  mdl::UniversalDistribution null_dist = parse_null(o.null_spec, &theta);
  mdl::UniversalDistribution alt =
      o.alt == "nml" ? mdl::make_nml(mdl::ModelFamily::bernoulli())
                     : mdl::make_bayes(mdl::ModelFamily::bernoulli(),
                                       mdl::PriorSpec::beta(0.5, 0.5));
  if (o.alt != "nml" && o.alt != "jeffreys") {
    throw mdl::InvalidInput("--alt must be jeffreys or nml");
  }

  json doc{{"subcommand", "test"},
           {"null", o.null_spec},
           {"alt", o.alt},
           {"alpha", o.alpha}};

  if (o.simulate > 0) {
    if (!o.data_files.empty()) {
      throw mdl::InvalidInput("pass either --data or --simulate, not both");
    }
    mdl::Type1Result res =
        mdl::type1_simulate(null_dist, alt, o.n, o.simulate, o.alpha, g.seed, g.threads);
    doc["n"] = o.n;
    doc["seed"] = g.seed;
    doc["simulate"] = {{"trials", res.trials},
                       {"rejections", res.rejections},
                       {"rate", res.rate},
                       {"bound", res.bound},
                       {"within_bound", res.within_bound}};
    emit(g, doc);
    return;
  }
  if (o.data_files.empty()) {
    throw mdl::InvalidInput("test needs --data files or --simulate trials");
  }

  std::vector<mdl::DataSequence> batches;
  for (const auto& path : o.data_files) batches.push_back(load_bits(path, o.column));

  std::vector<mdl::EvidenceReport> reports;
  json batch_rows = json::array();
  if (o.mode == "condition" && batches.size() > 1) {
    // The alternative keeps conditioning on earlier batches, so the
    // combined evidence is the single-run evidence on the concatenation.
    std::vector<int> all;
    double prev = 0.0;
    for (const auto& batch : batches) {
      double p0 = mdl::log_likelihood(null_dist.family(), mdl::ParamVector{}, batch);
      for (std::size_t i = 0; i < batch.size(); ++i) all.push_back(batch.cat(i));
      mdl::DataSequence concat = mdl::DataSequence::categorical(all, 2);
      double joint = alt.log_joint(concat);
      mdl::EvidenceReport r;
      r.d_nats = p0 - (joint - prev);
      r.ratio = std::exp(r.d_nats);
      r.p_conservative = std::min(1.0, r.ratio);
      r.alpha = o.alpha;
      r.reject = r.ratio <= o.alpha;
      reports.push_back(r);
      prev = joint;
    }
  } else {
    if (o.mode != "restart" && o.mode != "condition") {
      throw mdl::InvalidInput("--mode must be restart or condition");
    }
    for (const auto& batch : batches) {
      reports.push_back(mdl::evidence(null_dist, alt, batch, o.alpha));
    }
  }
  for (std::size_t b = 0; b < reports.size(); ++b) {
    batch_rows.push_back({{"n", batches[b].size()},
                          {g.key("D"), jnum(g.len(reports[b].d_nats))},
                          {"ratio", jnum(reports[b].ratio)}});
  }
  mdl::EvidenceReport combined = mdl::combine(reports, o.alpha);
  doc["mode"] = o.mode;
  doc["batches"] = batch_rows;
  doc[g.key("D")] = jnum(g.len(combined.d_nats));
  doc["ratio"] = jnum(combined.ratio);
  doc["p_conservative"] = combined.p_conservative;
  doc["decision"] = combined.reject ? "reject" : "retain";
  emit(g, doc);
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;
  CLI::App app{"MDL model selection toolkit"};
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "random seed (fixed default keeps runs reproducible)");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"json", "tsv"}))
      ->capture_default_str();
  app.add_option("--output", g.output, "write output to this path instead of stdout");
  app.add_flag("--bits", g.bits, "report code lengths in bits instead of nats");
  app.add_option("--threads", g.threads, "worker threads for simulation")
      ->check(CLI::PositiveNumber);

  ComplexityOpts comp;
  CLI::App* sub_comp = app.add_subcommand("complexity", "parametric complexity COMP(n, r)");
  sub_comp->add_option("--n", comp.n, "sample size")->required()->check(CLI::NonNegativeNumber);
  sub_comp->add_option("--r", comp.r, "alphabet size")->required()->check(CLI::PositiveNumber);
  sub_comp->add_option("--method", comp.method, "evaluation method")
      ->check(CLI::IsMember({"exact", "recurrence", "szpankowski", "asymptotic"}))
      ->capture_default_str();

  SelectOpts sel;
  CLI::App* sub_sel = app.add_subcommand("select", "model selection over a categorical column");
  sub_sel->add_option("--input", sel.input, "CSV file")->required();
  sub_sel->add_option("--column", sel.column, "column name")->required();
  sub_sel->add_option("--families", sel.families,
                      "comma list of bernoulli, multinomial, markov:K")
      ->capture_default_str();
  sub_sel->add_option("--dist", sel.dist, "universal distribution per candidate")
      ->check(CLI::IsMember({"bayes", "nml"}))
      ->capture_default_str();
  sub_sel->add_option("--arity", sel.arity, "alphabet size override");

  VarselOpts var;
  CLI::App* sub_var = app.add_subcommand("varsel", "regression subset selection");
  sub_var->add_option("--input", var.input, "CSV file")->required();
  sub_var->add_option("--response", var.response, "response column")->required();
  sub_var->add_option("--covariates", var.covariates,
                      "comma list of covariate columns (default: all others)");
  sub_var->add_option("--sigma2", var.sigma2, "noise variance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_var->add_option("--scale", var.scale, "luckiness scale on coefficients")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_var->add_option("--strategy", var.strategy, "search strategy")
      ->check(CLI::IsMember({"auto", "exhaustive", "greedy"}))
      ->capture_default_str();

  MarkovOpts mark;
  CLI::App* sub_mark = app.add_subcommand("markov", "Markov order selection");
  sub_mark->add_option("--input", mark.input, "CSV file")->required();
  sub_mark->add_option("--column", mark.column, "column name")->required();
  sub_mark->add_option("--max-order", mark.max_order, "largest order to consider")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub_mark->add_option("--arity", mark.arity, "alphabet size override");

  BnOpts bn;
  CLI::App* sub_bn = app.add_subcommand("bn", "Bayesian network structure search");
  sub_bn->add_option("--input", bn.input, "CSV file, one column per variable")->required();
  sub_bn->add_option("--score", bn.score, "local score")
      ->check(CLI::IsMember({"fnml", "qnml", "bdeu"}))
      ->capture_default_str();
  sub_bn->add_option("--alpha", bn.alpha, "BDeu equivalent sample size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_bn->add_option("--max-parents", bn.max_parents, "parent set size cap")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub_bn->add_option("--max-iters", bn.max_iters, "hill-climb move cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  PreqOpts preq;
  CLI::App* sub_preq = app.add_subcommand("preq", "prequential regret curves (CSV to --output)");
  sub_preq->add_option("--input", preq.input, "CSV file")->required();
  sub_preq->add_option("--column", preq.column, "column name")->required();
  sub_preq->add_option("--predictors", preq.predictors,
                       "comma list of jeffreys, laplace, kt, ml, nml, switch, gaussian, "
                       "gaussian-ml, startup")
      ->capture_default_str();
  sub_preq->add_option("--arity", preq.arity, "alphabet size override");
  sub_preq->add_option("--sigma2", preq.sigma2, "gaussian noise variance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_preq->add_option("--tau2", preq.tau2, "gaussian prior variance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub_preq->add_option("--startup", preq.startup, "free outcomes for the conditional code")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  TestOpts test;
  CLI::App* sub_test = app.add_subcommand("test", "safe hypothesis test");
  sub_test->add_option("--null", test.null_spec, "point null, bernoulli:p")
      ->capture_default_str();
  sub_test->add_option("--alt", test.alt, "alternative universal distribution")
      ->check(CLI::IsMember({"jeffreys", "nml"}))
      ->capture_default_str();
  sub_test->add_option("--alpha", test.alpha, "significance level")
      ->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  sub_test->add_option("--data", test.data_files, "CSV batch of 0/1 outcomes (repeatable)");
  sub_test->add_option("--column", test.column, "column name (default: first column)");
  sub_test->add_option("--mode", test.mode, "multi-batch handling")
      ->check(CLI::IsMember({"restart", "condition"}))
      ->capture_default_str();
  sub_test->add_option("--simulate", test.simulate, "Type-I error trials under the null")
      ->check(CLI::NonNegativeNumber);
  sub_test->add_option("--n", test.n, "sequence length per simulated trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  }

  try {
    if (*sub_comp) run_complexity(g, comp);
    if (*sub_sel) run_select(g, sel);
    if (*sub_var) run_varsel(g, var);
    if (*sub_mark) run_markov(g, mark);
    if (*sub_bn) run_bn(g, bn);
    if (*sub_preq) run_preq(g, preq);
    if (*sub_test) run_test(g, test);
  } catch (const mdl::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
