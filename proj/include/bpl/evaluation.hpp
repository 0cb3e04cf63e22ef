#pragma once

// Cross-validated feature-set evaluation, the single-agent ablation, the
// depth-stratified error table and the disagreement/ambiguity correlation.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "bpl/logistic.hpp"
#include "bpl/metrics.hpp"
#include "bpl/pipeline.hpp"

namespace bpl {

// ---------------------------------------------------------------------------
// Cross-validation

struct FoldMetrics {
  int fold = 0;
  std::size_t n_test = 0;
  double auc = 0.0;
  double f1 = 0.0;
  std::optional<std::string> f1_warning;
  int iterations = 0;
  bool converged = false;
  std::vector<double> train_mean, train_sd;  // standardisation fitted on this fold's training rows
};

struct CvResult {
  std::string name;
  std::vector<std::string> columns;
  std::vector<FoldMetrics> folds;
  double auc_mean = 0.0, auc_sd = 0.0, f1_mean = 0.0, f1_sd = 0.0;
};

inline void summarise_folds(CvResult& r) {
  std::vector<double> auc, f1;
  for (const auto& f : r.folds) {
    auc.push_back(f.auc);
    f1.push_back(f.f1);
  }
  r.auc_mean = mean(auc);
  r.auc_sd = sample_sd(auc);
  r.f1_mean = mean(f1);
  r.f1_sd = sample_sd(f1);
}

inline CvResult cross_validate(const std::string& name, const Eigen::MatrixXd& x, const std::vector<int>& y,
                               const std::vector<std::string>& columns, std::uint64_t seed, int k_folds = 5,
                               const LogisticOptions& opt = {}) {
  if (static_cast<std::size_t>(x.cols()) != columns.size())
    throw ParameterError("feature set '" + name + "' has " + std::to_string(x.cols()) + " columns but " +
                         std::to_string(columns.size()) + " names");
  detail::check_matrix(x, columns);
  const auto fold = stratified_kfold(y, k_folds, seed);
  CvResult r;
  r.name = name;
  r.columns = columns;
  for (int f = 0; f < k_folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
    Eigen::MatrixXd xtr(static_cast<Eigen::Index>(train.size()), x.cols());
    Eigen::MatrixXd xte(static_cast<Eigen::Index>(test.size()), x.cols());
    std::vector<int> ytr, yte;
    for (std::size_t i = 0; i < train.size(); ++i) {
      xtr.row(static_cast<Eigen::Index>(i)) = x.row(train[i]);
      ytr.push_back(y[static_cast<std::size_t>(train[i])]);
    }
    for (std::size_t i = 0; i < test.size(); ++i) {
      xte.row(static_cast<Eigen::Index>(i)) = x.row(test[i]);
      yte.push_back(y[static_cast<std::size_t>(test[i])]);
    }
    const auto scaler = Standardizer::fit(xtr);
    const auto model = fit_logistic(scaler.transform(xtr), ytr, opt, columns);
    const Eigen::VectorXd proba = model.predict_proba(scaler.transform(xte));
    const std::vector<double> scores(proba.data(), proba.data() + proba.size());
    FoldMetrics m;
    m.fold = f;
    m.n_test = test.size();
    m.auc = roc_auc(scores, yte);
    const auto f1 = f1_score(scores, yte, 0.5);
    m.f1 = f1.value;
    m.f1_warning = f1.warning;
    m.iterations = model.iterations;
    m.converged = model.converged;
    m.train_mean.assign(scaler.mean.data(), scaler.mean.data() + scaler.mean.size());
    m.train_sd.assign(scaler.sd.data(), scaler.sd.data() + scaler.sd.size());
    r.folds.push_back(m);
  }
  summarise_folds(r);
  return r;
}

// ---------------------------------------------------------------------------
// Feature sets

enum class FeatureSet { Susceptibility, Belief, BplFull, Surface, BplPlusSurface };

inline std::string to_string(FeatureSet s) {
  switch (s) {
    case FeatureSet::Susceptibility: return "BPL Susceptibility";
    case FeatureSet::Belief: return "BPL Belief";
    case FeatureSet::BplFull: return "BPL Full";
    case FeatureSet::Surface: return "Surface";
    case FeatureSet::BplPlusSurface: return "BPL + Surface";
  }
  return "";
}

inline std::vector<FeatureSet> all_feature_sets() {
  return {FeatureSet::Susceptibility, FeatureSet::Belief, FeatureSet::BplFull, FeatureSet::Surface,
          FeatureSet::BplPlusSurface};
}

// Share of a speaker's recorded verdicts that are false, barely-true or
// pants-fire; 0 without history.
inline double historical_false_rate(const Claim& c) {
  if (!c.history || c.history->total() == 0) return 0.0;
  return static_cast<double>(c.history->false_group()) / static_cast<double>(c.history->total());
}

inline std::vector<std::string> surface_columns(DatasetKind kind, bool with_source_column = true) {
  std::vector<std::string> c = {"token_count", "valence", "marker_count"};
  if (with_source_column) c.push_back(kind == DatasetKind::Liar ? "historical_false_rate" : "domain_credibility");
  return c;
}

inline Eigen::MatrixXd surface_matrix(const PreparedCorpus& p, bool with_source_column = true) {
  const Eigen::Index cols = with_source_column ? 4 : 3;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(p.claims.size()), cols);
  for (std::size_t i = 0; i < p.claims.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto& c = p.claims[i];
    const auto& f = p.features[i];
    x(r, 0) = static_cast<double>(text::word_count(c.text));
    x(r, 1) = f.valence;
    x(r, 2) = static_cast<double>(f.marker_count);
    if (with_source_column) x(r, 3) = c.dataset == DatasetKind::Liar ? historical_false_rate(c) : f.credibility;
  }
  return x;
}

inline DatasetKind corpus_kind(const PreparedCorpus& p) {
  return p.claims.empty() ? DatasetKind::Liar : p.claims.front().dataset;
}

inline std::vector<std::string> feature_set_columns(FeatureSet s, DatasetKind kind) {
  switch (s) {
    case FeatureSet::Susceptibility: return {"susceptibility"};
    case FeatureSet::Belief: return {"belief"};
    case FeatureSet::BplFull: return PopulationSummary::names();
    case FeatureSet::Surface: return surface_columns(kind);
    case FeatureSet::BplPlusSurface: {
      auto c = PopulationSummary::names();
      for (auto& s2 : surface_columns(kind)) c.push_back(s2);
      return c;
    }
  }
  return {};
}

inline Eigen::MatrixXd feature_set_matrix(FeatureSet s, const PreparedCorpus& p, const PopulationRun& run) {
  const auto n = static_cast<Eigen::Index>(p.claims.size());
  if (run.results.size() != p.claims.size()) throw ParameterError("population run does not cover the corpus");
  const bool needs_population = s == FeatureSet::BplFull || s == FeatureSet::BplPlusSurface;
  if (needs_population && run.summaries.size() != p.claims.size())
    throw ParameterError("population statistics are missing for feature set " + to_string(s));
  if ((s == FeatureSet::Belief || s == FeatureSet::Susceptibility) && run.agents.size() <= kFullAgentIndex)
    throw ParameterError("population run lacks the reference agent");
  Eigen::MatrixXd x;
  switch (s) {
    case FeatureSet::Susceptibility:
    case FeatureSet::Belief:
      x.resize(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = run.results[static_cast<std::size_t>(i)][kFullAgentIndex];
        x(i, 0) = s == FeatureSet::Belief ? r.belief : r.susceptibility;
      }
      return x;
    case FeatureSet::BplFull:
    case FeatureSet::BplPlusSurface: {
      const Eigen::MatrixXd surf = s == FeatureSet::BplPlusSurface ? surface_matrix(p) : Eigen::MatrixXd(n, 0);
      x.resize(n, 9 + surf.cols());
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto v = run.summaries[static_cast<std::size_t>(i)].values();
        for (Eigen::Index j = 0; j < 9; ++j) x(i, j) = v[static_cast<std::size_t>(j)];
        for (Eigen::Index j = 0; j < surf.cols(); ++j) x(i, 9 + j) = surf(i, j);
      }
      return x;
    }
    case FeatureSet::Surface: return surface_matrix(p);
  }
  return x;
}

inline std::vector<int> targets(const PreparedCorpus& p) {
  std::vector<int> y;
  y.reserve(p.claims.size());
  for (const auto& c : p.claims) y.push_back(c.target());
  return y;
}

inline CvResult run_feature_eval(const PreparedCorpus& p, const PopulationRun& run, FeatureSet s, std::uint64_t seed,
                                 int k_folds = 5, const LogisticOptions& opt = {}) {
  return cross_validate(to_string(s), feature_set_matrix(s, p, run), targets(p), feature_set_columns(s, corpus_kind(p)),
                        seed, k_folds, opt);
}

// ---------------------------------------------------------------------------
// Ablation

struct AblationConfig {
  std::string name;
  int k;
  double beta;
  std::size_t sample_size;
};

inline std::vector<AblationConfig> ablation_configs() {
  return {{"BPL Full", 1, 1.0, 25},        {"No Depth", 2, 1.0, 25},    {"No Compression", 1, 100.0, 25},
          {"No Availability", 1, 1.0, 1000}, {"RSA Literal", 0, 100.0, 1000}, {"Max Bounded", 0, 0.1, 3}};
}

struct AblationRow {
  AblationConfig config;
  double r = 0.0;
  double delta_r = 0.0;
  std::vector<double> beliefs;
};

// Pearson r between one agent's beliefs and the binary target per
// configuration. All configurations share per-claim seeds.
inline std::vector<AblationRow> run_ablation(const PreparedCorpus& p, const RunOptions& opt,
                                             const AgentProfile& base = {}) {
  const auto y = targets(p);
  const std::vector<double> yd(y.begin(), y.end());
  std::vector<AblationRow> rows;
  for (const auto& cfg : ablation_configs()) {
    AgentProfile a = base;
    a.k = cfg.k;
    a.beta = cfg.beta;
    a.sample_size = cfg.sample_size;
    AblationRow row;
    row.config = cfg;
    for (const auto& r : run_agent(p, a, 0, opt)) row.beliefs.push_back(r.belief);
    row.r = pearson_r(row.beliefs, yd);
    rows.push_back(std::move(row));
  }
  for (auto& row : rows) row.delta_r = row.r - rows.front().r;
  return rows;
}

// ---------------------------------------------------------------------------
// Depth-stratified error

struct DepthAgentRow {
  int k = 0;
  std::size_t n_depth0 = 0, n_depth1 = 0;
  std::optional<double> err_depth0, err_depth1;
  std::optional<double> cohens_d;  // depth-1 errors against depth-0 errors
  std::optional<MannWhitneyResult> mann_whitney;
  std::vector<std::string> notes;
};

struct DepthReport {
  std::vector<DepthAgentRow> agents;
  std::size_t excluded_deeper = 0;  // claims at depth 2, outside both strata
};

inline DepthReport depth_stratified_eval(const PreparedCorpus& p, const RunOptions& opt, const AgentProfile& base = {}) {
  const auto y = targets(p);
  DepthReport rep;
  for (const auto& f : p.features)
    if (f.depth >= 2) ++rep.excluded_deeper;
  for (int k = 0; k <= 2; ++k) {
    AgentProfile a = base;
    a.k = k;
    a.beta = 1.0;
    a.sample_size = 25;
    const auto results = run_agent(p, a, static_cast<std::size_t>(k), opt);
    std::vector<double> e0, e1;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const double err = std::abs(results[i].belief - static_cast<double>(y[i]));
      if (p.features[i].depth == 0) e0.push_back(err);
      if (p.features[i].depth == 1) e1.push_back(err);
    }
    DepthAgentRow row;
    row.k = k;
    row.n_depth0 = e0.size();
    row.n_depth1 = e1.size();
    if (!e0.empty()) row.err_depth0 = mean(e0);
    if (!e1.empty()) row.err_depth1 = mean(e1);
    if (e0.empty() || e1.empty()) {
      row.notes.push_back(std::string("empty stratum: depth ") + (e0.empty() ? "0" : "1") + "; statistics skipped");
    } else {
      try {
        row.cohens_d = cohens_d(e1, e0);
      } catch (const ParameterError& e) {
        row.notes.push_back(e.what());
      }
      row.mann_whitney = mann_whitney_u(e1, e0);
    }
    rep.agents.push_back(std::move(row));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Disagreement against the ambiguity proxy

struct CorrelationTest {
  double r = 0.0;
  double p_permutation = 1.0;  // one-sided, H1: r > 0
  std::size_t shuffles = 0;
  std::size_t n = 0;
};

inline CorrelationTest permutation_correlation(const std::vector<double>& x, std::vector<double> y,
                                               std::size_t shuffles, std::uint64_t seed) {
  CorrelationTest t;
  t.r = pearson_r(x, y);
  t.shuffles = shuffles;
  t.n = x.size();
  Rng rng(seed);
  std::size_t at_least = 0;
  for (std::size_t s = 0; s < shuffles; ++s) {
    rng.shuffle(y);
    if (pearson_r(x, y) >= t.r) ++at_least;
  }
  t.p_permutation = static_cast<double>(at_least + 1) / static_cast<double>(shuffles + 1);
  return t;
}

inline CorrelationTest disagreement_correlation(const PreparedCorpus& p, const PopulationRun& run,
                                                std::size_t shuffles = 1000, std::uint64_t seed = 0) {
  std::vector<double> delta, amb;
  for (std::size_t i = 0; i < p.claims.size(); ++i) {
    delta.push_back(run.summaries.at(i).disagreement);
    amb.push_back(p.claims[i].label.ambiguity);
  }
  return permutation_correlation(delta, amb, shuffles, seed);
}

// ---------------------------------------------------------------------------
// Serialization and text tables

inline void to_json(nlohmann::json& j, const CvResult& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    nlohmann::json fj = {{"fold", f.fold},           {"n_test", f.n_test},       {"auc", f.auc},
                         {"f1", f.f1},               {"iterations", f.iterations}, {"converged", f.converged}};
    if (f.f1_warning) fj["f1_warning"] = *f.f1_warning;
    folds.push_back(fj);
  }
  j = {{"name", r.name},         {"columns", r.columns}, {"auc_mean", r.auc_mean}, {"auc_sd", r.auc_sd},
       {"f1_mean", r.f1_mean},   {"f1_sd", r.f1_sd},     {"folds", folds}};
}

inline void to_json(nlohmann::json& j, const AblationRow& r) {
  j = {{"name", r.config.name}, {"k", r.config.k},   {"beta", r.config.beta},
       {"N", r.config.sample_size}, {"r", r.r},      {"delta_r", r.delta_r}};
}

inline void to_json(nlohmann::json& j, const DepthAgentRow& r) {
  j = {{"k", r.k}, {"n_depth0", r.n_depth0}, {"n_depth1", r.n_depth1}, {"notes", r.notes}};
  j["err_depth0"] = r.err_depth0 ? nlohmann::json(*r.err_depth0) : nlohmann::json(nullptr);
  j["err_depth1"] = r.err_depth1 ? nlohmann::json(*r.err_depth1) : nlohmann::json(nullptr);
  j["cohens_d"] = r.cohens_d ? nlohmann::json(*r.cohens_d) : nlohmann::json(nullptr);
  if (r.mann_whitney) {
    j["mann_whitney"] = {{"u", r.mann_whitney->u}, {"p", r.mann_whitney->p}, {"exact", r.mann_whitney->exact}};
  } else {
    j["mann_whitney"] = nullptr;
  }
}

inline void to_json(nlohmann::json& j, const DepthReport& r) {
  j = {{"agents", r.agents}, {"excluded_depth2", r.excluded_deeper}};
}

inline void to_json(nlohmann::json& j, const CorrelationTest& t) {
  j = {{"r", t.r}, {"p_permutation", t.p_permutation}, {"shuffles", t.shuffles}, {"n", t.n}};
}

namespace detail {
inline std::string fixed(double v, int prec = 3) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(prec) << v;
  return o.str();
}
inline std::string opt_fixed(const std::optional<double>& v, int prec = 3) { return v ? fixed(*v, prec) : "-"; }
}  // namespace detail

inline std::string feature_table(const std::vector<CvResult>& rows) {
  std::ostringstream o;
  o << std::left << std::setw(34) << "Feature set" << std::right << std::setw(6) << "cols" << std::setw(18)
    << "AUC" << std::setw(18) << "F1" << "\n";
  for (const auto& r : rows) {
    o << std::left << std::setw(34) << r.name << std::right << std::setw(6) << r.columns.size() << std::setw(18)
      << (detail::fixed(r.auc_mean) + " +/- " + detail::fixed(r.auc_sd)) << std::setw(18)
      << (detail::fixed(r.f1_mean) + " +/- " + detail::fixed(r.f1_sd)) << "\n";
  }
  return o.str();
}

inline std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream o;
  o << std::left << std::setw(18) << "Configuration" << std::right << std::setw(4) << "k" << std::setw(8) << "beta"
    << std::setw(7) << "N" << std::setw(9) << "r" << std::setw(9) << "dr" << "\n";
  for (const auto& r : rows) {
    o << std::left << std::setw(18) << r.config.name << std::right << std::setw(4) << r.config.k << std::setw(8)
      << detail::fixed(r.config.beta, 1) << std::setw(7) << r.config.sample_size << std::setw(9) << detail::fixed(r.r)
      << std::setw(9) << detail::fixed(r.delta_r) << "\n";
  }
  return o.str();
}

inline std::string depth_table(const DepthReport& rep) {
  std::ostringstream o;
  o << std::left << std::setw(6) << "Agent" << std::right << std::setw(10) << "depth 0" << std::setw(10) << "depth 1"
    << std::setw(10) << "d" << std::setw(10) << "p" << "\n";
  for (const auto& r : rep.agents) {
    o << std::left << std::setw(6) << ("k=" + std::to_string(r.k)) << std::right << std::setw(10)
      << detail::opt_fixed(r.err_depth0) << std::setw(10) << detail::opt_fixed(r.err_depth1) << std::setw(10)
      << detail::opt_fixed(r.cohens_d, 2) << std::setw(10)
      << (r.mann_whitney ? detail::fixed(r.mann_whitney->p, 4) : std::string("-")) << "\n";
  }
  o << "claims at depth 2 (not stratified): " << rep.excluded_deeper << "\n";
  return o.str();
}

}  // namespace bpl
