// Acceptance run: one PASS/FAIL line per criterion, with the measured values
// and the wall time against that criterion's budget. Exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <unistd.h>

#include "bpl/bpl.hpp"

using namespace bpl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    detail += (detail.empty() ? "" : "; ") + what;
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, int prec = 3) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(prec) << v;
  return out.str();
}

std::string sci(double v) {
  std::ostringstream out;
  out << std::scientific << std::setprecision(2) << v;
  return out.str();
}

// ------------------------------------------------------------ reference code

double logit(double p) { return std::log(p / (1.0 - p)); }
double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Unbounded two-world RSA, honest speakers, in log-odds: each speaker/listener
// round scales the previous listener's log-odds by alpha and re-adds the prior.
double rsa_reference(double literal_true, double prior_true, double alpha, int k) {
  double z = logit(literal_true) + logit(prior_true);
  for (int level = 1; level <= k; ++level) z = alpha * z + logit(prior_true);
  return expit(z);
}

double brute_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  return wins / pairs;
}

double brute_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  // Sum over all pairs: r = sum (xi-xj)(yi-yj) / sqrt(sum (xi-xj)^2 sum (yi-yj)^2).
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      sxy += (x[i] - x[j]) * (y[i] - y[j]);
      sxx += (x[i] - x[j]) * (x[i] - x[j]);
      syy += (y[i] - y[j]) * (y[i] - y[j]);
    }
  return sxy / std::sqrt(sxx * syy);
}

double brute_cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
  const auto moments = [](const std::vector<double>& v) {
    long double s = 0.0;
    for (double x : v) s += x;
    const long double m = s / v.size();
    long double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair<double, double>{static_cast<double>(m), static_cast<double>(ss)};
  };
  const auto [ma, ssa] = moments(a);
  const auto [mb, ssb] = moments(b);
  const double pooled = std::sqrt((ssa + ssb) / static_cast<double>(a.size() + b.size() - 2));
  return (ma - mb) / pooled;
}

double brute_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : x == y ? 0.5 : 0.0;
  return u;
}

// Two-sided exact p over every assignment of the pooled values to group a.
double brute_mw_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  // Each value's pairwise score against the whole pool; U of a subset is the
  // sum of its scores minus the within-subset pairs, na*(na-1)/2 (ties included).
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) score[i] += pooled[i] > pooled[j] ? 1.0 : pooled[i] == pooled[j] ? 0.5 : 0.0;
  const double within = static_cast<double>(na * (na - 1)) / 2.0;
  const double centre = static_cast<double>(na * (n - na)) / 2.0;
  const double observed = std::abs(brute_u(a, b) - centre);
  std::vector<bool> sel(n, false);
  std::fill(sel.end() - static_cast<std::ptrdiff_t>(na), sel.end(), true);
  double hit = 0.0, all = 0.0;
  do {
    double u = -within;
    for (std::size_t i = 0; i < n; ++i)
      if (sel[i]) u += score[i];
    all += 1.0;
    if (std::abs(u - centre) >= observed - 1e-9) hit += 1.0;
  } while (std::next_permutation(sel.begin(), sel.end()));
  return hit / all;
}

void fixed_logistic_instance(Eigen::MatrixXd& x, std::vector<int>& y) {
  Rng rng(2024);
  x.resize(50, 3);
  y.clear();
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(-2.0, 2.0);
    const double z = 0.3 + 1.0 * x(i, 0) - 0.5 * x(i, 1) + 0.25 * x(i, 2);
    y.push_back(rng.bernoulli(1.0 / (1.0 + std::exp(-z))) ? 1 : 0);
  }
}

// Gradient descent at step 1/L; the Hessian is bounded by X'X/4 + l2.
double gradient_descent_loss(const Eigen::MatrixXd& x, const std::vector<int>& y, double l2) {
  const long n = x.rows(), p = x.cols();
  Eigen::MatrixXd design(n, p + 1);
  design << x, Eigen::VectorXd::Ones(n);
  Eigen::VectorXd target(n), theta = Eigen::VectorXd::Zero(p + 1), penalty = Eigen::VectorXd::Constant(p + 1, l2);
  penalty(p) = 0.0;
  for (long i = 0; i < n; ++i) target(i) = y[static_cast<std::size_t>(i)];
  const double step = 1.0 / (0.25 * design.squaredNorm() + l2);
  for (int it = 0; it < 500000; ++it) {
    const Eigen::VectorXd prob = (-(design * theta)).array().exp().unaryExpr([](double e) { return 1.0 / (1.0 + e); });
    const Eigen::VectorXd g = design.transpose() * (prob - target) + penalty.cwiseProduct(theta);
    if (g.cwiseAbs().maxCoeff() < 1e-11) break;
    theta -= step * g;
  }
  double f = 0.0;
  const Eigen::VectorXd z = design * theta;
  for (long i = 0; i < n; ++i) f += std::log1p(std::exp(z(i))) - target(i) * z(i);
  return f + 0.5 * l2 * theta.head(p).squaredNorm();
}

// ------------------------------------------------------------- criteria

Outcome rsa_reduction() {
  Outcome o;
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    // Priors as the pipeline produces them: Laplace-smoothed history ratios.
    const auto good = rng.below(11), bad = rng.below(11);
    ClaimFeatures f;
    f.prior_true = (static_cast<double>(good) + 1.0) / (static_cast<double>(good + bad) + 2.0);
    f.credibility = 1.0;
    f.valence = rng.uniform();
    f.depth = static_cast<int>(rng.below(3));
    for (int k = 0; k <= 2; ++k) {
      AgentProfile a;
      a.k = k;
      a.beta = 1e9;
      a.lambda_mix = 0.0;
      a.seed = rng.next();
      const double got = bpl_posterior(f, a, {}).belief;
      worst = std::max(worst, std::abs(got - rsa_reference(0.55 - 0.25 * f.valence, f.prior_true, 1.0, k)));
    }
  }
  o.require(worst <= 1e-9, "deviation above 1e-9");
  o.note("max |belief - RSA| = " + sci(worst) + " over 600 cases");
  return o;
}

Outcome golden_trace() {
  Outcome o;
  ClaimFeatures f;
  f.prior_true = 0.8;
  f.credibility = 1.0;
  f.valence = 0.0;
  AgentProfile a;
  a.k = 0;
  a.beta = 1.0;
  const auto r = bpl_posterior(f, a, {});
  // Compressed prior 1/2*0.8 + 0.5/2 = 0.65; literal 0.55; Bayes: 0.3575/0.515.
  const double expected = 0.3575 / 0.515;
  o.require(std::abs(r.compressed_prior - 0.65) <= 1e-12, "compressed prior " + num(r.compressed_prior, 15));
  o.require(std::abs(r.belief - expected) <= 1e-12, "belief off by " + sci(std::abs(r.belief - expected)));
  o.require(std::abs(r.belief - 0.6941) < 1e-4, "belief does not round to 0.6941");
  o.note("belief = " + num(r.belief, 12) + ", expected " + num(expected, 12));
  return o;
}

PreparedCorpus liar_corpus(synth::LiarProfile profile) {
  synth::LiarOptions lo;
  lo.n = 5000;
  lo.seed = 1;
  lo.profile = profile;
  return prepare(synth::liar_claims(lo), FeatureConfig{});
}

Outcome leakage(const PreparedCorpus& p) {
  Outcome o;
  const auto y = targets(p);
  const auto with = cross_validate("Surface", surface_matrix(p, true), y, surface_columns(DatasetKind::Liar), 42);
  const auto without =
      cross_validate("Surface - false rate", surface_matrix(p, false), y, surface_columns(DatasetKind::Liar, false), 42);
  o.require(with.auc_mean >= 0.99, "with false rate below 0.99");
  o.require(without.auc_mean < 0.95, "without false rate not below 0.95");
  o.note("n = " + std::to_string(p.claims.size()) + ", AUC " + num(with.auc_mean) + " -> " + num(without.auc_mean));
  return o;
}

Outcome ablation_direction() {
  Outcome o;
  const auto p = liar_corpus(synth::LiarProfile::InformativePriors);
  const auto rows = run_ablation(p, RunOptions{});
  std::string worst;
  double lowest = 0.0;
  std::string deltas;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    deltas += (deltas.empty() ? "" : ", ") + rows[i].config.name + " " + num(rows[i].delta_r);
    if (worst.empty() || rows[i].delta_r < lowest) {
      lowest = rows[i].delta_r;
      worst = rows[i].config.name;
    }
  }
  const auto delta_of = [&](const std::string& name) {
    for (const auto& r : rows)
      if (r.config.name == name) return r.delta_r;
    throw Error("missing ablation row " + name);
  };
  o.require(worst == "No Compression", "most negative delta is " + worst);
  o.require(std::abs(delta_of("No Depth")) <= 0.02, "|No Depth| > 0.02");
  o.require(std::abs(delta_of("No Availability")) <= 0.02, "|No Availability| > 0.02");
  o.note("delta r: " + deltas);
  return o;
}

Outcome depth_ordering() {
  Outcome o;
  const auto p = prepare(synth::disinfo_suite(1, 900), FeatureConfig{});
  const auto rep = depth_stratified_eval(p, RunOptions{});
  const auto& k0 = rep.agents.at(0);
  const auto& k1 = rep.agents.at(1);
  const auto& k2 = rep.agents.at(2);
  if (!k0.err_depth1 || !k1.err_depth1 || !k2.err_depth1 || !k2.err_depth0) {
    o.require(false, "a depth stratum is empty");
    return o;
  }
  o.require(*k1.err_depth1 - *k0.err_depth1 >= 0.02, "k1 - k0 gap below 0.02");
  o.require(*k0.err_depth1 - *k2.err_depth1 >= 0.02, "k0 - k2 gap below 0.02");
  o.require(*k2.err_depth1 < *k2.err_depth0, "k2 depth-1 error not below its depth-0 error");
  o.note("depth-1 error k0 " + num(*k0.err_depth1) + ", k1 " + num(*k1.err_depth1) + ", k2 " + num(*k2.err_depth1) +
         "; k2 depth-0 " + num(*k2.err_depth0));
  return o;
}

Outcome disagreement_sign(const PreparedCorpus& p) {
  Outcome o;
  const auto run = run_population(p, canonical_population(42), RunOptions{});
  const auto t = disagreement_correlation(p, run, 1000, 42);
  o.require(t.r > 0.0, "r not positive");
  o.require(t.p_permutation < 0.05, "permutation p >= 0.05");
  o.note("r = " + num(t.r) + ", p = " + num(t.p_permutation, 4) + " (1000 shuffles)");
  return o;
}

Outcome metric_oracles() {
  Outcome o;
  Rng rng(7);
  double stat_err = 0.0, exact_err = 0.0, approx_gap = 0.0;
  const auto draw = [&](std::size_t n, bool tied) {
    std::vector<double> v(n);
    for (auto& x : v) x = tied ? static_cast<double>(rng.below(5)) : rng.uniform();
    return v;
  };
  for (int t = 0; t < 100; ++t) {
    const bool tied = t % 2 == 1;
    // auc, pearson
    const std::size_t n = 4 + rng.below(17);
    const auto s = draw(n, tied);
    auto x = draw(n, false);
    std::vector<int> y(n);
    for (auto& v : y) v = rng.bernoulli(0.5) ? 1 : 0;
    y[0] = 0;
    y[1] = 1;
    stat_err = std::max(stat_err, std::abs(roc_auc(s, y) - brute_auc(s, y)));
    stat_err = std::max(stat_err, std::abs(pearson_r(x, s) - brute_pearson(x, s)));

    // two groups, pooled size <= 20
    const std::size_t na = 2 + rng.below(9), nb = 2 + rng.below(9);
    const auto a = draw(na, tied), b = draw(nb, tied);
    stat_err = std::max(stat_err, std::abs(cohens_d(a, b) - brute_cohens_d(a, b)));
    const auto mw = mann_whitney_u(a, b);
    stat_err = std::max(stat_err, std::abs(mw.u - brute_u(a, b)));
    exact_err = std::max(exact_err, std::abs(mann_whitney_exact_p(a, b) - brute_mw_p(a, b)));
  }
  // Approximate vs exact p on tie-free groups of 5..10 (pooled size <= 20).
  for (int t = 0; t < 100; ++t) {
    const auto a = draw(5 + rng.below(6), false);
    auto b = draw(5 + rng.below(6), false);
    for (auto& v : b) v += 0.3 * rng.uniform();
    approx_gap = std::max(approx_gap, std::abs(mann_whitney_normal_p(a, b) - mann_whitney_exact_p(a, b)));
  }
  o.require(stat_err <= 1e-9, "statistic off by " + sci(stat_err));
  o.require(exact_err <= 1e-9, "exact p off by " + sci(exact_err));
  o.require(approx_gap <= 0.02, "normal vs exact p gap " + num(approx_gap, 4));

  Eigen::MatrixXd x;
  std::vector<int> y;
  fixed_logistic_instance(x, y);
  const auto m = fit_logistic(x, y);
  const double newton = logistic_objective(x, y, m.weights, m.intercept, 1.0);
  const double oracle = gradient_descent_loss(x, y, 1.0);
  o.require(m.converged && std::abs(newton - oracle) <= 1e-6, "logistic loss differs from oracle");
  o.note("max statistic err " + sci(stat_err) + ", exact-p err " + sci(exact_err) + ", approx gap " +
         num(approx_gap, 4) + ", logistic |dloss| " + sci(std::abs(newton - oracle)));
  return o;
}

std::vector<RecallItem> mixed_recall(std::size_t n, double phi_false, double phi_true) {
  std::vector<RecallItem> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int v = i % 3 == 0 ? 0 : 1;
    out.push_back({"item " + std::to_string(i), v, v == 0 ? phi_false : phi_true, "id" + std::to_string(i)});
  }
  return out;
}

Outcome property_suite() {
  Outcome o;
  Rng rng(99);
  int failures = 0;
  const auto expect = [&](bool ok, const char* what) {
    if (!ok && failures++ == 0) o.require(false, what);
  };

  const RecallSampler sampler(mixed_recall(30, 2.5, 1.0));
  for (int trial = 0; trial < 2000; ++trial) {
    ChainInputs in;
    in.features.prior_true = rng.uniform(0.01, 0.99);
    in.features.credibility = rng.uniform();
    in.features.valence = rng.uniform();
    in.features.depth = static_cast<int>(rng.below(3));
    AgentProfile a;
    a.k = static_cast<int>(rng.below(3));
    a.beta = rng.uniform(0.05, 60.0);
    a.sample_size = 1 + rng.below(40);
    a.lambda_mix = rng.uniform();
    a.seed = rng.next();
    const auto r = bpl_posterior(in, a, sampler);
    for (const auto& t : r.depth_trace) expect(std::abs(t.p_true + t.p_false - 1.0) <= 1e-12, "posterior not normalised");
    const auto again = bpl_posterior(in, a, sampler);
    expect(again.belief == r.belief && again.speaker_likelihoods == r.speaker_likelihoods, "rerun not bit-identical");
  }

  for (int trial = 0; trial < 500; ++trial) {
    const double p = rng.uniform(0.001, 0.999);
    double last = std::numeric_limits<double>::infinity();
    for (double beta = 0.01; beta < 1e6; beta *= 1.6) {
      const auto c = compress_prior(p, beta, 1.0);
      expect(c.loss >= 0.0, "KL negative");
      expect(c.loss <= last + 1e-15, "KL increases with beta");
      expect(p == 0.5 || (c.p_true > 0.5) == (p > 0.5), "compression changes the argmax");
      last = c.loss;
    }
  }

  for (int i = 0; i < 2000; ++i) {
    const double nu = rng.bernoulli(0.3) ? 0.0 : rng.uniform();
    const double rep = rng.bernoulli(0.3) ? 0.0 : static_cast<double>(rng.below(50));
    const double rho = rng.bernoulli(0.3) ? 0.0 : rng.uniform();
    const double phi = availability_weight(nu, rep, rho);
    expect(phi >= 1.0 && (phi == 1.0) == (nu == 0.0 && rep == 0.0 && rho == 0.0), "phi bound or equality case");
  }

  for (int i = 0; i < 2000; ++i) {
    std::vector<double> beliefs(kPopulationSize);
    for (auto& b : beliefs) b = rng.bernoulli(0.2) ? static_cast<double>(rng.below(2)) : rng.uniform();
    const double d = disagreement(beliefs);
    expect(d >= 0.0 && d <= 0.25, "disagreement outside [0, 0.25]");
  }

  for (int i = 0; i < 2000; ++i) {
    const double l = rng.uniform(0.001, 0.999);
    const auto h = speaker(l, 1.0, Honest{});
    const auto d = speaker(l, 1.0, Deceptive{});
    expect(std::abs(d.true_world - (1.0 - h.true_world)) <= 1e-15, "deceptive speaker not symmetric at alpha 1");
  }

  for (int trial = 0; trial < 500; ++trial) {
    ClaimFeatures f;
    f.prior_true = rng.uniform(0.05, 0.95);
    f.credibility = rng.uniform(0.5, 1.0);
    f.valence = rng.uniform();
    AgentProfile a;
    a.k = 1 + static_cast<int>(rng.below(2));
    a.beta = rng.uniform(0.1, 50.0);
    a.sample_size = 1 + rng.below(30);
    a.lambda_mix = rng.uniform(0.05, 1.0);
    a.seed = rng.next();
    const double phi_true = rng.uniform(1.0, 3.0), phi_false = rng.uniform(1.0, 3.0), boost = rng.uniform(0.0, 4.0);
    const auto low = bpl_posterior(f, a, mixed_recall(12, phi_false, phi_true));
    const auto high = bpl_posterior(f, a, mixed_recall(12, phi_false + boost, phi_true));
    expect(high.belief <= low.belief + 1e-12, "salient false recalls raised belief");
  }

  // Whole-pipeline reruns in feature mode, also across thread counts.
  synth::LiarOptions lo;
  lo.n = 600;
  lo.seed = 3;
  const auto p = prepare(synth::liar_claims(lo), FeatureConfig{});
  RunOptions one, three;
  three.threads = 3;
  const auto r1 = run_population(p, canonical_population(42), one);
  const auto r3 = run_population(p, canonical_population(42), three);
  for (std::size_t agent = 0; agent < kPopulationSize; ++agent)
    expect(r1.beliefs_of(agent) == r3.beliefs_of(agent), "population run depends on thread count");

  if (failures > 0) o.note(std::to_string(failures) + " violations");
  else o.note("all properties hold");
  return o;
}

Outcome hybrid_contract() {
  Outcome o;
  const fs::path work = fs::temp_directory_path() / ("bpl_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);
  const auto cache_path = (work / "cache.jsonl").string();
  fs::remove(cache_path);

  std::ifstream in(default_data_path("synthetic_liar.tsv"));
  if (!in) throw IoError("cannot open " + default_data_path("synthetic_liar.tsv"));
  const auto p = prepare(parse_liar(in).claims, FeatureConfig{});
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < p.claims.size(); ++i) where.emplace(p.claims[i].id, i);
  std::vector<std::size_t> sample;
  for (const auto& c : sample_claims(p.claims, 50, 42)) sample.push_back(where.at(c.id));

  AgentProfile agent;
  agent.k = 1;
  agent.beta = 1.0;
  agent.sample_size = 3;
  agent.seed = 42;
  const auto templates = PromptTemplates::load(default_data_path("prompts"));
  const auto corpus = load_stub_recall_corpus(default_data_path("stub_recall_corpus.tsv"));

  std::string first_dump;
  std::size_t first_calls = 0;
  {
    ResponseCache cache(cache_path);
    StubClient client(42, templates, corpus, &cache);
    const auto rep = validate_hybrid(p, sample, client, agent, RunOptions{});
    first_dump = nlohmann::json(rep).dump();
    first_calls = client.backend_calls();
    o.require(rep.claims.size() == 50, "expected 50 claims");
    o.require(rep.models.size() == 2 && rep.models[0].auc && rep.models[1].auc && rep.models[0].r && rep.models[1].r,
              "paired model metrics incomplete");
    o.require(rep.diagnostics.size() == 3, "expected three component diagnostics");
    if (!rep.diagnostics.empty()) {
      const auto& phi = rep.diagnostics[0];
      o.require(phi.r && *phi.r > 0.0, "phi-valence correlation not positive");
      if (phi.r) o.note("phi-valence r = " + num(*phi.r));
    }
    if (rep.models.size() == 2 && rep.models[0].auc && rep.models[1].auc)
      o.note("AUC hybrid " + num(*rep.models[0].auc) + ", feature " + num(*rep.models[1].auc));
  }
  {
    ResponseCache cache(cache_path);
    StubClient client(42, templates, corpus, &cache);
    RunOptions threaded;
    threaded.threads = 3;
    const auto rep = validate_hybrid(p, sample, client, agent, threaded);
    o.require(client.backend_calls() == 0, "rerun missed the cache");
    o.require(nlohmann::json(rep).dump() == first_dump, "cached rerun differs");
  }
  o.note(std::to_string(first_calls) + " stub calls, cached rerun identical");
  fs::remove_all(work);
  return o;
}

}  // namespace

int main() {
  bool all = true;
  const auto run = [&](int id, const std::string& name, double budget_s, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < budget_s, "over the " + num(budget_s, 0) + " s budget");
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << " [" << num(secs, 2) << " s / "
              << num(budget_s, 0) << " s]: " << o.detail << std::endl;
  };

  run(1, "RSA reduction", 1, rsa_reduction);
  run(2, "golden chain trace", 1, golden_trace);
  PreparedCorpus liar;
  run(3, "speaker-history leakage", 120, [&] {
    liar = liar_corpus(synth::LiarProfile::LiarLike);
    return leakage(liar);
  });
  run(4, "ablation direction", 300, ablation_direction);
  run(5, "depth-mismatch ordering", 30, depth_ordering);
  run(6, "disagreement-ambiguity sign", 120, [&] { return disagreement_sign(liar); });
  run(7, "metric oracles", 60, metric_oracles);
  run(8, "property suite", 10, property_suite);
  run(9, "hybrid pipeline contract (stub)", 60, hybrid_contract);
  return all ? 0 : 1;
}
