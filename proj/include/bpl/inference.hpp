#pragma once

// The bounded listener chain: compressed prior, literal listener, depth-bounded
// speaker/listener recursion with availability-weighted recall, susceptibility.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bpl/error.hpp"
#include "bpl/features.hpp"
#include "bpl/random.hpp"

namespace bpl {

// (w=0, w=1)
struct Likelihoods {
  double false_world = 0.5;
  double true_world = 0.5;

  double operator[](int w) const { return w == 0 ? false_world : true_world; }
  friend bool operator==(const Likelihoods&, const Likelihoods&) = default;
};

struct CompressedPrior {
  double p_true = 0.5;
  double loss = 0.0;  // nats

  friend bool operator==(const CompressedPrior&, const CompressedPrior&) = default;
};

struct Honest {};
struct Deceptive {};
struct General {
  double deception = 0.0;  // probability the speaker is deceptive
};
using SpeakerType = std::variant<Honest, Deceptive, General>;

enum class LiteralMode { Feature, Grounded };

struct AgentProfile {
  int k = 1;
  double beta = 1.0;
  std::size_t sample_size = 25;
  double alpha = 1.0;
  double lambda_mix = 0.5;
  std::optional<SpeakerType> speaker_type;  // level-2 speaker; unset means General(1 - gamma)
  bool apply_depth_cap = false;
  std::uint64_t seed = 0;
};

struct RecallItem {
  std::string text;
  int veracity = 0;  // recalled world, 0 or 1
  double phi = 1.0;
  std::string source_id;  // lets a claim's own record be excluded from its recall

  friend bool operator==(const RecallItem&, const RecallItem&) = default;
};

struct LevelTrace {
  int level = 0;
  double p_false = 0.5;
  double p_true = 0.5;
  Likelihoods likelihoods;  // what the listener at this level conditioned on
};

struct PosteriorResult {
  double belief = 0.5;
  double susceptibility = 0.5;
  double compression_loss = 0.0;
  double compressed_prior = 0.5;
  int effective_k = 0;
  std::vector<LevelTrace> depth_trace;
  Likelihoods speaker_likelihoods;
  std::uint64_t seed = 0;
};

struct LiteralBand {
  double lo = 0.05;
  double hi = 0.95;
};

// ---------------------------------------------------------------------------
// Building blocks

// KL(P || Q) over a binary world, nats. 0 log 0 = 0.
inline double binary_kl(double p, double q) {
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return std::max(0.0, kl);
}

inline CompressedPrior compress_prior(double prior_true, double beta, double gamma) {
  if (!(beta > 0.0) || std::isnan(beta)) throw ParameterError("beta must be positive, got " + std::to_string(beta));
  if (!(prior_true >= 0.0 && prior_true <= 1.0)) throw ParameterError("prior must lie in [0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("credibility must lie in [0, 1]");
  double shrunk;
  if (std::isinf(beta)) {
    shrunk = prior_true;
  } else {
    shrunk = beta / (beta + 1.0) * prior_true + 0.5 / (beta + 1.0);
  }
  CompressedPrior out;
  out.p_true = gamma * shrunk + (1.0 - gamma) * 0.5;
  out.loss = binary_kl(prior_true, out.p_true);
  return out;
}

inline double availability_weight(double valence, double repetition, double recency) {
  return 1.0 + valence + std::log1p(repetition) + recency;
}

inline double clamp_band(double p, const LiteralBand& band) { return std::clamp(p, band.lo, band.hi); }

inline double feature_plausibility(double valence, const LiteralBand& band = {}) {
  return clamp_band(0.55 - 0.25 * valence, band);
}

inline Likelihoods literal_likelihoods(double plausibility_true) { return {1.0 - plausibility_true, plausibility_true}; }

// Posterior over w given likelihoods and a prior P(w=1).
inline std::pair<double, double> listener(const Likelihoods& l, double prior_true) {
  if (l.false_world < 0.0 || l.true_world < 0.0) throw DegenerateInputError("negative likelihood");
  const double a = l.true_world * prior_true;
  const double b = l.false_world * (1.0 - prior_true);
  const double z = a + b;
  if (!(z > 0.0)) throw DegenerateInputError("listener normaliser is zero");
  const double t = a / z;
  return {1.0 - t, t};
}

inline Likelihoods honest_speaker(double listener_true, double alpha) {
  const double t = std::pow(listener_true, alpha);
  const double f = std::pow(1.0 - listener_true, alpha);
  const double s = t / (t + f);
  return {1.0 - s, s};
}

inline Likelihoods speaker(double listener_true, double alpha, const SpeakerType& type) {
  if (!(listener_true > 0.0 && listener_true < 1.0))
    throw DegenerateInputError("speaker needs a listener probability strictly inside (0, 1)");
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  const Likelihoods hon = honest_speaker(listener_true, alpha);
  const Likelihoods dec{hon.true_world, hon.false_world};
  if (std::holds_alternative<Honest>(type)) return hon;
  if (std::holds_alternative<Deceptive>(type)) return dec;
  const double pi = std::get<General>(type).deception;
  if (!(pi >= 0.0 && pi <= 1.0)) throw ParameterError("deception probability must lie in [0, 1]");
  return {(1.0 - pi) * hon.false_world + pi * dec.false_world, (1.0 - pi) * hon.true_world + pi * dec.true_world};
}

// phi-weighted fraction of the sample recalled as world w; 0.5 when empty.
inline double recall_likelihood(const std::vector<RecallItem>& sample, int w) {
  double num = 0.0, den = 0.0;
  for (const auto& it : sample) {
    den += it.phi;
    if (it.veracity == w) num += it.phi;
  }
  return den > 0.0 ? num / den : 0.5;
}

inline Likelihoods availability_adjust(const Likelihoods& base, const Likelihoods& recall, double lambda_mix) {
  if (!(lambda_mix >= 0.0 && lambda_mix <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  return {(1.0 - lambda_mix) * base.false_world + lambda_mix * recall.false_world,
          (1.0 - lambda_mix) * base.true_world + lambda_mix * recall.true_world};
}

inline double susceptibility(double belief, double loss) { return belief * (1.0 + loss); }

// ---------------------------------------------------------------------------
// Recall sampling

// phi-proportional sampling with replacement by inverse CDF. Items recalled as
// false occupy the front of the CDF, so raising their phi can only turn a draw
// from true to false, never the reverse.
class RecallSampler {
 public:
  RecallSampler() = default;

  explicit RecallSampler(std::vector<RecallItem> items) : items_(std::move(items)) {
    for (const auto& it : items_) {
      if (!(it.phi >= 1.0) || !std::isfinite(it.phi)) throw ParameterError("recall item phi must be finite and >= 1");
      if (it.veracity != 0 && it.veracity != 1) throw ParameterError("recall veracity must be 0 or 1");
    }
    std::stable_partition(items_.begin(), items_.end(), [](const RecallItem& it) { return it.veracity == 0; });
    cumulative_.reserve(items_.size());
    double acc = 0.0;
    for (const auto& it : items_) {
      acc += it.phi;
      cumulative_.push_back(acc);
    }
  }

  const std::vector<RecallItem>& items() const { return items_; }
  bool empty() const { return items_.empty(); }

  // Index of the item whose source_id matches, or npos.
  std::size_t find_source(const std::string& source_id) const {
    if (source_id.empty()) return npos;
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (items_[i].source_id == source_id) return i;
    return npos;
  }

  // n draws; the item at `exclude` is never returned. Throws EmptyRecallCorpus
  // when nothing is left to draw from.
  std::vector<std::size_t> draw(std::size_t n, Rng& rng, std::size_t exclude = npos) const {
    const std::size_t available = items_.size() - (exclude < items_.size() ? 1 : 0);
    if (available == 0) throw EmptyRecallCorpus();
    const double total = cumulative_.back();
    std::vector<std::size_t> out;
    out.reserve(n);
    while (out.size() < n) {
      const double u = rng.uniform() * total;
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
      if (idx >= items_.size()) idx = items_.size() - 1;
      if (idx == exclude) continue;
      out.push_back(idx);
    }
    return out;
  }

  std::vector<RecallItem> sample(std::size_t n, Rng& rng, std::size_t exclude = npos) const {
    std::vector<RecallItem> out;
    for (auto i : draw(n, rng, exclude)) out.push_back(items_[i]);
    return out;
  }

  // (w_hat(0), w_hat(1)) for a fresh sample; uninformative when nothing can be drawn.
  Likelihoods recall_pair(std::size_t n, Rng& rng, std::size_t exclude = npos) const {
    const std::size_t available = items_.size() - (exclude < items_.size() ? 1 : 0);
    if (available == 0 || n == 0) return {0.5, 0.5};
    double num_false = 0.0, den = 0.0;
    for (auto i : draw(n, rng, exclude)) {
      den += items_[i].phi;
      if (items_[i].veracity == 0) num_false += items_[i].phi;
    }
    const double f = num_false / den;
    return {f, 1.0 - f};
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  std::vector<RecallItem> items_;
  std::vector<double> cumulative_;
};

inline std::vector<RecallItem> sample_recall(const std::vector<RecallItem>& corpus, std::size_t n, std::uint64_t seed) {
  if (corpus.empty()) throw EmptyRecallCorpus();
  RecallSampler sampler(corpus);
  Rng rng(seed);
  return sampler.sample(n, rng);
}

// ---------------------------------------------------------------------------
// Posterior

inline void validate(const AgentProfile& a) {
  if (a.k < 0 || a.k > 2) throw ParameterError("k must be 0, 1 or 2, got " + std::to_string(a.k));
  if (!(a.beta > 0.0)) throw ParameterError("beta must be positive, got " + std::to_string(a.beta));
  if (a.sample_size == 0) throw ParameterError("sample size N must be positive");
  if (!(a.alpha > 0.0) || !std::isfinite(a.alpha)) throw ParameterError("alpha must be positive");
  if (!(a.lambda_mix >= 0.0 && a.lambda_mix <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  if (a.speaker_type && std::holds_alternative<General>(*a.speaker_type)) {
    const double pi = std::get<General>(*a.speaker_type).deception;
    if (!(pi >= 0.0 && pi <= 1.0)) throw ParameterError("deception probability must lie in [0, 1]");
  }
}

struct ChainInputs {
  ClaimFeatures features;
  // Replaces compress_prior(features.prior_true, beta, features.credibility).
  std::optional<CompressedPrior> prior;
  LiteralMode mode = LiteralMode::Feature;
  // Raw client plausibility, required in Grounded mode.
  std::optional<double> plausibility;
  LiteralBand band;
};

inline int effective_depth(const AgentProfile& agent, int claim_depth) {
  return agent.apply_depth_cap ? std::min(agent.k, claim_depth + 1) : agent.k;
}

inline PosteriorResult bpl_posterior(const ChainInputs& in, const AgentProfile& agent, const RecallSampler& recall,
                                     std::size_t exclude = RecallSampler::npos) {
  validate(agent);
  const auto& f = in.features;
  const CompressedPrior prior = in.prior ? *in.prior : compress_prior(f.prior_true, agent.beta, f.credibility);

  double s_lit;
  if (in.mode == LiteralMode::Grounded) {
    if (!in.plausibility) throw ParameterError("grounded literal listener needs a plausibility score");
    s_lit = clamp_band(*in.plausibility, in.band);
  } else {
    s_lit = feature_plausibility(f.valence, in.band);
  }

  PosteriorResult r;
  r.seed = agent.seed;
  r.compression_loss = prior.loss;
  r.compressed_prior = prior.p_true;
  r.effective_k = effective_depth(agent, f.depth);

  Likelihoods lik = literal_likelihoods(s_lit);
  auto [l0, l1] = listener(lik, prior.p_true);
  r.depth_trace.push_back({0, l0, l1, lik});

  Rng rng(agent.seed);
  const SpeakerType level2 = agent.speaker_type ? *agent.speaker_type : SpeakerType{General{1.0 - f.credibility}};
  for (int level = 1; level <= r.effective_k; ++level) {
    double prev = r.depth_trace.back().p_true;
    if (prev <= 0.0 || prev >= 1.0) prev = clamp_band(prev, in.band);
    const SpeakerType type = level == 1 ? SpeakerType{Honest{}} : level2;
    const Likelihoods base = speaker(prev, agent.alpha, type);
    if (agent.lambda_mix > 0.0) {
      lik = availability_adjust(base, recall.recall_pair(agent.sample_size, rng, exclude), agent.lambda_mix);
    } else {
      lik = base;
    }
    auto [p0, p1] = listener(lik, prior.p_true);
    r.depth_trace.push_back({level, p0, p1, lik});
  }
  r.belief = r.depth_trace.back().p_true;
  r.speaker_likelihoods = r.depth_trace.back().likelihoods;
  r.susceptibility = susceptibility(r.belief, r.compression_loss);
  return r;
}

inline PosteriorResult bpl_posterior(const ClaimFeatures& features, const AgentProfile& agent,
                                     const std::vector<RecallItem>& recall_corpus) {
  ChainInputs in;
  in.features = features;
  return bpl_posterior(in, agent, RecallSampler(recall_corpus));
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string speaker_type_name(const SpeakerType& t) {
  if (std::holds_alternative<Honest>(t)) return "honest";
  if (std::holds_alternative<Deceptive>(t)) return "deceptive";
  return "general(" + std::to_string(std::get<General>(t).deception) + ")";
}

inline void to_json(nlohmann::json& j, const AgentProfile& a) {
  j = {{"k", a.k},
       {"beta", a.beta},
       {"N", a.sample_size},
       {"alpha", a.alpha},
       {"lambda", a.lambda_mix},
       {"speaker_type", a.speaker_type ? speaker_type_name(*a.speaker_type) : std::string("general(1-gamma)")},
       {"apply_depth_cap", a.apply_depth_cap}};
}

inline void to_json(nlohmann::json& j, const PosteriorResult& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : r.depth_trace) trace.push_back({{"level", t.level}, {"p_false", t.p_false}, {"p_true", t.p_true}});
  j = {{"belief", r.belief},
       {"susceptibility", r.susceptibility},
       {"compression_loss", r.compression_loss},
       {"compressed_prior", r.compressed_prior},
       {"effective_k", r.effective_k},
       {"speaker_likelihoods", {r.speaker_likelihoods.false_world, r.speaker_likelihoods.true_world}},
       {"seed", r.seed},
       {"trace", trace}};
}

}  // namespace bpl
