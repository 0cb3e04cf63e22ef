#pragma once

// Hybrid pipeline: client-supplied schema priors, literal plausibility and
// recalled claims feed the same inference chain the feature pipeline uses.
// validate_hybrid runs both on one claim sample and reports paired metrics and
// per-component diagnostics.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bpl/evaluation.hpp"
#include "bpl/grounding.hpp"
#include "bpl/metrics.hpp"
#include "bpl/parallel.hpp"
#include "bpl/pipeline.hpp"

namespace bpl {

struct HybridClaim {
  std::string claim_id;
  int label = 0;
  double lexicon_valence = 0.0;
  SalienceProfile salience;
  double phi_llm = 1.0;
  Schema schema;
  double plausibility = 0.5;
  std::vector<RecalledClaim> recalled;
  double false_recall_rate = 0.0;
  PosteriorResult hybrid;
  PosteriorResult feature;
};

struct ModelMetrics {
  std::string pipeline;
  std::optional<double> r, p, auc;
  std::string note;
};

struct ComponentDiagnostic {
  std::string name;
  std::optional<double> r, p;
  std::string note;
};

struct ValidationReport {
  AgentProfile agent;
  std::vector<HybridClaim> claims;
  std::vector<ModelMetrics> models;             // hybrid, feature
  std::vector<ComponentDiagnostic> diagnostics;  // phi-valence, false recall, schema
};

inline std::vector<RecallItem> recall_items(const std::vector<RecalledClaim>& recalled, const std::string& claim_id) {
  std::vector<RecallItem> out;
  for (std::size_t i = 0; i < recalled.size(); ++i) {
    const auto& r = recalled[i];
    out.push_back({r.text, r.veracity, phi_from_salience(r.salience), claim_id + "#recall-" + std::to_string(i)});
  }
  return out;
}

// One claim through the hybrid chain. The agent's seed is used as given.
inline PosteriorResult hybrid_posterior(const ClaimFeatures& features, const Schema& schema, double plausibility,
                                        const std::vector<RecalledClaim>& recalled, const std::string& claim_id,
                                        const AgentProfile& agent, const LiteralBand& band = {}) {
  ChainInputs in;
  in.features = features;
  in.prior = schema_prior(schema, agent.beta);
  in.mode = LiteralMode::Grounded;
  in.plausibility = plausibility;
  in.band = band;
  return bpl_posterior(in, agent, RecallSampler(recall_items(recalled, claim_id)));
}

namespace detail {

inline void correlate(const std::vector<double>& x, const std::vector<double>& y, std::optional<double>& r,
                      std::optional<double>& p, std::string& note) {
  try {
    r = pearson_r(x, y);
    p = pearson_p_value(*r, x.size());
  } catch (const ParameterError& e) {
    note = e.what();
  }
}

}  // namespace detail

// `sample` indexes into `corpus`; the feature baseline recalls from the whole
// corpus, the hybrid pipeline from the client. Both use the same per-claim seed.
inline ValidationReport validate_hybrid(const PreparedCorpus& corpus, const std::vector<std::size_t>& sample,
                                        GroundingClient& client, const AgentProfile& agent, const RunOptions& opt) {
  validate(agent);
  ValidationReport rep;
  rep.agent = agent;
  rep.claims.resize(sample.size());
  parallel_for(sample.size(), opt.threads, [&](std::size_t s) {
    const std::size_t i = sample[s];
    const auto& c = corpus.claims[i];
    const auto& f = corpus.features[i];
    HybridClaim& h = rep.claims[s];
    h.claim_id = c.id;
    h.label = c.target();
    h.lexicon_valence = f.valence;
    h.salience = client.rate_salience(c);
    h.phi_llm = phi_from_salience(h.salience);
    h.schema = client.make_schema(GroundingClient::source_of(c), GroundingClient::topic_of(c));
    h.plausibility = client.plausibility(c);
    h.recalled = client.simulate_recall(c, static_cast<std::size_t>(agent.sample_size));
    std::size_t n_false = 0;
    for (const auto& r : h.recalled) n_false += r.veracity == 0 ? 1 : 0;
    h.false_recall_rate = h.recalled.empty() ? 0.0 : static_cast<double>(n_false) / static_cast<double>(h.recalled.size());

    AgentProfile a = agent;
    a.seed = derive_seed(opt.seed, c.id, 0);
    h.hybrid = hybrid_posterior(f, h.schema, h.plausibility, h.recalled, c.id, a, opt.band);
    ChainInputs in;
    in.features = f;
    in.band = opt.band;
    h.feature = bpl_posterior(in, a, corpus.recall, corpus.self_index[i]);
  });

  std::vector<double> label, falseness, hyb, feat, phi, val, frr, ptrue;
  std::vector<int> y;
  for (const auto& h : rep.claims) {
    y.push_back(h.label);
    label.push_back(h.label);
    falseness.push_back(1.0 - h.label);
    hyb.push_back(h.hybrid.belief);
    feat.push_back(h.feature.belief);
    phi.push_back(h.phi_llm);
    val.push_back(h.lexicon_valence);
    frr.push_back(h.false_recall_rate);
    ptrue.push_back(h.schema.p_true);
  }
  for (auto [name, beliefs] : {std::pair{"hybrid", &hyb}, std::pair{"feature", &feat}}) {
    ModelMetrics m;
    m.pipeline = name;
    detail::correlate(*beliefs, label, m.r, m.p, m.note);
    try {
      m.auc = roc_auc(*beliefs, y);
    } catch (const ParameterError& e) {
      m.note += (m.note.empty() ? "" : "; ") + std::string(e.what());
    }
    rep.models.push_back(std::move(m));
  }
  const struct {
    const char* name;
    const std::vector<double>* x;
    const std::vector<double>* y;
  } diag[] = {{"phi_llm vs lexicon valence", &phi, &val},
              {"false-recall rate vs claim falseness", &frr, &falseness},
              {"schema P(true) vs label", &ptrue, &label}};
  for (const auto& d : diag) {
    ComponentDiagnostic c;
    c.name = d.name;
    detail::correlate(*d.x, *d.y, c.r, c.p, c.note);
    rep.diagnostics.push_back(std::move(c));
  }
  return rep;
}

inline void to_json(nlohmann::json& j, const HybridClaim& h) {
  j = {{"claim_id", h.claim_id},
       {"label", h.label},
       {"lexicon_valence", h.lexicon_valence},
       {"salience", h.salience},
       {"phi_llm", h.phi_llm},
       {"schema", h.schema},
       {"plausibility", h.plausibility},
       {"recalled", h.recalled},
       {"false_recall_rate", h.false_recall_rate},
       {"hybrid", h.hybrid},
       {"feature", h.feature}};
}

namespace detail {
inline nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }
}  // namespace detail

inline void to_json(nlohmann::json& j, const ModelMetrics& m) {
  j = {{"pipeline", m.pipeline}, {"r", detail::opt_json(m.r)}, {"p", detail::opt_json(m.p)}, {"auc", detail::opt_json(m.auc)}};
  if (!m.note.empty()) j["note"] = m.note;
}

inline void to_json(nlohmann::json& j, const ComponentDiagnostic& d) {
  j = {{"component", d.name}, {"r", detail::opt_json(d.r)}, {"p", detail::opt_json(d.p)}};
  if (!d.note.empty()) j["note"] = d.note;
}

inline void to_json(nlohmann::json& j, const ValidationReport& r) {
  j = {{"agent", r.agent}, {"n", r.claims.size()}, {"models", r.models}, {"diagnostics", r.diagnostics}};
}

inline std::string validation_tables(const ValidationReport& rep) {
  std::ostringstream out;
  out << "Model-level comparison (n=" << rep.claims.size() << "; k=" << rep.agent.k << ", beta=" << rep.agent.beta
      << ", N=" << rep.agent.sample_size << ")\n";
  out << std::left << std::setw(12) << "Pipeline" << std::right << std::setw(10) << "r" << std::setw(10) << "p"
      << std::setw(10) << "AUC" << "\n";
  for (const auto& m : rep.models) {
    out << std::left << std::setw(12) << m.pipeline << std::right << std::setw(10) << detail::opt_fixed(m.r) << std::setw(10)
        << detail::opt_fixed(m.p) << std::setw(10) << detail::opt_fixed(m.auc) << "\n";
  }
  out << "\nComponent diagnostics\n";
  out << std::left << std::setw(40) << "Component" << std::right << std::setw(10) << "r" << std::setw(10) << "p"
      << "\n";
  for (const auto& d : rep.diagnostics) {
    out << std::left << std::setw(40) << d.name << std::right << std::setw(10) << detail::opt_fixed(d.r) << std::setw(10)
        << detail::opt_fixed(d.p) << "\n";
  }
  return out.str();
}

}  // namespace bpl
