#pragma once

// Feature-mode orchestration: features for every claim, the recall corpus
// built from the same split, and agent/population runs with per-claim seeds.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "bpl/dataset.hpp"
#include "bpl/features.hpp"
#include "bpl/inference.hpp"
#include "bpl/parallel.hpp"
#include "bpl/population.hpp"
#include "bpl/random.hpp"

namespace bpl {

struct PreparedCorpus {
  std::vector<Claim> claims;
  std::vector<ClaimFeatures> features;
  RecallSampler recall;
  std::vector<std::size_t> self_index;  // position of each claim inside `recall`, or npos
};

// Every other claim in the split, recalled with its ground-truth binary
// verdict and a feature-derived availability weight. MultiFC "mixture" items
// have no binary verdict and are left out.
inline std::vector<RecallItem> build_recall_corpus(const std::vector<Claim>& claims,
                                                   const std::vector<ClaimFeatures>& features) {
  std::vector<RecallItem> out;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    const auto& c = claims[i];
    if (!c.label.binary && c.label.ternary == Ternary::Mixture) continue;
    const auto& f = features[i];
    out.push_back({c.text, c.target(), availability_weight(f.valence, f.repetition, f.recency), c.id});
  }
  return out;
}

inline PreparedCorpus prepare(std::vector<Claim> claims, const FeatureConfig& cfg) {
  PreparedCorpus p;
  p.features = extract_features(claims, cfg);
  p.recall = RecallSampler(build_recall_corpus(claims, p.features));
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < p.recall.items().size(); ++i) where.emplace(p.recall.items()[i].source_id, i);
  p.self_index.reserve(claims.size());
  for (const auto& c : claims) {
    auto it = where.find(c.id);
    p.self_index.push_back(it == where.end() ? RecallSampler::npos : it->second);
  }
  p.claims = std::move(claims);
  return p;
}

struct RunOptions {
  std::uint64_t seed = 42;
  unsigned threads = 1;
  LiteralBand band;
};

// One agent over every claim. The agent's own seed is replaced by a
// per-claim seed, so results do not depend on thread count.
inline std::vector<PosteriorResult> run_agent(const PreparedCorpus& p, const AgentProfile& agent,
                                              std::size_t agent_index, const RunOptions& opt) {
  validate(agent);
  std::vector<PosteriorResult> out(p.claims.size());
  parallel_for(p.claims.size(), opt.threads, [&](std::size_t i) {
    AgentProfile a = agent;
    a.seed = derive_seed(opt.seed, p.claims[i].id, agent_index);
    ChainInputs in;
    in.features = p.features[i];
    in.band = opt.band;
    out[i] = bpl_posterior(in, a, p.recall, p.self_index[i]);
  });
  return out;
}

struct PopulationRun {
  std::vector<AgentProfile> agents;
  std::vector<std::vector<PosteriorResult>> results;  // [claim][agent]
  std::vector<PopulationSummary> summaries;           // [claim]

  std::vector<double> beliefs_of(std::size_t agent) const {
    std::vector<double> b;
    b.reserve(results.size());
    for (const auto& r : results) b.push_back(r[agent].belief);
    return b;
  }
};

inline PopulationRun run_population(const PreparedCorpus& p, const std::vector<AgentProfile>& agents,
                                    const RunOptions& opt) {
  for (const auto& a : agents) validate(a);
  PopulationRun run;
  run.agents = agents;
  run.results.assign(p.claims.size(), std::vector<PosteriorResult>(agents.size()));
  run.summaries.resize(p.claims.size());
  parallel_for(p.claims.size(), opt.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < agents.size(); ++j) {
      AgentProfile a = agents[j];
      a.seed = derive_seed(opt.seed, p.claims[i].id, j);
      ChainInputs in;
      in.features = p.features[i];
      in.band = opt.band;
      run.results[i][j] = bpl_posterior(in, a, p.recall, p.self_index[i]);
    }
    if (agents.size() == kPopulationSize) run.summaries[i] = summarize(run.results[i]);
  });
  return run;
}

}  // namespace bpl
