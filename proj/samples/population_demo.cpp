// Runs the nine-agent population over a handful of hand-written claims and
// prints each agent's belief alongside the population summary.
//
//   bpl_sample

#include <iomanip>
#include <iostream>

#include "bpl/bpl.hpp"

int main() {
  using namespace bpl;

  const auto claim = [](std::string id, std::string text, std::string speaker, SpeakerHistory h, bool truth) {
    Claim c;
    c.id = std::move(id);
    c.text = std::move(text);
    c.speaker = std::move(speaker);
    c.history = h;
    c.raw_label = truth ? "true" : "false";
    c.label = *map_liar_label(c.raw_label);
    return c;
  };
  // history: barely_true, false, half_true, mostly_true, pants_fire
  std::vector<Claim> claims = {
      claim("c1", "The city budget grew by two percent last year", "council", {1, 0, 2, 9, 0}, true),
      claim("c2", "Officials say the shocking crisis will destroy every school", "blogger", {3, 8, 1, 0, 6}, false),
      claim("c3", "Everyone knows the senator believes the report was faked", "pundit", {2, 3, 3, 2, 1}, false),
      claim("c4", "Unemployment fell in the third quarter", "agency", {0, 1, 2, 12, 0}, true),
  };

  const auto corpus = prepare(claims, FeatureConfig{});
  const auto agents = canonical_population(7);
  const auto run = run_population(corpus, agents, RunOptions{});

  std::cout << std::fixed << std::setprecision(3);
  std::cout << "agent             ";
  for (const auto& c : corpus.claims) std::cout << std::setw(8) << c.id;
  std::cout << "\n";
  for (std::size_t a = 0; a < agents.size(); ++a) {
    std::cout << "k=" << agents[a].k << " beta=" << std::setw(4) << std::setprecision(1) << agents[a].beta
              << " N=" << std::setw(3) << agents[a].sample_size << std::setprecision(3) << " ";
    for (std::size_t i = 0; i < corpus.claims.size(); ++i) std::cout << std::setw(8) << run.results[i][a].belief;
    std::cout << "\n";
  }

  std::cout << "\n";
  for (std::size_t i = 0; i < corpus.claims.size(); ++i) {
    const auto& f = corpus.features[i];
    const auto& s = run.summaries[i];
    std::cout << corpus.claims[i].id << "  depth " << f.depth << "  prior " << f.prior_true << "  valence "
              << f.valence << "  mean belief " << s.mean_belief << "  disagreement " << s.disagreement << "\n";
  }
}
