#pragma once

// The nine-agent population and its per-claim summary statistics.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bpl/error.hpp"
#include "bpl/inference.hpp"

namespace bpl {

inline constexpr std::size_t kPopulationSize = 9;
// Position of the (k=1, beta=1, N=25) agent in canonical order.
inline constexpr std::size_t kFullAgentIndex = 4;

// k in {0,1,2} (outer) x (beta, N) in {(0.2,5), (1,25), (50,500)} (inner).
inline std::vector<AgentProfile> canonical_population(std::uint64_t seed, const AgentProfile& base = {}) {
  static constexpr std::array<std::pair<double, std::size_t>, 3> bounds = {{{0.2, 5}, {1.0, 25}, {50.0, 500}}};
  std::vector<AgentProfile> out;
  for (int k = 0; k <= 2; ++k) {
    for (const auto& [beta, n] : bounds) {
      AgentProfile a = base;
      a.k = k;
      a.beta = beta;
      a.sample_size = n;
      a.seed = mix_seed(seed, out.size());
      out.push_back(a);
    }
  }
  return out;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population variance (divides by M).
inline double population_variance(const std::vector<double>& v) {
  if (v.empty()) throw ParameterError("variance of an empty list");
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

inline double disagreement(const std::vector<double>& beliefs) {
  if (beliefs.empty()) throw ParameterError("disagreement needs at least one belief");
  return population_variance(beliefs);
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw ParameterError("median of an empty list");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct PopulationSummary {
  double mean_belief = 0.0;
  double disagreement = 0.0;
  double min_belief = 0.0;
  double max_belief = 0.0;
  double median_belief = 0.0;
  double mean_susceptibility = 0.0;
  double susceptibility_variance = 0.0;
  double mean_loss = 0.0;
  double fraction_believing = 0.0;

  static std::vector<std::string> names() {
    return {"mean_belief",         "disagreement",            "min_belief", "max_belief",
            "median_belief",       "mean_susceptibility",     "susceptibility_variance",
            "mean_loss",           "fraction_believing"};
  }

  std::vector<double> values() const {
    return {mean_belief,         disagreement,            min_belief, max_belief, median_belief,
            mean_susceptibility, susceptibility_variance, mean_loss,  fraction_believing};
  }
};

inline PopulationSummary summarize(const std::vector<PosteriorResult>& results) {
  if (results.size() != kPopulationSize)
    throw ParameterError("population summary expects " + std::to_string(kPopulationSize) + " results, got " +
                         std::to_string(results.size()));
  std::vector<double> b, s, l;
  for (const auto& r : results) {
    b.push_back(r.belief);
    s.push_back(r.susceptibility);
    l.push_back(r.compression_loss);
  }
  PopulationSummary p;
  p.mean_belief = mean_of(b);
  p.disagreement = population_variance(b);
  p.min_belief = *std::min_element(b.begin(), b.end());
  p.max_belief = *std::max_element(b.begin(), b.end());
  p.median_belief = median_of(b);
  p.mean_susceptibility = mean_of(s);
  p.susceptibility_variance = population_variance(s);
  p.mean_loss = mean_of(l);
  p.fraction_believing = static_cast<double>(std::count_if(b.begin(), b.end(), [](double x) { return x > 0.5; })) /
                         static_cast<double>(b.size());
  return p;
}

inline void to_json(nlohmann::json& j, const PopulationSummary& p) {
  j = nlohmann::json::object();
  const auto names = PopulationSummary::names();
  const auto vals = p.values();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = vals[i];
}

}  // namespace bpl
