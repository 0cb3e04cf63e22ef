#pragma once

// Run configuration: INI file sections [run] [features] [bpl] [grounding]
// [eval], overridable field by field from the command line. The whole struct
// is serialised into every output header.

#include <cstdint>
#include <optional>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "bpl/error.hpp"
#include "bpl/features.hpp"
#include "bpl/inference.hpp"

#ifndef BPL_DATA_DIR
#define BPL_DATA_DIR "data"
#endif

namespace bpl {

inline std::string default_data_path(const std::string& name) { return std::string(BPL_DATA_DIR) + "/" + name; }

struct RunConfig {
  // [run]
  std::uint64_t seed = 42;
  unsigned threads = 1;
  std::string kind = "liar";
  std::optional<std::size_t> sample;

  // [features]
  std::string lexicon = default_data_path("valence_lexicon.tsv");
  std::string markers = default_data_path("attribution_markers.txt");
  std::string credibility = default_data_path("credibility.tsv");
  std::string label_map = default_data_path("multifc_label_map.tsv");
  std::string recency;  // optional claim-id -> rho sidecar
  double multifc_length_constant = 200.0;
  double liar_gamma_divisor = 20.0;
  double band_lo = 0.05;
  double band_hi = 0.95;

  // [bpl]
  int k = 1;
  double beta = 1.0;
  int sample_size = 25;
  double alpha = 1.0;
  double lambda_mix = 0.5;
  bool depth_cap = false;

  // [grounding]
  std::string mode = "feature";  // feature | stub | http
  std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
  std::string model;
  std::string api_key_env = "BPL_API_KEY";
  std::string prompts = default_data_path("prompts");
  std::string stub_corpus = default_data_path("stub_recall_corpus.tsv");
  std::string cache;
  unsigned max_in_flight = 4;
  int max_retries = 3;
  int timeout_seconds = 60;

  // [eval]
  int folds = 5;
  int shuffles = 1000;
  double l2 = 1.0;

  AgentProfile agent() const {
    AgentProfile a;
    a.k = k;
    a.beta = beta;
    a.sample_size = sample_size;
    a.alpha = alpha;
    a.lambda_mix = lambda_mix;
    a.apply_depth_cap = depth_cap;
    a.seed = seed;
    return a;
  }

  LiteralBand band() const { return {band_lo, band_hi}; }
};

inline void load_ini(const std::string& path, RunConfig& c) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(path, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw IoError("cannot read config " + path + ": " + e.message());
  }
  auto get = [&](const char* key, auto& field) {
    using T = std::decay_t<decltype(field)>;
    try {
      // get_optional<T> swallows conversion failures, so test presence first.
      if (pt.get_child_optional(key)) field = pt.get<T>(key);
    } catch (const boost::property_tree::ptree_bad_data&) {
      throw ParameterError("config " + path + ": bad value for " + key);
    }
  };
  get("run.seed", c.seed);
  get("run.threads", c.threads);
  get("run.kind", c.kind);
  std::size_t n = 0;
  if (pt.get_optional<std::string>("run.sample")) {
    get("run.sample", n);
    c.sample = n;
  }
  get("features.lexicon", c.lexicon);
  get("features.markers", c.markers);
  get("features.credibility", c.credibility);
  get("features.label_map", c.label_map);
  get("features.recency", c.recency);
  get("features.multifc_length_constant", c.multifc_length_constant);
  get("features.liar_gamma_divisor", c.liar_gamma_divisor);
  get("features.band_lo", c.band_lo);
  get("features.band_hi", c.band_hi);
  get("bpl.k", c.k);
  get("bpl.beta", c.beta);
  get("bpl.N", c.sample_size);
  get("bpl.alpha", c.alpha);
  get("bpl.lambda", c.lambda_mix);
  get("bpl.depth_cap", c.depth_cap);
  get("grounding.mode", c.mode);
  get("grounding.endpoint", c.endpoint);
  get("grounding.model", c.model);
  get("grounding.api_key_env", c.api_key_env);
  get("grounding.prompts", c.prompts);
  get("grounding.stub_corpus", c.stub_corpus);
  get("grounding.cache", c.cache);
  get("grounding.max_in_flight", c.max_in_flight);
  get("grounding.max_retries", c.max_retries);
  get("grounding.timeout", c.timeout_seconds);
  get("eval.folds", c.folds);
  get("eval.shuffles", c.shuffles);
  get("eval.l2", c.l2);
}

// Rejects bad values before any work starts.
inline void validate(const RunConfig& c) {
  validate(c.agent());
  if (c.kind != "liar" && c.kind != "multifc") throw ParameterError("kind must be liar or multifc, got '" + c.kind + "'");
  if (c.mode != "feature" && c.mode != "stub" && c.mode != "http")
    throw ParameterError("mode must be feature, stub or http, got '" + c.mode + "'");
  if (!(c.band_lo > 0.0 && c.band_lo < c.band_hi && c.band_hi < 1.0))
    throw ParameterError("literal band must satisfy 0 < lo < hi < 1");
  if (c.folds < 2) throw ParameterError("folds must be at least 2");
  if (c.shuffles < 1) throw ParameterError("shuffles must be positive");
  if (c.threads < 1) throw ParameterError("threads must be positive");
  if (c.max_in_flight < 1) throw ParameterError("max_in_flight must be positive");
}

inline FeatureConfig feature_config(const RunConfig& c) {
  FeatureConfig f;
  f.lexicon = ValenceLexicon::load(c.lexicon);
  f.markers = load_markers(c.markers);
  f.credibility = CredibilityTable::load(c.credibility);
  f.multifc_length_constant = c.multifc_length_constant;
  f.liar_gamma_divisor = c.liar_gamma_divisor;
  if (!c.recency.empty()) {
    std::ifstream in(c.recency);
    if (!in) throw IoError("cannot open recency file: " + c.recency);
    f.recency = parse_recency(in);
  }
  return f;
}

// Credentials are deliberately absent: only the variable name is recorded.
inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"run", {{"seed", c.seed}, {"threads", c.threads}, {"kind", c.kind}}},
       {"features",
        {{"lexicon", c.lexicon},
         {"markers", c.markers},
         {"credibility", c.credibility},
         {"label_map", c.label_map},
         {"recency", c.recency},
         {"multifc_length_constant", c.multifc_length_constant},
         {"liar_gamma_divisor", c.liar_gamma_divisor},
         {"band_lo", c.band_lo},
         {"band_hi", c.band_hi}}},
       {"bpl",
        {{"k", c.k},
         {"beta", c.beta},
         {"N", c.sample_size},
         {"alpha", c.alpha},
         {"lambda", c.lambda_mix},
         {"depth_cap", c.depth_cap}}},
       {"grounding",
        {{"mode", c.mode},
         {"endpoint", c.endpoint},
         {"model", c.model},
         {"api_key_env", c.api_key_env},
         {"prompts", c.prompts},
         {"stub_corpus", c.stub_corpus},
         {"cache", c.cache},
         {"max_in_flight", c.max_in_flight},
         {"max_retries", c.max_retries},
         {"timeout", c.timeout_seconds}}},
       {"eval", {{"folds", c.folds}, {"shuffles", c.shuffles}, {"l2", c.l2}}}};
  j["run"]["sample"] = c.sample ? nlohmann::json(*c.sample) : nlohmann::json();
}

}  // namespace bpl
