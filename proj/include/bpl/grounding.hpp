#pragma once

// Generative-model grounding: salience ratings, verbal schema priors,
// simulated recall and literal plausibility, behind one client interface with
// strict response validation and a persistent response cache.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "bpl/dataset.hpp"
#include "bpl/error.hpp"
#include "bpl/features.hpp"
#include "bpl/inference.hpp"
#include "bpl/random.hpp"
#include "bpl/text.hpp"

namespace bpl {

// ---------------------------------------------------------------------------
// Errors

class GroundingError : public Error {
 public:
  using Error::Error;
};

class MalformedResponse : public GroundingError {
 public:
  MalformedResponse(const std::string& reason, std::string raw)
      : GroundingError("malformed response: " + reason), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class RateLimited : public GroundingError {
 public:
  using GroundingError::GroundingError;
};

class TransportError : public GroundingError {
 public:
  using GroundingError::GroundingError;
};

// ---------------------------------------------------------------------------
// Values

struct SalienceProfile {
  double emotional_intensity = 0.0;
  double novelty = 0.0;
  double memorability = 0.0;
  double sharability = 0.0;

  friend bool operator==(const SalienceProfile&, const SalienceProfile&) = default;
};

struct Schema {
  std::string text;
  double p_true = 0.5;
  double confidence = 0.0;

  friend bool operator==(const Schema&, const Schema&) = default;
};

inline double phi_from_salience(const SalienceProfile& s) {
  return 1.0 + s.emotional_intensity + s.novelty + s.memorability + s.sharability;
}

inline constexpr double kMinSchemaConfidence = 0.01;

inline CompressedPrior schema_prior(const Schema& schema, double beta) {
  return compress_prior(schema.p_true, beta * std::max(kMinSchemaConfidence, schema.confidence), 1.0);
}

// ---------------------------------------------------------------------------
// Strict response parsing. Every check rejects; nothing is clamped or repaired.

namespace detail {

inline nlohmann::json parse_object(const std::string& raw) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    throw MalformedResponse("not valid JSON", raw);
  }
  if (!j.is_object()) throw MalformedResponse("expected a JSON object", raw);
  return j;
}

inline double unit_number(const nlohmann::json& j, const char* key, const std::string& raw) {
  auto it = j.find(key);
  if (it == j.end()) throw MalformedResponse(std::string("missing field '") + key + "'", raw);
  if (!it->is_number()) throw MalformedResponse(std::string("field '") + key + "' is not a number", raw);
  const double v = it->get<double>();
  if (!(v >= 0.0 && v <= 1.0))
    throw MalformedResponse(std::string("field '") + key + "' = " + std::to_string(v) + " outside [0, 1]", raw);
  return v;
}

inline SalienceProfile salience_from(const nlohmann::json& j, const std::string& raw) {
  if (!j.is_object()) throw MalformedResponse("salience must be an object", raw);
  return {unit_number(j, "emotional_intensity", raw), unit_number(j, "novelty", raw), unit_number(j, "memorability", raw),
          unit_number(j, "sharability", raw)};
}

}  // namespace detail

inline SalienceProfile parse_salience(const std::string& raw) {
  return detail::salience_from(detail::parse_object(raw), raw);
}

inline Schema parse_schema(const std::string& raw) {
  const auto j = detail::parse_object(raw);
  Schema s;
  auto it = j.find("schema");
  if (it == j.end() || !it->is_string()) throw MalformedResponse("missing string field 'schema'", raw);
  s.text = it->get<std::string>();
  if (text::trim(s.text).empty()) throw MalformedResponse("empty schema text", raw);
  s.p_true = detail::unit_number(j, "p_true", raw);
  s.confidence = detail::unit_number(j, "confidence", raw);
  return s;
}

struct RecalledClaim {
  std::string text;
  int veracity = 0;
  SalienceProfile salience;

  friend bool operator==(const RecalledClaim&, const RecalledClaim&) = default;
};

inline std::vector<RecalledClaim> parse_recall(const std::string& raw, std::size_t expected) {
  const auto j = detail::parse_object(raw);
  auto it = j.find("items");
  if (it == j.end() || !it->is_array()) throw MalformedResponse("missing array field 'items'", raw);
  if (it->size() != expected)
    throw MalformedResponse("expected " + std::to_string(expected) + " recall items, got " + std::to_string(it->size()),
                            raw);
  std::vector<RecalledClaim> out;
  for (const auto& item : *it) {
    if (!item.is_object()) throw MalformedResponse("recall item is not an object", raw);
    RecalledClaim r;
    auto t = item.find("text");
    if (t == item.end() || !t->is_string() || text::trim(t->get<std::string>()).empty())
      throw MalformedResponse("recall item without text", raw);
    r.text = t->get<std::string>();
    auto v = item.find("veracity");
    if (v == item.end() || !v->is_string()) throw MalformedResponse("recall item without veracity", raw);
    const auto label = text::lower(v->get<std::string>());
    if (label == "true") {
      r.veracity = 1;
    } else if (label == "false") {
      r.veracity = 0;
    } else {
      throw MalformedResponse("recall veracity must be \"true\" or \"false\", got \"" + v->get<std::string>() + "\"", raw);
    }
    auto s = item.find("salience");
    if (s == item.end()) throw MalformedResponse("recall item without salience", raw);
    r.salience = detail::salience_from(*s, raw);
    out.push_back(std::move(r));
  }
  return out;
}

inline double parse_plausibility(const std::string& raw) {
  return detail::unit_number(detail::parse_object(raw), "plausibility", raw);
}

inline void to_json(nlohmann::json& j, const SalienceProfile& s) {
  j = {{"emotional_intensity", s.emotional_intensity},
       {"novelty", s.novelty},
       {"memorability", s.memorability},
       {"sharability", s.sharability}};
}

inline void to_json(nlohmann::json& j, const Schema& s) {
  j = {{"schema", s.text}, {"p_true", s.p_true}, {"confidence", s.confidence}};
}

inline void to_json(nlohmann::json& j, const RecalledClaim& r) {
  j = {{"text", r.text}, {"veracity", r.veracity == 1 ? "true" : "false"}, {"salience", r.salience}};
}

// ---------------------------------------------------------------------------
// Prompt templates

struct PromptTemplates {
  std::string salience;
  std::string schema;
  std::string recall;
  std::string plausibility;

  static std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open prompt template: " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static PromptTemplates load(const std::string& dir) {
    return {read_file(dir + "/salience.txt"), read_file(dir + "/schema.txt"), read_file(dir + "/recall.txt"),
            read_file(dir + "/plausibility.txt")};
  }
};

// Replaces {name} placeholders; unknown placeholders are left as written.
inline std::string render_template(const std::string& tmpl, const std::map<std::string, std::string>& fields) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string::npos) {
        auto it = fields.find(tmpl.substr(i + 1, close - i - 1));
        if (it != fields.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Response cache

struct CacheRecord {
  std::string key;
  std::string operation;
  std::string request;
  std::string raw;
  nlohmann::json parsed;
  std::string timestamp;
};

// JSON-lines file of (key, operation, request, raw, parsed, timestamp).
// Entries are only ever appended; lookups are served from memory.
class ResponseCache {
 public:
  ResponseCache() = default;

  explicit ResponseCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
        CacheRecord r{j.at("key"), j.at("operation"), j.at("request"), j.at("raw"), j.at("parsed"), j.value("timestamp", "")};
        entries_.emplace(r.key, std::move(r));
      } catch (const nlohmann::json::exception& e) {
        throw Error("cache " + path_ + " line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }

  // The backend identity keeps answers from different models (or stub seeds)
  // apart when they share a cache file.
  static std::string make_key(const std::string& backend, const std::string& operation, const std::string& request) {
    return hex64(fnv1a64(request, fnv1a64(backend + "\n" + operation + "\n")));
  }

  std::optional<CacheRecord> find(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void insert(CacheRecord r) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (entries_.count(r.key)) return;
    if (r.timestamp.empty()) r.timestamp = now_utc();
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::app);
      if (!out) throw IoError("cannot append to cache: " + path_);
      const nlohmann::json j = {{"key", r.key},   {"operation", r.operation}, {"request", r.request},
                                {"raw", r.raw},   {"parsed", r.parsed},       {"timestamp", r.timestamp}};
      out << j.dump() << '\n';
    }
    entries_.emplace(r.key, std::move(r));
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
  }

  const std::string& path() const { return path_; }

 private:
  static std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  std::string path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, CacheRecord> entries_;
};

// ---------------------------------------------------------------------------
// Client interface

struct GroundingRequest {
  std::string operation;  // salience | schema | recall | plausibility
  std::string prompt;     // rendered template
  std::map<std::string, std::string> fields;
};

// Renders the operation's template, consults the cache, asks the backend on a
// miss, validates the response and records it. Backends only implement
// complete().
class GroundingClient {
 public:
  GroundingClient(PromptTemplates templates, ResponseCache* cache) : templates_(std::move(templates)), cache_(cache) {}
  virtual ~GroundingClient() = default;

  SalienceProfile rate_salience(const Claim& claim) {
    auto req = make_request("salience", templates_.salience, fields_for(claim));
    return detail::salience_from(fetch(req, [](const std::string& raw) { return nlohmann::json(parse_salience(raw)); }),
                                 req.prompt);
  }

  Schema make_schema(const std::string& source, const std::string& topic) {
    auto req = make_request("schema", templates_.schema, {{"source", source}, {"topic", topic}});
    return parse_schema(fetch(req, [](const std::string& raw) { return nlohmann::json(parse_schema(raw)); }).dump());
  }

  std::vector<RecalledClaim> simulate_recall(const Claim& claim, std::size_t n) {
    auto fields = fields_for(claim);
    fields["n"] = std::to_string(n);
    auto req = make_request("recall", templates_.recall, fields);
    const auto parsed = fetch(req, [n](const std::string& raw) {
      nlohmann::json items = nlohmann::json::array();
      for (const auto& r : parse_recall(raw, n)) items.push_back(r);
      return nlohmann::json{{"items", items}};
    });
    return parse_recall(parsed.dump(), n);
  }

  double plausibility(const Claim& claim) {
    auto req = make_request("plausibility", templates_.plausibility, fields_for(claim));
    return parse_plausibility(
        fetch(req, [](const std::string& raw) { return nlohmann::json{{"plausibility", parse_plausibility(raw)}}; })
            .dump());
  }

  std::size_t backend_calls() const { return backend_calls_; }

  // Stable name of whatever answers the requests, e.g. "stub:42".
  virtual std::string backend_id() const = 0;

  static std::string source_of(const Claim& c) {
    if (c.speaker) return *c.speaker;
    if (c.domain) return *c.domain;
    return "unknown";
  }

  static std::string topic_of(const Claim& c) {
    if (c.dataset == DatasetKind::MultiFC) return c.domain.value_or("general");
    return c.topic.value_or("general");
  }

 protected:
  // Raw text of the model's answer for one request.
  virtual std::string complete(const GroundingRequest& request) = 0;

 private:
  static std::map<std::string, std::string> fields_for(const Claim& c) {
    return {{"claim", c.text}, {"source", source_of(c)}, {"topic", topic_of(c)}};
  }

  static GroundingRequest make_request(const std::string& op, const std::string& tmpl,
                                       std::map<std::string, std::string> fields) {
    return {op, render_template(tmpl, fields), std::move(fields)};
  }

  template <typename Parse>
  nlohmann::json fetch(const GroundingRequest& req, Parse parse) {
    const auto key = ResponseCache::make_key(backend_id(), req.operation, req.prompt);
    if (cache_) {
      if (auto hit = cache_->find(key)) return hit->parsed;
    }
    const std::string raw = complete(req);
    {
      std::lock_guard<std::mutex> lock(calls_mutex_);
      ++backend_calls_;
    }
    nlohmann::json parsed = parse(raw);
    if (cache_) cache_->insert({key, req.operation, req.prompt, raw, parsed, ""});
    return parsed;
  }

  PromptTemplates templates_;
  ResponseCache* cache_;
  std::mutex calls_mutex_;
  std::size_t backend_calls_ = 0;
};

// ---------------------------------------------------------------------------
// Offline stub

struct StubRecallEntry {
  std::string text;
  int veracity = 0;
};

inline std::vector<StubRecallEntry> load_stub_recall_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stub recall corpus: " + path);
  std::vector<StubRecallEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    text::strip_cr(line);
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = text::split(t, '\t');
    if (f.size() < 2) throw Error("stub recall corpus: expected text and veracity");
    const auto v = text::lower(text::trim(f[1]));
    if (v != "true" && v != "false") throw Error("stub recall corpus: veracity must be true or false");
    out.push_back({f[0], v == "true" ? 1 : 0});
  }
  if (out.empty()) throw Error("stub recall corpus is empty");
  return out;
}

// Deterministic stand-in for a language model. Every number is a function of
// (operation, input text, seed). Emotional intensity follows lexicon valence,
// recall leans false for high-valence claims, and plausibility falls with
// valence, so the hybrid pipeline has structure to recover offline.
class StubClient : public GroundingClient {
 public:
  StubClient(std::uint64_t seed, PromptTemplates templates, std::vector<StubRecallEntry> recall_corpus,
             ResponseCache* cache = nullptr, ValenceLexicon lexicon = ValenceLexicon::defaults())
      : GroundingClient(std::move(templates), cache),
        seed_(seed),
        lexicon_(std::move(lexicon)),
        corpus_(std::move(recall_corpus)) {
    for (std::size_t i = 0; i < corpus_.size(); ++i) (corpus_[i].veracity == 1 ? true_idx_ : false_idx_).push_back(i);
    if (true_idx_.empty() || false_idx_.empty()) throw Error("stub recall corpus needs both true and false entries");
  }

  std::string backend_id() const override { return "stub:" + std::to_string(seed_); }

 protected:
  std::string complete(const GroundingRequest& req) override {
    const auto field = [&](const char* k) {
      auto it = req.fields.find(k);
      return it == req.fields.end() ? std::string() : it->second;
    };
    if (req.operation == "schema") return schema(field("source"), field("topic"));
    Rng rng(mix_seed(seed_, fnv1a64(field("claim"), fnv1a64(req.operation))));
    const double nu = valence(field("claim"), lexicon_);
    if (req.operation == "salience") return salience(rng, nu).dump();
    if (req.operation == "plausibility") {
      const double p = std::clamp(0.7 - 0.35 * nu + rng.uniform(-0.15, 0.15), 0.0, 1.0);
      return nlohmann::json{{"plausibility", round4(p)}}.dump();
    }
    if (req.operation == "recall") return recall(rng, nu, std::stoul(field("n"))).dump();
    throw GroundingError("stub does not know operation '" + req.operation + "'");
  }

 private:
  static double round4(double v) { return std::round(v * 1e4) / 1e4; }

  static nlohmann::json salience(Rng& rng, double nu) {
    return {{"emotional_intensity", round4(std::clamp(0.1 + 0.7 * nu + rng.uniform(0.0, 0.2), 0.0, 1.0))},
            {"novelty", round4(rng.uniform())},
            {"memorability", round4(std::clamp(0.2 + 0.3 * nu + rng.uniform(0.0, 0.5), 0.0, 1.0))},
            {"sharability", round4(rng.uniform(0.0, 0.8))}};
  }

  nlohmann::json recall(Rng& rng, double nu, std::size_t n) const {
    const double false_share = 0.3 + 0.4 * nu;
    nlohmann::json items = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) {
      const bool is_false = rng.bernoulli(false_share);
      const auto& pool = is_false ? false_idx_ : true_idx_;
      const auto& e = corpus_[pool[rng.below(pool.size())]];
      items.push_back({{"text", e.text},
                       {"veracity", e.veracity == 1 ? "true" : "false"},
                       {"salience", salience(rng, valence(e.text, lexicon_))}});
    }
    return {{"items", items}};
  }

  std::string schema(const std::string& source, const std::string& topic) const {
    Rng rng(mix_seed(seed_, fnv1a64(source + "\x1f" + topic, fnv1a64("schema"))));
    const double p = round4(rng.uniform(0.2, 0.8));
    const double conf = round4(rng.uniform(0.3, 0.9));
    const std::string lean = p >= 0.5 ? "mostly accurate" : "often inaccurate";
    return nlohmann::json{{"schema", "Statements from " + source + " about " + topic + " are " + lean + "."},
                          {"p_true", p},
                          {"confidence", conf}}
        .dump();
  }

  std::uint64_t seed_;
  ValenceLexicon lexicon_;
  std::vector<StubRecallEntry> corpus_;
  std::vector<std::size_t> true_idx_, false_idx_;
};

}  // namespace bpl
