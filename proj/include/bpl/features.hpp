#pragma once

// Per-claim input symbols: valence, epistemic depth, repetition, recency,
// speaker prior and source credibility.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bpl/dataset.hpp"
#include "bpl/error.hpp"
#include "bpl/text.hpp"

namespace bpl {

struct ClaimFeatures {
  double valence = 0.0;
  int depth = 0;
  std::size_t marker_count = 0;  // before the depth cap
  double repetition = 0.0;
  double recency = 0.0;
  double prior_true = 0.5;
  double credibility = 0.5;

  friend bool operator==(const ClaimFeatures&, const ClaimFeatures&) = default;
};

inline constexpr int kMaxDepth = 2;

namespace detail {

// Splits each phrase into word tokens; phrases that tokenise to nothing are dropped.
inline std::vector<std::vector<std::string>> tokenise_phrases(const std::vector<std::string>& phrases) {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : phrases) {
    auto toks = text::word_tokens(p);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return out;
}

// Non-overlapping left-to-right matches, longest phrase first at each position.
// Returns the index (into `phrases`) of every match.
inline std::vector<std::size_t> match_phrases(const std::vector<std::string>& tokens,
                                              const std::vector<std::vector<std::string>>& phrases) {
  std::vector<std::size_t> hits;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (std::size_t p = 0; p < phrases.size(); ++p) {
      const auto& ph = phrases[p];
      if (i + ph.size() > tokens.size()) continue;
      if (std::equal(ph.begin(), ph.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        hits.push_back(p);
        i += ph.size();
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return hits;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Valence lexicon

class ValenceLexicon {
 public:
  ValenceLexicon() = default;

  void add(std::string_view term, double weight) {
    if (!(weight > 0.0 && weight <= 1.0))
      throw ParameterError("lexicon weight for '" + std::string(term) + "' must lie in (0, 1]");
    auto toks = text::word_tokens(term);
    if (toks.empty()) throw ParameterError("lexicon term '" + std::string(term) + "' has no word characters");
    std::string key;
    for (const auto& t : toks) key += (key.empty() ? "" : " ") + t;
    for (auto& e : entries_) {
      if (e.term == key) {
        e.weight = weight;
        rebuild();
        return;
      }
    }
    entries_.push_back({key, weight});
    rebuild();
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double weight(std::string_view term) const {
    const auto key = text::lower(term);
    for (const auto& e : entries_)
      if (e.term == key) return e.weight;
    return 0.0;
  }

  std::vector<std::string> terms() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.term);
    return out;
  }

  // Sum of weights over every matched occurrence.
  double score(std::string_view text) const {
    const auto tokens = text::word_tokens(text);
    double sum = 0.0;
    for (auto idx : detail::match_phrases(tokens, phrases_)) sum += weights_[idx];
    return sum;
  }

  // TSV: term [<TAB> weight]; weight defaults to 1.0; '#' starts a comment.
  static ValenceLexicon parse(std::istream& in) {
    ValenceLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      text::strip_cr(line);
      const auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto f = text::split(t, '\t');
      double w = 1.0;
      if (f.size() > 1 && !text::trim(f[1]).empty()) {
        try {
          w = std::stod(std::string(text::trim(f[1])));
        } catch (...) {
          throw Error("lexicon line " + std::to_string(line_no) + ": bad weight '" + f[1] + "'");
        }
      }
      lex.add(f[0], w);
    }
    if (lex.empty()) throw Error("valence lexicon is empty");
    return lex;
  }

  static ValenceLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open valence lexicon: " + path);
    return parse(in);
  }

  static ValenceLexicon defaults() {
    ValenceLexicon lex;
    for (const char* t : {"shocking", "outrage", "scandal", "disaster", "crisis", "corrupt", "fraud", "lies",
                          "terror", "attack", "destroy", "threat", "fear", "dangerous", "catastrophe", "horrific",
                          "evil", "panic", "chaos", "collapse", "illegal", "rigged", "radical"})
      lex.add(t, 1.0);
    return lex;
  }

 private:
  struct Entry {
    std::string term;
    double weight;
  };

  void rebuild() {
    std::vector<std::size_t> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return text::split(entries_[a].term, ' ').size() > text::split(entries_[b].term, ' ').size();
    });
    phrases_.clear();
    weights_.clear();
    for (auto i : order) {
      phrases_.push_back(text::split(entries_[i].term, ' '));
      weights_.push_back(entries_[i].weight);
    }
  }

  std::vector<Entry> entries_;
  std::vector<std::vector<std::string>> phrases_;
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Credibility table

class CredibilityTable {
 public:
  explicit CredibilityTable(double default_gamma = 0.5) { set_default(default_gamma); }

  void set_default(double g) {
    if (!(g >= 0.0 && g <= 1.0)) throw ParameterError("default credibility must lie in [0, 1]");
    default_ = g;
  }

  void set(std::string_view domain, double g) {
    if (!(g >= 0.0 && g <= 1.0))
      throw ParameterError("credibility for '" + std::string(domain) + "' must lie in [0, 1]");
    entries_[text::lower(text::trim(domain))] = g;
  }

  double default_gamma() const { return default_; }
  std::size_t size() const { return entries_.size(); }

  double lookup(std::string_view domain) const {
    auto it = entries_.find(text::lower(text::trim(domain)));
    return it == entries_.end() ? default_ : it->second;
  }

  // TSV: domain <TAB> gamma. A "*" domain sets the default.
  static CredibilityTable parse(std::istream& in, double default_gamma = 0.5) {
    CredibilityTable t(default_gamma);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      text::strip_cr(line);
      const auto s = text::trim(line);
      if (s.empty() || s.front() == '#') continue;
      const auto f = text::split(s, '\t');
      if (f.size() < 2) throw Error("credibility line " + std::to_string(line_no) + ": expected 2 fields");
      double g = 0.0;
      try {
        g = std::stod(std::string(text::trim(f[1])));
      } catch (...) {
        throw Error("credibility line " + std::to_string(line_no) + ": bad value '" + f[1] + "'");
      }
      if (text::trim(f[0]) == "*") {
        t.set_default(g);
      } else {
        t.set(f[0], g);
      }
    }
    return t;
  }

  static CredibilityTable load(const std::string& path, double default_gamma = 0.5) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open credibility table: " + path);
    return parse(in, default_gamma);
  }

 private:
  std::map<std::string, double> entries_;
  double default_ = 0.5;
};

// ---------------------------------------------------------------------------
// Attribution markers

inline std::vector<std::string> default_attribution_markers() {
  return {"says",    "said",   "claims",  "claimed", "believes", "according to", "reports",
          "alleges", "everyone knows", "thinks", "say", "claim", "believe", "think",
          "report",  "reported", "alleged", "allege"};
}

inline std::vector<std::string> parse_markers(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    text::strip_cr(line);
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(text::lower(t));
  }
  if (out.empty()) throw Error("attribution marker list is empty");
  return out;
}

inline std::vector<std::string> load_markers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open marker list: " + path);
  return parse_markers(in);
}

// Occurrences of attribution markers, whole-word and case-insensitive.
// Overlapping candidates resolve to the longest marker.
inline std::size_t attribution_marker_count(std::string_view text, const std::vector<std::string>& markers) {
  if (markers.empty()) throw ParameterError("attribution marker list is empty");
  return detail::match_phrases(text::word_tokens(text), detail::tokenise_phrases(markers)).size();
}

inline int epistemic_depth(std::string_view text, const std::vector<std::string>& markers) {
  return static_cast<int>(std::min<std::size_t>(kMaxDepth, attribution_marker_count(text, markers)));
}

inline double valence(std::string_view text, const ValenceLexicon& lexicon) {
  return std::min(1.0, lexicon.score(text) / 2.0);
}

// ---------------------------------------------------------------------------
// Claim-level proxies

struct FeatureConfig {
  ValenceLexicon lexicon = ValenceLexicon::defaults();
  std::vector<std::string> markers = default_attribution_markers();
  double multifc_length_constant = 200.0;
  double liar_gamma_divisor = 20.0;
  CredibilityTable credibility{0.5};
  std::map<std::string, double> recency;  // claim id -> rho, from an optional sidecar
};

inline double repetition(const Claim& claim, double multifc_length_constant = 200.0) {
  if (claim.dataset == DatasetKind::Liar) {
    return claim.history ? static_cast<double>(claim.history->false_group()) : 0.0;
  }
  const auto words = text::word_count(claim.text);
  if (words == 0) return 0.0;
  return std::max(0.0, std::round(multifc_length_constant / static_cast<double>(words)) - 1.0);
}

inline double speaker_prior(const SpeakerHistory& h) {
  return (static_cast<double>(h.half_true) + static_cast<double>(h.mostly_true) + 1.0) /
         (static_cast<double>(h.total()) + 2.0);
}

inline double speaker_prior(const std::optional<SpeakerHistory>& h) { return h ? speaker_prior(*h) : 0.5; }

inline double source_credibility(const Claim& claim, const CredibilityTable& table, double liar_gamma_divisor = 20.0) {
  if (claim.dataset == DatasetKind::MultiFC) return claim.domain ? table.lookup(*claim.domain) : table.default_gamma();
  if (!claim.history) return 0.0;
  return std::min(1.0, static_cast<double>(claim.history->total()) / liar_gamma_divisor);
}

// Sidecar: claim id <TAB> rho in [0,1].
inline std::map<std::string, double> parse_recency(std::istream& in) {
  std::map<std::string, double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    text::strip_cr(line);
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = text::split(t, '\t');
    double v = -1.0;
    if (f.size() >= 2) {
      try {
        v = std::stod(std::string(text::trim(f[1])));
      } catch (...) {
      }
    }
    if (!(v >= 0.0 && v <= 1.0)) throw Error("recency line " + std::to_string(line_no) + ": expected id and value in [0,1]");
    out[std::string(text::trim(f[0]))] = v;
  }
  return out;
}

inline ClaimFeatures extract_features(const Claim& claim, const FeatureConfig& cfg) {
  ClaimFeatures f;
  f.valence = valence(claim.text, cfg.lexicon);
  f.marker_count = attribution_marker_count(claim.text, cfg.markers);
  f.depth = static_cast<int>(std::min<std::size_t>(kMaxDepth, f.marker_count));
  f.repetition = repetition(claim, cfg.multifc_length_constant);
  if (auto it = cfg.recency.find(claim.id); it != cfg.recency.end()) f.recency = it->second;
  f.prior_true = claim.dataset == DatasetKind::Liar ? speaker_prior(claim.history) : 0.5;
  f.credibility = source_credibility(claim, cfg.credibility, cfg.liar_gamma_divisor);
  return f;
}

inline std::vector<ClaimFeatures> extract_features(const std::vector<Claim>& claims, const FeatureConfig& cfg) {
  std::vector<ClaimFeatures> out;
  out.reserve(claims.size());
  for (const auto& c : claims) out.push_back(extract_features(c, cfg));
  return out;
}

inline void to_json(nlohmann::json& j, const ClaimFeatures& f) {
  j = {{"valence", f.valence},       {"depth", f.depth},           {"marker_count", f.marker_count},
       {"repetition", f.repetition}, {"recency", f.recency},       {"prior_true", f.prior_true},
       {"credibility", f.credibility}};
}

}  // namespace bpl
