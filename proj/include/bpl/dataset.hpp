#pragma once

// Corpus ingestion for LIAR- and MultiFC-format TSV files.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bpl/error.hpp"
#include "bpl/random.hpp"
#include "bpl/text.hpp"

namespace bpl {

enum class DatasetKind { Liar, MultiFC };

enum class Ternary { False, True, Mixture };

inline std::string_view to_string(DatasetKind k) { return k == DatasetKind::Liar ? "liar" : "multifc"; }

inline DatasetKind dataset_kind_from_string(std::string_view s) {
  const auto l = text::lower(s);
  if (l == "liar") return DatasetKind::Liar;
  if (l == "multifc") return DatasetKind::MultiFC;
  throw ParameterError("unknown dataset kind '" + std::string(s) + "' (expected liar or multifc)");
}

inline std::string_view to_string(Ternary t) {
  switch (t) {
    case Ternary::False: return "false";
    case Ternary::True: return "true";
    case Ternary::Mixture: return "mixture";
  }
  return "false";
}

inline std::optional<Ternary> ternary_from_string(std::string_view s) {
  const auto l = text::lower(text::trim(s));
  if (l == "false") return Ternary::False;
  if (l == "true") return Ternary::True;
  if (l == "mixture") return Ternary::Mixture;
  return std::nullopt;
}

struct SpeakerHistory {
  std::uint32_t barely_true = 0;
  std::uint32_t false_count = 0;
  std::uint32_t half_true = 0;
  std::uint32_t mostly_true = 0;
  std::uint32_t pants_fire = 0;

  std::uint32_t total() const { return barely_true + false_count + half_true + mostly_true + pants_fire; }
  std::uint32_t false_group() const { return barely_true + false_count + pants_fire; }

  friend bool operator==(const SpeakerHistory&, const SpeakerHistory&) = default;
};

struct MappedLabel {
  std::optional<int> binary;
  std::optional<Ternary> ternary;
  std::optional<int> ordinal;  // pants-fire = 0 ... true = 5
  double ambiguity = 0.0;

  friend bool operator==(const MappedLabel&, const MappedLabel&) = default;
};

struct Claim {
  std::string id;
  std::string text;
  std::optional<std::string> speaker;
  std::optional<std::string> domain;
  std::optional<std::string> topic;  // LIAR subject column
  std::string raw_label;
  DatasetKind dataset = DatasetKind::Liar;
  std::optional<SpeakerHistory> history;
  std::optional<std::string> context;
  MappedLabel label;

  // Binary evaluation target. MultiFC: only "true" is positive.
  int target() const {
    if (label.binary) return *label.binary;
    return label.ternary == Ternary::True ? 1 : 0;
  }

  friend bool operator==(const Claim&, const Claim&) = default;
};

// ---------------------------------------------------------------------------
// LIAR label mapping

inline constexpr std::array<std::string_view, 6> kLiarLabels = {
    "pants-fire", "false", "barely-true", "half-true", "mostly-true", "true"};

inline double ordinal_ambiguity(int ordinal) { return 1.0 - std::abs(ordinal - 2.5) / 2.5; }

// Total over the six LIAR label strings; nullopt for anything else.
inline std::optional<MappedLabel> map_liar_label(std::string_view raw) {
  const auto l = text::lower(text::trim(raw));
  for (std::size_t i = 0; i < kLiarLabels.size(); ++i) {
    if (l == kLiarLabels[i]) {
      const int ord = static_cast<int>(i);
      MappedLabel m;
      m.ordinal = ord;
      m.binary = ord >= 3 ? 1 : 0;
      m.ambiguity = ordinal_ambiguity(ord);
      return m;
    }
  }
  return std::nullopt;
}

inline MappedLabel map_ternary(Ternary t) {
  MappedLabel m;
  m.ternary = t;
  m.ambiguity = t == Ternary::Mixture ? 1.0 : 0.0;
  return m;
}

// ---------------------------------------------------------------------------
// Ingest report

struct RejectedLine {
  std::size_t line_no = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t total_lines = 0;
  std::size_t parsed = 0;
  std::size_t rejected = 0;
  std::size_t unmapped = 0;  // subset of rejected: label had no mapping
  std::vector<RejectedLine> rejects;
  std::vector<std::string> missing_label_maps;
  std::vector<std::string> warnings;

  void reject(std::size_t line_no, std::string reason) {
    ++rejected;
    rejects.push_back({line_no, std::move(reason)});
  }

  // Associative merge for per-file parallel ingestion. Line numbers stay
  // relative to their own file.
  void merge(const IngestReport& other) {
    total_lines += other.total_lines;
    parsed += other.parsed;
    rejected += other.rejected;
    unmapped += other.unmapped;
    rejects.insert(rejects.end(), other.rejects.begin(), other.rejects.end());
    for (const auto& d : other.missing_label_maps) {
      if (std::find(missing_label_maps.begin(), missing_label_maps.end(), d) == missing_label_maps.end())
        missing_label_maps.push_back(d);
    }
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  }
};

struct IngestResult {
  std::vector<Claim> claims;
  IngestReport report;
};

inline void to_json(nlohmann::json& j, const IngestReport& r) {
  nlohmann::json rejects = nlohmann::json::array();
  for (const auto& x : r.rejects) rejects.push_back({{"line", x.line_no}, {"reason", x.reason}});
  j = {{"total_lines", r.total_lines}, {"parsed", r.parsed},       {"rejected", r.rejected},
       {"unmapped", r.unmapped},       {"rejects", rejects},       {"missing_label_maps", r.missing_label_maps},
       {"warnings", r.warnings}};
}

namespace detail {

inline std::optional<std::uint32_t> parse_count(std::string_view field) {
  const auto t = text::trim(field);
  if (t.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(std::string(t), &used);
  } catch (...) {
    return std::nullopt;
  }
  if (used != t.size() || !(v >= 0.0) || v != std::floor(v) || v > 4.0e9) return std::nullopt;
  return static_cast<std::uint32_t>(v);
}

inline std::optional<std::string> non_empty(std::string_view s) {
  const auto t = text::trim(s);
  if (t.empty()) return std::nullopt;
  return std::string(t);
}

}  // namespace detail

// LIAR column order: id, label, statement, subject, speaker, job, state,
// party, barely_true, false, half_true, mostly_true, pants_on_fire, context.
// Trailing extra columns are tolerated; missing ones are rejected.
inline IngestResult parse_liar(std::istream& in) {
  IngestResult out;
  auto& rep = out.report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++rep.total_lines;
    text::strip_cr(line);
    if (text::trim(line).empty()) {
      rep.reject(line_no, "blank line");
      continue;
    }
    const auto f = text::split(line, '\t');
    if (f.size() < 14) {
      rep.reject(line_no, "expected 14 tab-separated fields, found " + std::to_string(f.size()));
      continue;
    }
    auto label = map_liar_label(f[1]);
    if (!label) {
      ++rep.unmapped;
      rep.reject(line_no, "unknown LIAR label '" + f[1] + "'");
      continue;
    }
    Claim c;
    c.id = std::string(text::trim(f[0]));
    c.text = std::string(text::trim(f[2]));
    if (c.id.empty()) {
      rep.reject(line_no, "empty id");
      continue;
    }
    if (c.text.empty()) {
      rep.reject(line_no, "empty statement");
      continue;
    }
    c.raw_label = std::string(text::trim(f[1]));
    c.dataset = DatasetKind::Liar;
    c.topic = detail::non_empty(f[3]);
    c.speaker = detail::non_empty(f[4]);
    c.context = detail::non_empty(f[13]);
    c.label = *label;

    std::array<std::optional<std::uint32_t>, 5> counts;
    std::size_t empty_counts = 0;
    bool bad_count = false;
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& field = f[8 + i];
      if (text::trim(field).empty()) {
        ++empty_counts;
        continue;
      }
      counts[i] = detail::parse_count(field);
      if (!counts[i]) bad_count = true;
    }
    if (bad_count || (empty_counts != 0 && empty_counts != 5)) {
      rep.reject(line_no, "history counts must be non-negative integers");
      continue;
    }
    if (empty_counts == 0) {
      c.history = SpeakerHistory{*counts[0], *counts[1], *counts[2], *counts[3], *counts[4]};
    }
    out.claims.push_back(std::move(c));
    ++rep.parsed;
  }
  if (rep.total_lines == 0) rep.warnings.push_back("input is empty");
  return out;
}

// ---------------------------------------------------------------------------
// MultiFC

// Per-domain raw label -> ternary class. Domain "*" holds entries that apply
// to every domain; domain-specific entries take precedence.
class LabelMap {
 public:
  void add(std::string domain, std::string_view raw_label, Ternary t) {
    entries_[text::lower(text::trim(domain))][text::lower(text::trim(raw_label))] = t;
  }

  bool has_domain(std::string_view domain) const {
    return entries_.count(text::lower(domain)) > 0 || entries_.count("*") > 0;
  }

  std::optional<Ternary> lookup(std::string_view domain, std::string_view raw_label) const {
    const auto label = text::lower(text::trim(raw_label));
    for (const auto& key : {text::lower(domain), std::string("*")}) {
      auto d = entries_.find(key);
      if (d == entries_.end()) continue;
      auto e = d->second.find(label);
      if (e != d->second.end()) return e->second;
    }
    return std::nullopt;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, m] : entries_) n += m.size();
    return n;
  }

  // TSV: domain <TAB> raw label <TAB> false|true|mixture; '#' starts a comment.
  static LabelMap parse(std::istream& in) {
    LabelMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      text::strip_cr(line);
      const auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto f = text::split(line, '\t');
      if (f.size() < 3) throw Error("label map line " + std::to_string(line_no) + ": expected 3 fields");
      const auto cls = ternary_from_string(f[2]);
      if (!cls) throw Error("label map line " + std::to_string(line_no) + ": unknown class '" + f[2] + "'");
      map.add(f[0], f[1], *cls);
    }
    return map;
  }

  static LabelMap load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label map: " + path);
    return parse(in);
  }

 private:
  std::map<std::string, std::map<std::string, Ternary>> entries_;
};

// Host part of a URL without scheme, port, path or leading "www.".
inline std::string url_domain(std::string_view url) {
  auto u = text::trim(url);
  if (auto p = u.find("://"); p != std::string_view::npos) u.remove_prefix(p + 3);
  if (auto p = u.find_first_of("/?#"); p != std::string_view::npos) u = u.substr(0, p);
  if (auto p = u.find('@'); p != std::string_view::npos) u.remove_prefix(p + 1);
  if (auto p = u.find(':'); p != std::string_view::npos) u = u.substr(0, p);
  auto host = text::lower(u);
  if (host.rfind("www.", 0) == 0) host.erase(0, 4);
  return host;
}

// MultiFC column order: claimID, claim, label, claimURL, reason, categories,
// speaker, checker, tags, article title, publish date, climate, entities.
// Only the first four are required.
inline IngestResult parse_multifc(std::istream& in, const LabelMap& label_map) {
  IngestResult out;
  auto& rep = out.report;
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> missing;
  while (std::getline(in, line)) {
    ++line_no;
    ++rep.total_lines;
    text::strip_cr(line);
    if (text::trim(line).empty()) {
      rep.reject(line_no, "blank line");
      continue;
    }
    const auto f = text::split(line, '\t');
    if (f.size() < 4) {
      rep.reject(line_no, "expected at least 4 tab-separated fields, found " + std::to_string(f.size()));
      continue;
    }
    Claim c;
    c.id = std::string(text::trim(f[0]));
    c.text = std::string(text::trim(f[1]));
    c.raw_label = std::string(text::trim(f[2]));
    c.dataset = DatasetKind::MultiFC;
    if (c.id.empty() || c.text.empty()) {
      rep.reject(line_no, c.id.empty() ? "empty id" : "empty claim text");
      continue;
    }
    const auto domain = url_domain(f[3]);
    if (domain.empty()) {
      rep.reject(line_no, "claim URL has no domain");
      continue;
    }
    c.domain = domain;
    if (!label_map.has_domain(domain)) {
      missing.insert(domain);
      rep.reject(line_no, "MissingLabelMap(" + domain + ")");
      continue;
    }
    const auto cls = label_map.lookup(domain, c.raw_label);
    if (!cls) {
      ++rep.unmapped;
      rep.reject(line_no, "unmapped label '" + c.raw_label + "' for domain " + domain);
      continue;
    }
    c.label = map_ternary(*cls);
    if (f.size() > 6) c.speaker = detail::non_empty(f[6]);
    c.topic = c.domain;
    out.claims.push_back(std::move(c));
    ++rep.parsed;
  }
  rep.missing_label_maps.assign(missing.begin(), missing.end());
  if (rep.total_lines == 0) rep.warnings.push_back("input is empty");
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

// Class key used for stratification: binary label for LIAR, ternary for MultiFC.
inline int stratum_of(const Claim& c) {
  if (c.label.binary) return *c.label.binary;
  if (c.label.ternary) return 10 + static_cast<int>(*c.label.ternary);
  return -1;
}

// Stratified sample without replacement. Class allocations use largest
// remainders, so each class count is within one item of its proportional share.
inline std::vector<Claim> sample_claims(const std::vector<Claim>& claims, std::size_t n, std::uint64_t seed) {
  if (n > claims.size()) throw SampleSizeError(n, claims.size());
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < claims.size(); ++i) by_class[stratum_of(claims[i])].push_back(i);

  Rng rng(seed);
  struct Alloc {
    int cls;
    std::size_t take;
    double remainder;
  };
  std::vector<Alloc> allocs;
  std::size_t assigned = 0;
  for (auto& [cls, idx] : by_class) {
    const double exact = static_cast<double>(n) * static_cast<double>(idx.size()) / static_cast<double>(claims.size());
    const auto take = static_cast<std::size_t>(std::floor(exact));
    allocs.push_back({cls, take, exact - static_cast<double>(take)});
    assigned += take;
  }
  std::vector<std::size_t> order(allocs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return allocs[a].remainder > allocs[b].remainder; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++allocs[order[i % order.size()]].take;

  std::vector<std::size_t> picked;
  picked.reserve(n);
  for (const auto& a : allocs) {
    auto idx = by_class[a.cls];
    rng.shuffle(idx);
    picked.insert(picked.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(a.take));
  }
  rng.shuffle(picked);
  std::vector<Claim> out;
  out.reserve(n);
  for (auto i : picked) out.push_back(claims[i]);
  return out;
}

// ---------------------------------------------------------------------------
// JSON schema for the internal corpus (one Claim per JSON-lines record).

inline void to_json(nlohmann::json& j, const SpeakerHistory& h) {
  j = {{"barely_true", h.barely_true}, {"false", h.false_count}, {"half_true", h.half_true},
       {"mostly_true", h.mostly_true}, {"pants_fire", h.pants_fire}};
}

inline void from_json(const nlohmann::json& j, SpeakerHistory& h) {
  j.at("barely_true").get_to(h.barely_true);
  j.at("false").get_to(h.false_count);
  j.at("half_true").get_to(h.half_true);
  j.at("mostly_true").get_to(h.mostly_true);
  j.at("pants_fire").get_to(h.pants_fire);
}

namespace detail {
template <typename T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}
template <typename T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    v = it->template get<T>();
  } else {
    v.reset();
  }
}
}  // namespace detail

inline void to_json(nlohmann::json& j, const MappedLabel& m) {
  j = nlohmann::json::object();
  detail::put_optional(j, "binary", m.binary);
  if (m.ternary) j["ternary"] = std::string(to_string(*m.ternary));
  detail::put_optional(j, "ordinal", m.ordinal);
  j["ambiguity"] = m.ambiguity;
}

inline void from_json(const nlohmann::json& j, MappedLabel& m) {
  detail::get_optional(j, "binary", m.binary);
  detail::get_optional(j, "ordinal", m.ordinal);
  m.ternary.reset();
  if (auto it = j.find("ternary"); it != j.end()) {
    m.ternary = ternary_from_string(it->get<std::string>());
    if (!m.ternary) throw Error("invalid ternary label in corpus record");
  }
  j.at("ambiguity").get_to(m.ambiguity);
}

inline void to_json(nlohmann::json& j, const Claim& c) {
  j = {{"id", c.id},
       {"text", c.text},
       {"raw_label", c.raw_label},
       {"dataset", std::string(to_string(c.dataset))},
       {"label", c.label}};
  detail::put_optional(j, "speaker", c.speaker);
  detail::put_optional(j, "domain", c.domain);
  detail::put_optional(j, "topic", c.topic);
  detail::put_optional(j, "history", c.history);
  detail::put_optional(j, "context", c.context);
}

inline void from_json(const nlohmann::json& j, Claim& c) {
  j.at("id").get_to(c.id);
  j.at("text").get_to(c.text);
  j.at("raw_label").get_to(c.raw_label);
  c.dataset = dataset_kind_from_string(j.at("dataset").get<std::string>());
  j.at("label").get_to(c.label);
  detail::get_optional(j, "speaker", c.speaker);
  detail::get_optional(j, "domain", c.domain);
  detail::get_optional(j, "topic", c.topic);
  detail::get_optional(j, "history", c.history);
  detail::get_optional(j, "context", c.context);
}

}  // namespace bpl
