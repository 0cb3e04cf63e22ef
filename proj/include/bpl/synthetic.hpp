#pragma once

// Seed-pinned synthetic corpora: LIAR-format TSV with speaker histories, and a
// three-stratum mis/dis/mal-information suite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "bpl/dataset.hpp"
#include "bpl/random.hpp"

namespace bpl::synth {

namespace detail {

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "budget",  "jobs",    "state",    "county",   "tax",     "plan",     "school",  "vote",    "health",
      "care",    "wage",    "law",      "city",     "water",   "road",     "bill",    "federal", "percent",
      "program", "energy",  "housing",  "border",   "trade",   "rate",     "spending", "deficit", "million",
      "billion", "workers", "families", "voters",   "year",    "last",     "new",     "more",    "than",
      "under",   "over",    "since",    "the",      "a",       "of",       "in",      "to",      "for",
      "and",     "has",     "have",     "was",      "is",      "will",     "increased", "cut",   "raised",
      "passed",  "voted",   "against",  "created",  "lost",    "police",   "farmers", "prices",  "income"};
  return words;
}

inline const std::vector<std::string>& salient_words() {
  static const std::vector<std::string> words = {
      "shocking", "outrage", "scandal", "disaster",    "crisis",   "corrupt", "fraud",   "lies",
      "terror",   "attack",  "destroy", "threat",      "fear",     "dangerous", "catastrophe", "horrific",
      "evil",     "panic",   "chaos",   "collapse",    "illegal",  "rigged",  "radical"};
  return words;
}

inline const std::vector<std::string>& subjects() {
  static const std::vector<std::string> s = {"economy", "taxes", "health-care", "education", "immigration",
                                             "energy",  "crime", "jobs",        "elections", "environment"};
  return s;
}

inline const std::vector<std::string>& parties() {
  static const std::vector<std::string> p = {"democrat", "republican", "independent", "none"};
  return p;
}

// Knuth's product-of-uniforms method; fine for the small means used here.
inline int poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  int k = 0;
  double p = rng.uniform();
  while (p > limit) {
    ++k;
    p *= rng.uniform();
  }
  return k;
}

// Statement with `salient` lexicon hits among `length` words and an optional
// attribution frame.
inline std::string statement(Rng& rng, int length, int salient, int depth) {
  const auto& fill = filler_words();
  const auto& sal = salient_words();
  std::vector<std::string> words;
  for (int i = 0; i < std::max(length - salient, 1); ++i) words.push_back(fill[rng.below(fill.size())]);
  for (int i = 0; i < salient; ++i) {
    const auto pos = rng.below(words.size() + 1);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), sal[rng.below(sal.size())]);
  }
  std::string body;
  for (const auto& w : words) body += (body.empty() ? "" : " ") + w;
  static const std::vector<std::string> sources = {"The governor", "A senator", "The mayor", "An official",
                                                   "The campaign", "A blogger"};
  if (depth == 1) return sources[rng.below(sources.size())] + " says " + body;
  if (depth >= 2) return "Everyone knows officials believe " + body;
  body[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(body[0])));
  return body;
}

// Ordinal label (0..5) for a claim of truth value y. Prolific politicians get
// mid-scale verdicts; one-off sources get extreme ones.
inline int draw_ordinal(Rng& rng, bool y, bool mid_scale) {
  if (mid_scale) {
    return y ? 3 + static_cast<int>(rng.categorical({0.6, 0.3, 0.1}))
             : static_cast<int>(rng.categorical({0.05, 0.35, 0.6}));
  }
  return y ? 3 + static_cast<int>(rng.categorical({0.15, 0.3, 0.55}))
           : static_cast<int>(rng.categorical({0.45, 0.45, 0.1}));
}

inline void add_to_history(SpeakerHistory& h, int ordinal) {
  switch (ordinal) {
    case 0: ++h.pants_fire; break;
    case 1: ++h.false_count; break;
    case 2: ++h.barely_true; break;
    case 3: ++h.half_true; break;
    case 4: ++h.mostly_true; break;
    default: break;  // "true" has no history column
  }
}

struct Row {
  std::string id;
  int ordinal = 0;
  std::string text;
  std::string subject;
  std::string speaker;
  std::string party;
  SpeakerHistory history;
};

inline std::string to_tsv(const Row& r) {
  std::ostringstream out;
  out << r.id << '\t' << kLiarLabels[static_cast<std::size_t>(r.ordinal)] << '\t' << r.text << '\t' << r.subject << '\t'
      << r.speaker << '\t' << "" << '\t' << "" << '\t' << r.party << '\t' << r.history.barely_true << '\t'
      << r.history.false_count << '\t' << r.history.half_true << '\t' << r.history.mostly_true << '\t'
      << r.history.pants_fire << '\t' << "synthetic";
  return out.str();
}

}  // namespace detail

enum class LiarProfile {
  // ~15% of claims from prolific politicians with long histories and
  // mid-scale verdicts; the rest from one-off sources whose history is just
  // the verdict on the claim itself (as in the released LIAR counts).
  LiarLike,
  // Every speaker is prolific, so history-based priors carry real signal.
  InformativePriors,
};

struct LiarOptions {
  std::size_t n = 5000;
  std::uint64_t seed = 1;
  LiarProfile profile = LiarProfile::LiarLike;
  double marker_rate = 0.08;  // share of claims framed as attributed speech
  double salience_rate = 0.08;
};

// LIAR-format TSV (14 columns, one claim per line).
inline std::string liar_tsv(const LiarOptions& opt) {
  using namespace detail;
  Rng rng(mix_seed(opt.seed, 0x11a2));
  std::vector<Row> rows;
  const auto& subj = subjects();
  const auto& party = parties();

  auto finish = [&](Row& r, bool y) {
    const double rate = opt.salience_rate * (y ? 0.7 : 1.3);
    const int hits = poisson(rng, rate);
    const int depth = rng.bernoulli(opt.marker_rate) ? 1 : 0;
    r.text = statement(rng, static_cast<int>(rng.range(8, 29)), hits, depth);
    r.subject = subj[rng.below(subj.size())];
  };

  const bool all_prolific = opt.profile == LiarProfile::InformativePriors;
  const std::size_t prolific_claims = all_prolific ? opt.n : opt.n * 15 / 100;
  const std::size_t per_speaker = all_prolific ? 20 : 12;
  std::size_t speaker_no = 0;
  while (rows.size() < prolific_claims) {
    // Speaker reliability: mean of four uniforms, concentrated near 0.5, or
    // uniform when priors should be informative.
    const double q = all_prolific ? rng.uniform()
                                  : (rng.uniform() + rng.uniform() + rng.uniform() + rng.uniform()) / 4.0;
    SpeakerHistory h;
    const auto prior_statements = rng.range(all_prolific ? 20 : 40, all_prolific ? 120 : 200);
    for (long long i = 0; i < prior_statements; ++i) add_to_history(h, draw_ordinal(rng, rng.bernoulli(q), !all_prolific));
    const std::string name = "politician-" + std::to_string(speaker_no);
    const std::string p = party[rng.below(party.size())];
    for (std::size_t i = 0; i < per_speaker && rows.size() < prolific_claims; ++i) {
      const bool y = rng.bernoulli(q);
      Row r;
      r.ordinal = draw_ordinal(rng, y, !all_prolific);
      r.speaker = name;
      r.party = p;
      r.history = h;
      add_to_history(r.history, r.ordinal);
      finish(r, y);
      rows.push_back(std::move(r));
    }
    ++speaker_no;
  }
  while (rows.size() < opt.n) {
    const bool y = rng.bernoulli(0.55);
    Row r;
    r.ordinal = draw_ordinal(rng, y, false);
    r.speaker = "source-" + std::to_string(speaker_no++);
    r.party = "none";
    add_to_history(r.history, r.ordinal);
    finish(r, y);
    rows.push_back(std::move(r));
  }
  rng.shuffle(rows);
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].id = std::to_string(i + 1) + ".json";
    out += to_tsv(rows[i]);
    out += '\n';
  }
  return out;
}

inline std::vector<Claim> liar_claims(const LiarOptions& opt) {
  std::istringstream in(liar_tsv(opt));
  return parse_liar(in).claims;
}

// Information-disorder strata, in id order mis, dis, mal, mis, ...
//  mis: plain assertions (depth 0) from speakers with long, mostly accurate
//       records; label false.
//  dis: attributed claims (depth 1) from sources with one or two prior
//       statements; label false.
//  mal: "everyone knows"-framed claims (depth 2) with salient wording from
//       speakers with mixed records; label true.
inline std::vector<Claim> disinfo_suite(std::uint64_t seed, std::size_t n = 900) {
  using namespace detail;
  Rng rng(mix_seed(seed, 0xd15));
  std::vector<Claim> out;
  out.reserve(n);
  static const char* kStrata[] = {"mis", "dis", "mal"};
  for (std::size_t i = 0; i < n; ++i) {
    const int s = static_cast<int>(i % 3);
    long long total, good;
    int salient, depth, label;
    if (s == 0) {
      total = rng.range(16, 40);
      good = rng.range(static_cast<long long>(0.8 * static_cast<double>(total)),
                       static_cast<long long>(0.95 * static_cast<double>(total)));
      salient = rng.bernoulli(0.85) ? 0 : 1;
      depth = 0;
      label = 0;
    } else if (s == 1) {
      total = rng.range(1, 2);
      good = rng.range((total + 1) / 2, total);
      salient = 0;
      depth = 1;
      label = 0;
    } else {
      total = rng.range(8, 20);
      good = rng.range(static_cast<long long>(0.35 * static_cast<double>(total)),
                       static_cast<long long>(0.65 * static_cast<double>(total)));
      salient = rng.bernoulli(0.25) ? 2 : 1;
      depth = 2;
      label = 1;
    }
    SpeakerHistory h;
    for (long long g = 0; g < good; ++g) (rng.bernoulli(0.5) ? h.half_true : h.mostly_true) += 1;
    for (long long b = good; b < total; ++b) {
      const auto c = rng.below(3);
      (c == 0 ? h.false_count : c == 1 ? h.barely_true : h.pants_fire) += 1;
    }
    Claim c;
    c.id = std::string(kStrata[s]) + "-" + std::to_string(i);
    c.text = statement(rng, static_cast<int>(rng.range(8, 20)), salient, depth);
    c.speaker = std::string(kStrata[s]) + "-speaker-" + std::to_string(i);
    c.topic = subjects()[rng.below(subjects().size())];
    c.raw_label = label == 1 ? "true" : "false";
    c.dataset = DatasetKind::Liar;
    c.history = h;
    c.context = std::string(kStrata[s]) + "-information";
    c.label = *map_liar_label(c.raw_label);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace bpl::synth
