#pragma once

// Classification metrics and the two group statistics used in the depth analysis.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "bpl/error.hpp"

namespace bpl {

// Average ranks (1-based); tied values share the mean of their positions.
inline std::vector<double> midranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace detail {
inline void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw ParameterError(std::string(what) + " contains a non-finite value");
}
}  // namespace detail

inline double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw ParameterError("roc_auc: scores and labels differ in length");
  detail::check_finite(scores, "roc_auc scores");
  std::size_t npos = 0;
  for (int y : labels) npos += y == 1 ? 1 : 0;
  const std::size_t nneg = labels.size() - npos;
  if (npos == 0 || nneg == 0) throw ParameterError("roc_auc needs both classes present");
  const auto ranks = midranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) rank_sum += ranks[i];
  const double np = static_cast<double>(npos), nn = static_cast<double>(nneg);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

struct F1Result {
  double value = 0.0;
  std::optional<std::string> warning;
};

inline F1Result f1_score(const std::vector<double>& scores, const std::vector<int>& labels, double threshold = 0.5) {
  if (scores.size() != labels.size()) throw ParameterError("f1_score: scores and labels differ in length");
  std::size_t tp = 0, fp = 0, fn = 0, npos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    const bool truth = labels[i] == 1;
    npos += truth ? 1 : 0;
    if (pred && truth) ++tp;
    if (pred && !truth) ++fp;
    if (!pred && truth) ++fn;
  }
  if (npos == 0 || npos == labels.size()) throw ParameterError("f1_score needs both classes present");
  F1Result r;
  if (tp + fp == 0) {
    r.warning = "no predicted positives; F1 set to 0";
    return r;
  }
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (precision + recall == 0.0) {
    r.warning = "precision and recall are both 0; F1 set to 0";
    return r;
  }
  r.value = 2.0 * precision * recall / (precision + recall);
  return r;
}

inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ParameterError("pearson_r: vectors differ in length");
  if (x.size() < 2) throw ParameterError("pearson_r needs at least two points");
  detail::check_finite(x, "pearson_r x");
  detail::check_finite(y, "pearson_r y");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw ParameterError("pearson_r: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Two-sided p for H0: rho = 0 from the t distribution with n-2 df.
inline double pearson_p_value(double r, std::size_t n) {
  if (n < 3) throw ParameterError("pearson p-value needs at least three points");
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

inline double cohens_d(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 1 || b.size() < 1 || a.size() + b.size() < 3)
    throw ParameterError("cohens_d needs at least three observations across both groups");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
  double ssa = 0.0, ssb = 0.0;
  for (double x : a) ssa += (x - ma) * (x - ma);
  for (double x : b) ssb += (x - mb) * (x - mb);
  const double pooled = std::sqrt((ssa + ssb) / (na + nb - 2.0));
  if (!(pooled > 0.0)) throw ParameterError("cohens_d: pooled standard deviation is zero");
  return (ma - mb) / pooled;
}

struct MannWhitneyResult {
  double u = 0.0;  // U for group a: pairs a > b plus half the ties
  double p = 1.0;  // two-sided
  bool exact = false;
};

namespace detail {

struct RankSetup {
  std::vector<double> ranks;  // midranks over the pooled sample, a first
  double u_a = 0.0;
  std::size_t na = 0, nb = 0;
};

inline RankSetup rank_setup(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw ParameterError("mann_whitney_u needs two non-empty groups");
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  detail::check_finite(pooled, "mann_whitney_u input");
  RankSetup s;
  s.ranks = midranks(pooled);
  s.na = a.size();
  s.nb = b.size();
  double ra = 0.0;
  for (std::size_t i = 0; i < s.na; ++i) ra += s.ranks[i];
  const double na = static_cast<double>(s.na);
  s.u_a = ra - na * (na + 1.0) / 2.0;
  return s;
}

}  // namespace detail

// Normal approximation with tie and continuity corrections.
inline double mann_whitney_normal_p(const std::vector<double>& a, const std::vector<double>& b) {
  const auto s = detail::rank_setup(a, b);
  const double na = static_cast<double>(s.na), nb = static_cast<double>(s.nb), n = na + nb;
  std::vector<double> sorted = s.ranks;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double dev = std::max(0.0, std::abs(s.u_a - na * nb / 2.0) - 0.5);
  boost::math::normal_distribution<double> z;
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(z, dev / std::sqrt(var))));
}

// Exact permutation distribution of the rank sum, counting subsets of the
// pooled (doubled, hence integer) midranks.
inline double mann_whitney_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  const auto s = detail::rank_setup(a, b);
  const std::size_t n = s.na + s.nb;
  const std::size_t m = std::min(s.na, s.nb);
  std::vector<long> r2(n);
  long total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = std::lround(2.0 * s.ranks[i]);
    total += r2[i];
  }
  // counts[j][sum]: subsets of size j with doubled-rank sum `sum`.
  std::vector<std::vector<long double>> counts(m + 1, std::vector<long double>(static_cast<std::size_t>(total) + 1, 0.0L));
  counts[0][0] = 1.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = std::min(m, i + 1); j >= 1; --j) {
      auto& dst = counts[j];
      const auto& src = counts[j - 1];
      for (long sum = total; sum >= r2[i]; --sum) dst[static_cast<std::size_t>(sum)] += src[static_cast<std::size_t>(sum - r2[i])];
    }
  }
  // Work with the smaller group's U; the two-sided p is symmetric in the choice.
  const double mm = static_cast<double>(m);
  const double other = static_cast<double>(n - m);
  const double u_small = s.na <= s.nb ? s.u_a : mm * other - s.u_a;
  const double mean = mm * other / 2.0;
  const double obs_dev = std::abs(u_small - mean);
  long double hit = 0.0L, all = 0.0L;
  for (std::size_t sum = 0; sum < counts[m].size(); ++sum) {
    const long double c = counts[m][sum];
    if (c == 0.0L) continue;
    all += c;
    const double u = static_cast<double>(sum) / 2.0 - mm * (mm + 1.0) / 2.0;
    if (std::abs(u - mean) >= obs_dev - 1e-9) hit += c;
  }
  return std::min(1.0, static_cast<double>(hit / all));
}

inline constexpr std::size_t kExactMannWhitneyLimit = 400;

inline MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  const auto s = detail::rank_setup(a, b);
  MannWhitneyResult r;
  r.u = s.u_a;
  r.exact = s.na * s.nb <= kExactMannWhitneyLimit;
  r.p = r.exact ? mann_whitney_exact_p(a, b) : mann_whitney_normal_p(a, b);
  return r;
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw ParameterError("mean of an empty list");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n-1); 0 for fewer than two values.
inline double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace bpl
