#pragma once

// L2-regularised logistic regression (Newton's method with step halving),
// per-fold standardisation and stratified k-fold assignment.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bpl/error.hpp"
#include "bpl/random.hpp"

namespace bpl {

struct LogisticOptions {
  double l2 = 1.0;
  int max_iter = 1000;
  double tol = 1e-8;
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;  // max-norm at the returned point

  Eigen::VectorXd decision(const Eigen::MatrixXd& x) const {
    return (x * weights).array() + intercept;
  }

  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const {
    const Eigen::VectorXd z = decision(x);
    return z.unaryExpr([](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); });
  }
};

namespace detail {

inline double log1pexp(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline void check_matrix(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (!x.col(c).allFinite()) {
      const auto col = static_cast<std::size_t>(c);
      const std::string name = col < names.size() ? names[col] : "column " + std::to_string(col);
      throw ParameterError("non-finite value in feature '" + name + "'");
    }
  }
}

}  // namespace detail

// Objective: sum of per-sample negative log-likelihoods + (l2/2)|w|^2.
// The intercept is not penalised.
inline double logistic_objective(const Eigen::MatrixXd& x, const std::vector<int>& y, const Eigen::VectorXd& w,
                                 double b, double l2) {
  const Eigen::VectorXd z = (x * w).array() + b;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += detail::log1pexp(z[i]) - (y[static_cast<std::size_t>(i)] == 1 ? z[i] : 0.0);
  }
  return loss + 0.5 * l2 * w.squaredNorm();
}

inline LogisticModel fit_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y, const LogisticOptions& opt = {},
                                  const std::vector<std::string>& column_names = {}) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw ParameterError("fit_logistic: rows and labels differ");
  if (x.rows() == 0) throw ParameterError("fit_logistic: no training rows");
  if (!(opt.l2 >= 0.0)) throw ParameterError("fit_logistic: l2 must be non-negative");
  detail::check_matrix(x, column_names);

  const Eigen::Index n = x.rows(), p = x.cols();
  // Augmented design: last coordinate is the intercept.
  Eigen::MatrixXd xa(n, p + 1);
  xa.leftCols(p) = x;
  xa.col(p).setOnes();
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;
  Eigen::VectorXd pen = Eigen::VectorXd::Constant(p + 1, opt.l2);
  pen[p] = 0.0;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  const auto objective = [&](const Eigen::VectorXd& t) {
    return logistic_objective(x, y, t.head(p), t[p], opt.l2);
  };

  LogisticModel m;
  double f = objective(theta);
  for (m.iterations = 0; m.iterations < opt.max_iter; ++m.iterations) {
    const Eigen::VectorXd z = xa * theta;
    const Eigen::VectorXd mu =
        z.unaryExpr([](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); });
    const Eigen::VectorXd grad = xa.transpose() * (mu - yv) + pen.cwiseProduct(theta);
    m.gradient_norm = grad.cwiseAbs().maxCoeff();
    if (m.gradient_norm < opt.tol) {
      m.converged = true;
      break;
    }
    const Eigen::VectorXd wts = mu.cwiseProduct(Eigen::VectorXd::Ones(n) - mu);
    Eigen::MatrixXd h = xa.transpose() * wts.asDiagonal() * xa;
    h.diagonal() += pen;
    h.diagonal().array() += 1e-12;  // keeps the intercept-only block invertible on separable data
    const Eigen::VectorXd step = h.ldlt().solve(grad);
    // Near the optimum the objective change drops below its rounding error,
    // so steps within that slack count as descent.
    const double slack = 1e-12 * std::max(1.0, std::abs(f));
    double t = 1.0;
    Eigen::VectorXd next = theta - step;
    double fn = objective(next);
    while (fn > f + slack && t > 1e-10) {
      t *= 0.5;
      next = theta - t * step;
      fn = objective(next);
    }
    if (fn > f + slack) break;  // no descent possible at machine precision
    theta = next;
    f = fn;
  }
  if (!m.converged) {
    const Eigen::VectorXd z = xa * theta;
    const Eigen::VectorXd mu =
        z.unaryExpr([](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); });
    m.gradient_norm = (xa.transpose() * (mu - yv) + pen.cwiseProduct(theta)).cwiseAbs().maxCoeff();
    m.converged = m.gradient_norm < opt.tol;
  }
  m.weights = theta.head(p);
  m.intercept = theta[p];
  return m;
}

// Column-wise standardisation fitted on training rows only.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;  // 0 marks a constant column

  static Standardizer fit(const Eigen::MatrixXd& x) {
    Standardizer s;
    const auto n = static_cast<double>(x.rows());
    s.mean = x.colwise().mean().transpose();
    s.sd.resize(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double v = (x.col(c).array() - s.mean[c]).square().sum() / n;
      s.sd[c] = v > 1e-24 ? std::sqrt(v) : 0.0;
    }
    return s;
  }

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (sd[c] == 0.0) {
        out.col(c).setZero();
      } else {
        out.col(c) = (x.col(c).array() - mean[c]) / sd[c];
      }
    }
    return out;
  }
};

// Fold id per example. Each class is shuffled, classes are concatenated and
// folds are dealt round-robin, so fold sizes and per-class counts differ by at
// most one.
inline std::vector<int> stratified_kfold(const std::vector<int>& labels, int k_folds, std::uint64_t seed) {
  if (k_folds < 2) throw ParameterError("need at least two folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, idx] : by_class) {
    if (idx.size() < static_cast<std::size_t>(k_folds))
      throw ParameterError("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                           " members, fewer than " + std::to_string(k_folds) + " folds");
  }
  Rng rng(seed);
  std::vector<int> fold(labels.size(), -1);
  std::size_t pos = 0;
  for (auto& [cls, idx] : by_class) {
    rng.shuffle(idx);
    for (auto i : idx) fold[i] = static_cast<int>(pos++ % static_cast<std::size_t>(k_folds));
  }
  return fold;
}

}  // namespace bpl
