#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/matrix.hpp"
#include "vandet/prng.hpp"

namespace vandet {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Scores live strictly inside (0,1).
inline double clamp_score(double s, double eps = 1e-12) {
  if (s < eps) return eps;
  if (s > 1.0 - eps) return 1.0 - eps;
  return s;
}

struct LrParams {
  double eta0 = 0.1;   // initial step size
  double l2 = 1e-4;    // ridge strength on the weights (bias unregularized)
  int epochs = 5;
};

// Logistic regression with internal per-column standardization; features are
// centered/scaled with moments fitted on the training matrix (constant
// columns get stddev 1, which zeroes their standardized values).
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> means;
  std::vector<double> stds;
  LrParams params;
  std::uint64_t seed = 0;

  double margin(const double* x) const {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j)
      z += weights[j] * (x[j] - means[j]) / stds[j];
    return z;
  }
};

namespace detail {

inline void check_two_classes(const std::vector<double>& labels) {
  bool has_pos = false, has_neg = false;
  for (double y : labels) (y > 0.5 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    raise(ErrorCode::SingleClassTraining, "training data must contain both classes");
}

inline void fit_standardization(const DesignMatrix& m, std::vector<double>& means,
                                std::vector<double>& stds) {
  means.assign(m.cols, 0.0);
  stds.assign(m.cols, 1.0);
  if (m.rows == 0) return;
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) means[c] += m.at(r, c);
  for (double& mu : means) mu /= static_cast<double>(m.rows);
  std::vector<double> var(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) {
      double d = m.at(r, c) - means[c];
      var[c] += d * d;
    }
  for (std::size_t c = 0; c < m.cols; ++c) {
    double sd = std::sqrt(var[c] / static_cast<double>(m.rows));
    stds[c] = sd > 0.0 ? sd : 1.0;
  }
}

}  // namespace detail

// Mean log-loss plus (l2/2)*||w||^2 over standardized features, and its
// analytic gradient. This is the objective SGD descends; tests difference it.
inline double lr_loss_and_gradient(const LinearModel& model, const DesignMatrix& m,
                                   std::vector<double>* grad_w = nullptr,
                                   double* grad_b = nullptr) {
  const std::size_t n = m.rows, d = m.cols;
  if (grad_w) grad_w->assign(d, 0.0);
  if (grad_b) *grad_b = 0.0;
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double z = model.margin(m.row(r));
    double p = sigmoid(z);
    double y = m.labels[r];
    // numerically stable log-loss: log(1+e^z) - y*z
    loss += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y * z;
    if (grad_w || grad_b) {
      double err = p - y;
      if (grad_b) *grad_b += err / static_cast<double>(n);
      if (grad_w)
        for (std::size_t c = 0; c < d; ++c)
          (*grad_w)[c] += err * (m.at(r, c) - model.means[c]) / model.stds[c] /
                          static_cast<double>(n);
    }
  }
  loss /= static_cast<double>(n);
  double reg = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    reg += model.weights[c] * model.weights[c];
    if (grad_w) (*grad_w)[c] += model.params.l2 * model.weights[c];
  }
  return loss + 0.5 * model.params.l2 * reg;
}

// Per-example SGD with step eta_t = eta0 / (1 + eta0*l2*t) and a seeded
// shuffle each epoch. Deterministic given (matrix, params, seed).
inline LinearModel lr_fit(const DesignMatrix& m, const LrParams& params, std::uint64_t seed) {
  if (m.rows == 0 || !m.has_labels())
    raise(ErrorCode::SingleClassTraining, "lr_fit needs a labeled non-empty matrix");
  detail::check_two_classes(m.labels);
  LinearModel model;
  model.params = params;
  model.seed = seed;
  model.weights.assign(m.cols, 0.0);
  model.bias = 0.0;
  detail::fit_standardization(m, model.means, model.stds);

  Pcg32 rng(derive_seed(seed, "lr-shuffle"));
  std::vector<std::size_t> order(m.rows);
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t t = 0;
  std::vector<double> xt(m.cols);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t r : order) {
      for (std::size_t c = 0; c < m.cols; ++c)
        xt[c] = (m.at(r, c) - model.means[c]) / model.stds[c];
      double z = model.bias;
      for (std::size_t c = 0; c < m.cols; ++c) z += model.weights[c] * xt[c];
      double err = sigmoid(z) - m.labels[r];
      double eta = params.eta0 / (1.0 + params.eta0 * params.l2 * static_cast<double>(t));
      for (std::size_t c = 0; c < m.cols; ++c)
        model.weights[c] -= eta * (err * xt[c] + params.l2 * model.weights[c]);
      model.bias -= eta * err;
      ++t;
    }
    for (double w : model.weights)
      if (!std::isfinite(w))
        raise(ErrorCode::NonFiniteLoss,
              "SGD diverged at epoch " + std::to_string(epoch) + "; lower eta0");
    if (!std::isfinite(model.bias))
      raise(ErrorCode::NonFiniteLoss, "SGD diverged at epoch " + std::to_string(epoch));
  }
  return model;
}

inline std::vector<double> lr_score(const LinearModel& model, const DesignMatrix& m) {
  if (m.cols != model.weights.size())
    raise(ErrorCode::DimensionMismatch, "matrix has " + std::to_string(m.cols) +
                                            " columns, model expects " +
                                            std::to_string(model.weights.size()));
  std::vector<double> scores(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r)
    scores[r] = clamp_score(sigmoid(model.margin(m.row(r))));
  return scores;
}

}  // namespace vandet
