#include "nclearn/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "nclearn/errors.hpp"

namespace nclearn {

namespace {

constexpr double kTinyProb = 1e-300;

}  // namespace

CostSensitiveClassifier plugin_classifier(std::shared_ptr<const CpeModel> cpe, const NoiseModel& noise) {
  if (cpe->n != noise.n) throw ShapeMismatch("plugin_classifier: model/noise class counts differ");
  const std::size_t n = noise.n;
  return {std::move(cpe), correct_loss(noise, Matrix::ones(n, n) - Matrix::identity(n))};
}

ExampleLoss backward_loss(const NoiseModel& noise) {
  const Matrix t_inv = noise.t_inv;
  return [t_inv](std::span<const double> probs, int label, std::span<double> grad_logits) {
    const std::size_t n = probs.size();
    const std::size_t row = static_cast<std::size_t>(label - 1);
    // loss = sum_c Tinv[y, c] * (-log p_c); d/dz_k = s*p_k - Tinv[y, k]
    double loss = 0.0;
    double coeff_sum = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double w = t_inv(row, c);
      loss += w * -std::log(std::max(probs[c], kTinyProb));
      coeff_sum += w;
    }
    for (std::size_t k = 0; k < n; ++k) grad_logits[k] = coeff_sum * probs[k] - t_inv(row, k);
    return loss;
  };
}

ExampleLoss forward_loss(const NoiseModel& noise) {
  const Matrix t = noise.t;
  return [t](std::span<const double> probs, int label, std::span<double> grad_logits) {
    const std::size_t n = probs.size();
    const std::size_t row = static_cast<std::size_t>(label - 1);
    // q_y = (T p)_y; loss = -log q_y; d/dz_k = p_k * (<p, v> - v_k), v = T[y,:]/q_y
    double q = 0.0;
    for (std::size_t c = 0; c < n; ++c) q += t(row, c) * probs[c];
    q = std::max(q, kTinyProb);
    double pv = 0.0;
    for (std::size_t c = 0; c < n; ++c) pv += probs[c] * t(row, c) / q;
    for (std::size_t k = 0; k < n; ++k) grad_logits[k] = probs[k] * (pv - t(row, k) / q);
    return -std::log(q);
  };
}

CostSensitiveClassifier train_backward_lr(const Dataset& noisy_sample, const NoiseModel& noise,
                                          const TrainConfig& cfg, std::size_t n_classes) {
  const std::size_t n = n_classes == 0 ? noise.n : n_classes;
  auto model = std::make_shared<const CpeModel>(
      train_custom(noisy_sample, cfg, n, backward_loss(noise)));
  return {std::move(model), Matrix::ones(n, n) - Matrix::identity(n)};
}

CostSensitiveClassifier train_forward_lr(const Dataset& noisy_sample, const NoiseModel& noise,
                                         const TrainConfig& cfg, std::size_t n_classes) {
  const std::size_t n = n_classes == 0 ? noise.n : n_classes;
  auto model = std::make_shared<const CpeModel>(
      train_custom(noisy_sample, cfg, n, forward_loss(noise)));
  return {std::move(model), Matrix::ones(n, n) - Matrix::identity(n)};
}

}  // namespace nclearn
