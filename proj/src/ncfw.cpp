#include "nclearn/ncfw.hpp"

#include <memory>
#include <utility>

#include "nclearn/errors.hpp"

namespace nclearn {

namespace {

constexpr double kWeightFloor = 1e-12;

void validate_labels(const Dataset& ds, std::size_t n) {
  for (int y : ds.labels) {
    if (y < 1 || static_cast<std::size_t>(y) > n) {
      throw DegenerateLabels("label " + std::to_string(y) + " outside [1.." + std::to_string(n) + "]");
    }
  }
}

}  // namespace

FwCoreResult fw_core(const MeasureSpec& measure, const Matrix& probs, const std::vector<int>& labels,
                     const NoiseModel& noise, std::size_t steps) {
  if (!measure.monotonic_convex()) {
    throw Error("fw_core: measure must be monotonic convex (use run_ncbs for ratio-of-linear)");
  }
  if (steps < 1) throw ConfigError("fw_core: steps must be >= 1");
  const std::size_t n = noise.n;

  FwCoreResult out;
  const Matrix zero_one = Matrix::ones(n, n) - Matrix::identity(n);
  Matrix plugin_loss = correct_loss(noise, zero_one);
  ConfusionMatrix c = confusion_from_probs(probs, labels, plugin_loss);
  out.losses.push_back(std::move(plugin_loss));
  out.weights.push_back(1.0);

  for (std::size_t t = 1; t <= steps; ++t) {
    const Matrix grad = gradient(measure, correct_confusion(noise, c));
    Matrix loss = correct_loss(noise, grad);
    const ConfusionMatrix gamma = confusion_from_probs(probs, labels, loss);

    const double w = 2.0 / static_cast<double>(t + 1);
    for (std::size_t k = 0; k < c.data().size(); ++k)
      c.data()[k] = (1.0 - w) * c.data()[k] + w * gamma.data()[k];
    for (double& wk : out.weights) wk *= 1.0 - w;

    out.trace.steps.push_back({t, loss, evaluate_corrected(measure, noise, c), w});
    out.losses.push_back(std::move(loss));
    out.weights.push_back(w);

    // cull negligible components (h^0 drops immediately: 1 - 2/2 = 0)
    std::size_t keep = 0;
    for (std::size_t k = 0; k < out.weights.size(); ++k) {
      if (out.weights[k] < kWeightFloor) continue;
      if (keep != k) {
        out.weights[keep] = out.weights[k];
        out.losses[keep] = std::move(out.losses[k]);
      }
      ++keep;
    }
    out.weights.resize(keep);
    out.losses.resize(keep);
  }
  return out;
}

NcfwResult run_ncfw(const MeasureSpec& measure, const Dataset& noisy_sample, const NoiseModel& noise,
                    std::size_t steps, const TrainConfig& cpe_cfg, Rng& rng) {
  (void)rng;
  if (noisy_sample.size() == 0) throw EmptySample("run_ncfw: empty sample");
  if (measure.n != noise.n) throw ShapeMismatch("run_ncfw: measure/noise class counts differ");
  validate_labels(noisy_sample, noise.n);

  const auto [s1, s2] = split_halves(noisy_sample);
  if (s2.size() == 0) throw EmptySample("run_ncfw: sample too small to split");
  auto cpe = std::make_shared<const CpeModel>(train(s1, cpe_cfg, noise.n));
  const Matrix probs = predict_proba_matrix(*cpe, s2.features);

  FwCoreResult core = fw_core(measure, probs, s2.labels, noise, steps);

  NcfwResult result;
  result.trace = std::move(core.trace);
  result.classifier.components.reserve(core.losses.size());
  for (std::size_t k = 0; k < core.losses.size(); ++k) {
    result.classifier.components.push_back({core.weights[k], {cpe, std::move(core.losses[k])}});
  }
  return result;
}

std::vector<double> fw_weights(std::size_t steps) {
  if (steps < 1) throw ConfigError("fw_weights: steps must be >= 1");
  std::vector<double> w(steps + 1, 0.0);
  w[0] = 1.0;
  for (std::size_t t = 1; t <= steps; ++t) {
    const double wt = 2.0 / static_cast<double>(t + 1);
    for (std::size_t k = 0; k < t; ++k) w[k] *= 1.0 - wt;
    w[t] = wt;
  }
  return w;
}

}  // namespace nclearn
