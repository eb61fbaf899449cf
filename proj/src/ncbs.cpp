#include "nclearn/ncbs.hpp"

#include <memory>
#include <string>
#include <utility>

#include "nclearn/errors.hpp"

namespace nclearn {

namespace {

void validate_labels(const Dataset& ds, std::size_t n) {
  for (int y : ds.labels) {
    if (y < 1 || static_cast<std::size_t>(y) > n) {
      throw DegenerateLabels("label " + std::to_string(y) + " outside [1.." + std::to_string(n) + "]");
    }
  }
}

}  // namespace

BsCoreResult bs_core(const Matrix& a, const Matrix& b, const Matrix& probs,
                     const std::vector<int>& labels, const NoiseModel& noise, std::size_t steps) {
  if (steps < 1) throw ConfigError("bs_core: steps must be >= 1");
  if (!a.square() || a.rows() != noise.n || b.rows() != a.rows() || b.cols() != a.cols()) {
    throw ShapeMismatch("bs_core: A and B must be n x n");
  }
  const std::size_t n = noise.n;
  const MeasureSpec measure = MeasureSpec::ratio_of_linear(a, b);

  BsCoreResult out;
  out.final_loss = correct_loss(noise, Matrix::ones(n, n) - Matrix::identity(n));  // plug-in h^0
  Dyadic alpha = Dyadic::zero();
  Dyadic beta = Dyadic::one();

  for (std::size_t t = 1; t <= steps; ++t) {
    const Dyadic gamma_exact = midpoint(alpha, beta);
    const double gamma = gamma_exact.to_double();
    Matrix loss = correct_loss(noise, a - gamma * b);
    const ConfusionMatrix confusion = confusion_from_probs(probs, labels, loss);
    double psi = 0.0;
    try {
      psi = evaluate_corrected(measure, noise, confusion);
    } catch (const NonPositiveDenominator& e) {
      throw NonPositiveDenominator(std::string(e.what()) + " at step " + std::to_string(t));
    }
    const bool accepted = psi <= gamma;
    if (accepted) {
      beta = gamma_exact;
      out.final_loss = std::move(loss);
    } else {
      alpha = gamma_exact;
    }
    out.trace.steps.push_back({t, gamma, accepted, psi, alpha, beta});
  }
  return out;
}

NcbsResult run_ncbs(const Matrix& a, const Matrix& b, const Dataset& noisy_sample,
                    const NoiseModel& noise, std::size_t steps, const TrainConfig& cpe_cfg, Rng& rng) {
  (void)rng;
  if (noisy_sample.size() == 0) throw EmptySample("run_ncbs: empty sample");
  validate_labels(noisy_sample, noise.n);

  const auto [s1, s2] = split_halves(noisy_sample);
  if (s2.size() == 0) throw EmptySample("run_ncbs: sample too small to split");
  auto cpe = std::make_shared<const CpeModel>(train(s1, cpe_cfg, noise.n));
  const Matrix probs = predict_proba_matrix(*cpe, s2.features);

  BsCoreResult core = bs_core(a, b, probs, s2.labels, noise, steps);

  NcbsResult result;
  result.classifier = {std::move(cpe), std::move(core.final_loss)};
  result.trace = std::move(core.trace);
  return result;
}

NcbsResult micro_f1_run(const Dataset& noisy_sample, const NoiseModel& noise, std::size_t steps,
                        const TrainConfig& cpe_cfg, Rng& rng) {
  if (noisy_sample.size() == 0) throw EmptySample("micro_f1_run: empty sample");
  const std::size_t n = static_cast<std::size_t>(noisy_sample.max_label());
  if (n != noise.n) {
    throw ShapeMismatch("micro_f1_run: sample labels suggest " + std::to_string(n) +
                        " classes but the noise model has " + std::to_string(noise.n));
  }
  const auto [a, b] = micro_f1_parts(n);
  return run_ncbs(a, b, noisy_sample, noise, steps, cpe_cfg, rng);
}

}  // namespace nclearn
