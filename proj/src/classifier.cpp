#include "nclearn/classifier.hpp"

#include <string>

#include "nclearn/errors.hpp"

namespace nclearn {

int classify_probs(std::span<const double> probs, const Matrix& loss) {
  const std::size_t n = loss.rows();
  if (probs.size() != n || loss.cols() != n) {
    throw ShapeMismatch("classify_probs: probability/loss shape mismatch");
  }
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    double score = 0.0;
    for (std::size_t c = 0; c < n; ++c) score += probs[c] * loss(c, y);
    if (y == 0 || score < best_score) {
      best = y;
      best_score = score;
    }
  }
  return static_cast<int>(best) + 1;
}

int classify(const CostSensitiveClassifier& c, std::span<const double> x) {
  const std::vector<double> probs = predict_proba(*c.cpe, x);
  return classify_probs(probs, c.loss);
}

ConfusionMatrix empirical_confusion_from_predictions(const std::vector<int>& predictions,
                                                     const std::vector<int>& labels, std::size_t n) {
  if (labels.empty()) throw EmptySample("empirical_confusion: empty sample");
  if (predictions.size() != labels.size()) {
    throw ShapeMismatch("empirical_confusion: prediction/label count mismatch");
  }
  std::vector<long long> counts(n * n, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int p = predictions[i];
    if (y < 1 || static_cast<std::size_t>(y) > n || p < 1 || static_cast<std::size_t>(p) > n) {
      throw DegenerateLabels("empirical_confusion: index outside [1.." + std::to_string(n) + "]");
    }
    ++counts[static_cast<std::size_t>(y - 1) * n + static_cast<std::size_t>(p - 1)];
  }
  ConfusionMatrix c(n, n);
  const double inv_m = 1.0 / static_cast<double>(labels.size());
  for (std::size_t k = 0; k < counts.size(); ++k) c.data()[k] = static_cast<double>(counts[k]) * inv_m;
  return c;
}

ConfusionMatrix empirical_confusion(const CostSensitiveClassifier& c, const Dataset& sample) {
  if (sample.size() == 0) throw EmptySample("empirical_confusion: empty sample");
  return confusion_from_probs(predict_proba_matrix(*c.cpe, sample.features), sample.labels, c.loss);
}

ConfusionMatrix confusion_from_probs(const Matrix& probs, const std::vector<int>& labels,
                                     const Matrix& loss) {
  const std::size_t n = loss.rows();
  if (labels.empty()) throw EmptySample("confusion_from_probs: empty sample");
  if (probs.rows() != labels.size() || probs.cols() != n || loss.cols() != n) {
    throw ShapeMismatch("confusion_from_probs: shape mismatch");
  }
  std::vector<long long> counts(n * n, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double* p = probs.row_ptr(i);
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      double score = 0.0;
      for (std::size_t c = 0; c < n; ++c) score += p[c] * loss(c, y);
      if (y == 0 || score < best_score) {
        best = y;
        best_score = score;
      }
    }
    const int label = labels[i];
    if (label < 1 || static_cast<std::size_t>(label) > n) {
      throw DegenerateLabels("confusion_from_probs: label outside [1.." + std::to_string(n) + "]");
    }
    ++counts[static_cast<std::size_t>(label - 1) * n + best];
  }
  ConfusionMatrix c(n, n);
  const double inv_m = 1.0 / static_cast<double>(labels.size());
  for (std::size_t k = 0; k < counts.size(); ++k) c.data()[k] = static_cast<double>(counts[k]) * inv_m;
  return c;
}

ConfusionMatrix expected_confusion(const RandomizedClassifier& h, const Dataset& sample) {
  if (sample.size() == 0) throw EmptySample("expected_confusion: empty sample");
  if (h.components.empty()) throw Error("expected_confusion: classifier has no components");
  const std::size_t n = h.components.front().classifier.loss.rows();
  ConfusionMatrix total(n, n, 0.0);

  // Components almost always share one CPE model; reuse its probability rows.
  const CpeModel* cached_model = nullptr;
  Matrix cached_probs;
  for (const auto& comp : h.components) {
    const CpeModel* model = comp.classifier.cpe.get();
    if (model != cached_model) {
      cached_probs = predict_proba_matrix(*model, sample.features);
      cached_model = model;
    }
    const ConfusionMatrix part = confusion_from_probs(cached_probs, sample.labels, comp.classifier.loss);
    for (std::size_t k = 0; k < total.data().size(); ++k)
      total.data()[k] += comp.weight * part.data()[k];
  }
  return total;
}

}  // namespace nclearn
