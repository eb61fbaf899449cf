#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nclearn/cpe.hpp"
#include "nclearn/data.hpp"
#include "nclearn/matrix.hpp"

namespace nclearn {

/// Deterministic cost-sensitive classifier: predicts
/// argmin_y eta(x)^T loss[:, y], ties broken toward the smallest class index.
struct CostSensitiveClassifier {
  std::shared_ptr<const CpeModel> cpe;
  Matrix loss;  // n x n, possibly noise-corrected
};

/// Convex combination of deterministic classifiers. Its confusion matrix is
/// evaluated as the exact weight-averaged confusion of the components.
struct RandomizedClassifier {
  struct Component {
    double weight = 0.0;
    CostSensitiveClassifier classifier;
  };
  std::vector<Component> components;
};

/// argmin over predicted labels of probs^T loss[:, y]; returns a 1-based
/// class index, ties to the smallest.
int classify_probs(std::span<const double> probs, const Matrix& loss);

int classify(const CostSensitiveClassifier& c, std::span<const double> x);

/// Empirical joint frequencies of (true label, prediction); entries are
/// integer counts divided by the sample size.
ConfusionMatrix empirical_confusion_from_predictions(const std::vector<int>& predictions,
                                                     const std::vector<int>& labels, std::size_t n);

ConfusionMatrix empirical_confusion(const CostSensitiveClassifier& c, const Dataset& sample);

/// Confusion of the cost-sensitive rule applied to precomputed probability
/// rows. The iterative solvers call this once per step, so it avoids
/// re-running the CPE model.
ConfusionMatrix confusion_from_probs(const Matrix& probs, const std::vector<int>& labels,
                                     const Matrix& loss);

/// Exact expectation over components (no sampling of the mixture).
ConfusionMatrix expected_confusion(const RandomizedClassifier& h, const Dataset& sample);

}  // namespace nclearn
