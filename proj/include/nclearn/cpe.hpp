#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nclearn/data.hpp"
#include "nclearn/matrix.hpp"

namespace nclearn {

struct TrainConfig {
  double l2_lambda = 1e-4;
  std::size_t max_iters = 2000;
  double grad_tolerance = 1e-6;
  double learning_rate = 1.0;  // initial step; backtracking halves from here
};

/// Linear softmax class-probability estimator. Features are standardized with
/// statistics from the training split (zero-variance features pass through).
struct CpeModel {
  std::size_t n = 0;
  std::size_t d = 0;
  Matrix weights;                     // n x d
  std::vector<double> biases;         // length n
  std::vector<double> feature_means;  // length d
  std::vector<double> feature_stds;   // length d

  bool operator==(const CpeModel&) const = default;
};

struct TrainDiagnostics {
  std::vector<double> objective_history;  // value after each accepted step, [0] = initial
  std::size_t iterations = 0;
  double final_grad_inf_norm = 0.0;
};

/// Per-example loss given softmax probabilities; writes d(loss)/d(logits)
/// into grad_logits. Lets the noise-corrected regression variants reuse the
/// same optimizer with a swapped loss.
using ExampleLoss =
    std::function<double(std::span<const double> probs, int label, std::span<double> grad_logits)>;

/// Cross-entropy objective over raw (already prepared) features:
///   (1/m) sum_i loss_i(softmax(W x_i + b), y_i) + l2_lambda * ||W||^2.
/// custom == nullptr means plain -log p_y.
double objective_value(const Dataset& ds, const Matrix& w, const std::vector<double>& b,
                       double l2_lambda, std::size_t n, const ExampleLoss* custom = nullptr);
double objective_value_and_gradient(const Dataset& ds, const Matrix& w, const std::vector<double>& b,
                                    double l2_lambda, std::size_t n, Matrix& grad_w,
                                    std::vector<double>& grad_b, const ExampleLoss* custom = nullptr);

/// Full-batch gradient descent with backtracking line search on the softmax
/// cross-entropy objective. n_classes == 0 infers the count from the labels.
CpeModel train(const Dataset& sample, const TrainConfig& cfg, std::size_t n_classes = 0,
               TrainDiagnostics* diag = nullptr);

/// Same optimizer with a custom per-example loss.
CpeModel train_custom(const Dataset& sample, const TrainConfig& cfg, std::size_t n_classes,
                      const ExampleLoss& loss, TrainDiagnostics* diag = nullptr);

/// k-fold cross-validation over the lambda grid {1e-2, 1e-3, 1e-4, 1e-5};
/// picks the lambda with the lowest mean held-out loss, then retrains on the
/// full sample. Folds are contiguous chunks of the (pre-shuffled) sample.
CpeModel train_cv(const Dataset& sample, const TrainConfig& cfg, std::size_t folds,
                  std::size_t n_classes = 0, const ExampleLoss* custom = nullptr,
                  double* chosen_lambda = nullptr);

/// softmax(W standardize(x) + b), computed with max subtraction.
std::vector<double> predict_proba(const CpeModel& model, std::span<const double> x);

/// One probability row per feature row.
Matrix predict_proba_matrix(const CpeModel& model, const Matrix& features);

}  // namespace nclearn
