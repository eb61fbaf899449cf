#pragma once

#include <memory>

#include "nclearn/classifier.hpp"
#include "nclearn/cpe.hpp"
#include "nclearn/data.hpp"
#include "nclearn/noise.hpp"

namespace nclearn {

/// Plug-in rule: argmax of T^-1 eta(x), realized as the cost-sensitive
/// classifier with loss (T^t)^-1 (1 - I).
CostSensitiveClassifier plugin_classifier(std::shared_ptr<const CpeModel> cpe, const NoiseModel& noise);

/// Backward-corrected logistic regression: per-example training loss
/// [T^-1 l(x, .)]_y where l(x, .) is the vector of -log softmax scores.
/// Returns the argmax classifier of the trained model.
CostSensitiveClassifier train_backward_lr(const Dataset& noisy_sample, const NoiseModel& noise,
                                          const TrainConfig& cfg, std::size_t n_classes = 0);

/// Forward-corrected logistic regression: cross-entropy on the pushed-forward
/// probabilities T softmax(Wx + b).
CostSensitiveClassifier train_forward_lr(const Dataset& noisy_sample, const NoiseModel& noise,
                                         const TrainConfig& cfg, std::size_t n_classes = 0);

/// The per-example losses behind the two corrections, exposed so training
/// variants (plain, cross-validated) can be composed and gradient-checked.
ExampleLoss backward_loss(const NoiseModel& noise);
ExampleLoss forward_loss(const NoiseModel& noise);

}  // namespace nclearn
