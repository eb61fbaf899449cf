#pragma once

#include <cstddef>
#include <vector>

#include "nclearn/matrix.hpp"
#include "nclearn/rng.hpp"

namespace nclearn {

/// Class-conditional noise channel. T is column stochastic with
/// T[i][j] = P(noisy label = i | clean label = j); the inverse and its
/// induced 1-norm are cached because every correction operator uses them.
struct NoiseModel {
  std::size_t n = 0;
  Matrix t;
  Matrix t_inv;
  double one_norm_of_inv = 0.0;

  static NoiseModel identity(std::size_t n);
};

/// Validates column stochasticity (sums within 1e-6 of 1, entries in [0, 1])
/// and caches the inverse. Estimated channels go through this same path.
NoiseModel build_noise_model(const Matrix& t);

/// Symmetric channel: diagonal 1-sigma, off-diagonal sigma/(n-1).
/// Requires 0 <= sigma < (n-1)/n so the channel stays invertible.
NoiseModel uniform_ccn(std::size_t n, double sigma);

/// Per column j: diagonal 1-sigma, off-diagonal entries drawn uniformly and
/// rescaled to sum exactly to sigma. Redraws the whole matrix if it comes out
/// singular. Requires 0 <= sigma < 1.
NoiseModel random_column_ccn(std::size_t n, double sigma, Rng& rng);

/// Independently resamples each label from column y of T (inverse-CDF walk).
/// Labels are 1-based class indices.
std::vector<int> flip_labels(const std::vector<int>& labels, const NoiseModel& noise, Rng& rng);

/// Loss correction: (T^t)^-1 L.
Matrix correct_loss(const NoiseModel& noise, const Matrix& loss);

/// Probability correction: T^-1 p. May leave the simplex; entries still sum to 1.
std::vector<double> correct_probs(const NoiseModel& noise, const std::vector<double>& p_noisy);

/// Confusion correction: T^-1 C. Total mass stays 1.
ConfusionMatrix correct_confusion(const NoiseModel& noise, const ConfusionMatrix& c_noisy);

}  // namespace nclearn
