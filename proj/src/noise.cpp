#include "nclearn/noise.hpp"

#include <cmath>
#include <string>

#include "nclearn/errors.hpp"

namespace nclearn {

NoiseModel NoiseModel::identity(std::size_t n) {
  NoiseModel m;
  m.n = n;
  m.t = Matrix::identity(n);
  m.t_inv = Matrix::identity(n);
  m.one_norm_of_inv = 1.0;
  return m;
}

NoiseModel build_noise_model(const Matrix& t) {
  if (!t.square()) throw ShapeMismatch("noise matrix must be square and nonempty");
  const std::size_t n = t.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double col_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = t(i, j);
      if (v < 0.0 || v > 1.0) {
        throw NotColumnStochastic("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") = " + std::to_string(v) + " outside [0,1]");
      }
      col_sum += v;
    }
    if (std::abs(col_sum - 1.0) > 1e-6) {
      throw NotColumnStochastic("column " + std::to_string(j) + " sums to " + std::to_string(col_sum));
    }
  }
  NoiseModel m;
  m.n = n;
  m.t = t;
  m.t_inv = invert(t);
  m.one_norm_of_inv = induced_one_norm(m.t_inv);
  return m;
}

NoiseModel uniform_ccn(std::size_t n, double sigma) {
  if (n == 0) throw ShapeMismatch("uniform_ccn: n must be positive");
  const double limit = static_cast<double>(n - 1) / static_cast<double>(n);
  if (sigma < 0.0 || sigma >= limit) {
    throw InvalidSigma("uniform_ccn: sigma must lie in [0, " + std::to_string(limit) + "), got " +
                       std::to_string(sigma));
  }
  Matrix t(n, n, n > 1 ? sigma / static_cast<double>(n - 1) : 0.0);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0 - sigma;
  return build_noise_model(t);
}

NoiseModel random_column_ccn(std::size_t n, double sigma, Rng& rng) {
  if (n == 0) throw ShapeMismatch("random_column_ccn: n must be positive");
  if (sigma < 0.0 || sigma >= 1.0) {
    throw InvalidSigma("random_column_ccn: sigma must lie in [0, 1), got " + std::to_string(sigma));
  }
  for (;;) {
    Matrix t(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      t(j, j) = 1.0 - sigma;
      if (n == 1) continue;
      std::vector<double> draws(n - 1);
      double total = 0.0;
      for (double& d : draws) {
        d = rng.uniform();
        total += d;
      }
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j) continue;
        t(i, j) = total > 0.0 ? sigma * draws[k] / total : sigma / static_cast<double>(n - 1);
        ++k;
      }
    }
    try {
      return build_noise_model(t);
    } catch (const SingularMatrix&) {
      // redraw
    }
  }
}

std::vector<int> flip_labels(const std::vector<int>& labels, const NoiseModel& noise, Rng& rng) {
  std::vector<int> out;
  out.reserve(labels.size());
  const std::size_t n = noise.n;
  for (int y : labels) {
    if (y < 1 || static_cast<std::size_t>(y) > n) {
      throw DegenerateLabels("flip_labels: label " + std::to_string(y) + " outside [1.." +
                             std::to_string(n) + "]");
    }
    const std::size_t col = static_cast<std::size_t>(y - 1);
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      cum += noise.t(i, col);
      if (u < cum) {
        pick = i;
        break;
      }
    }
    out.push_back(static_cast<int>(pick) + 1);
  }
  return out;
}

Matrix correct_loss(const NoiseModel& noise, const Matrix& loss) {
  if (loss.rows() != noise.n) throw ShapeMismatch("correct_loss: loss rows must equal class count");
  return matmul(transpose(noise.t_inv), loss);
}

std::vector<double> correct_probs(const NoiseModel& noise, const std::vector<double>& p_noisy) {
  return matvec(noise.t_inv, p_noisy);
}

ConfusionMatrix correct_confusion(const NoiseModel& noise, const ConfusionMatrix& c_noisy) {
  if (c_noisy.rows() != noise.n) {
    throw ShapeMismatch("correct_confusion: confusion rows must equal class count");
  }
  return matmul(noise.t_inv, c_noisy);
}

}  // namespace nclearn
