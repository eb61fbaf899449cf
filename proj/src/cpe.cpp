#include "nclearn/cpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nclearn/errors.hpp"

namespace nclearn {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-14;
constexpr double kTinyProb = 1e-300;

std::size_t infer_classes(const Dataset& ds, std::size_t n_classes) {
  if (ds.size() == 0) throw EmptySample("train: empty sample");
  int max_label = 0;
  for (int y : ds.labels) {
    if (y < 1) throw DegenerateLabels("train: label " + std::to_string(y) + " below 1");
    max_label = std::max(max_label, y);
  }
  const std::size_t n = n_classes == 0 ? static_cast<std::size_t>(max_label) : n_classes;
  if (static_cast<std::size_t>(max_label) > n) {
    throw DegenerateLabels("train: label " + std::to_string(max_label) + " outside [1.." +
                           std::to_string(n) + "]");
  }
  return n;
}

void softmax_row(std::span<const double> scores, std::span<double> out) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out[k] = std::exp(scores[k] - top);
    total += out[k];
  }
  for (std::size_t k = 0; k < scores.size(); ++k) out[k] /= total;
}

struct Standardized {
  Dataset ds;
  std::vector<double> means;
  std::vector<double> stds;
};

Standardized standardize(const Dataset& ds) {
  const std::size_t m = ds.size();
  const std::size_t d = ds.dim();
  Standardized out;
  out.means.assign(d, 0.0);
  out.stds.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += ds.features(i, j);
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double c = ds.features(i, j) - mean;
      var += c * c;
    }
    var /= static_cast<double>(m);
    const double sd = std::sqrt(var);
    if (sd > 1e-12) {
      out.means[j] = mean;
      out.stds[j] = sd;
    }
    // zero-variance features keep mean 0 / std 1, i.e. pass through
  }
  out.ds.features = Matrix(m, d);
  out.ds.labels = ds.labels;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out.ds.features(i, j) = (ds.features(i, j) - out.means[j]) / out.stds[j];
  return out;
}

}  // namespace

double objective_value(const Dataset& ds, const Matrix& w, const std::vector<double>& b,
                       double l2_lambda, std::size_t n, const ExampleLoss* custom) {
  const std::size_t m = ds.size();
  const std::size_t d = ds.dim();
  std::vector<double> scores(n), probs(n), grad_z(n);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = ds.features.row_ptr(i);
    for (std::size_t k = 0; k < n; ++k) {
      double s = b[k];
      const double* wrow = w.row_ptr(k);
      for (std::size_t j = 0; j < d; ++j) s += wrow[j] * x[j];
      scores[k] = s;
    }
    softmax_row(scores, probs);
    if (custom) {
      total += (*custom)(probs, ds.labels[i], grad_z);
    } else {
      total += -std::log(std::max(probs[ds.labels[i] - 1], kTinyProb));
    }
  }
  total /= static_cast<double>(m);
  for (double v : w.data()) total += l2_lambda * v * v;
  return total;
}

double objective_value_and_gradient(const Dataset& ds, const Matrix& w, const std::vector<double>& b,
                                    double l2_lambda, std::size_t n, Matrix& grad_w,
                                    std::vector<double>& grad_b, const ExampleLoss* custom) {
  const std::size_t m = ds.size();
  const std::size_t d = ds.dim();
  grad_w = Matrix(n, d, 0.0);
  grad_b.assign(n, 0.0);
  std::vector<double> scores(n), probs(n), grad_z(n);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = ds.features.row_ptr(i);
    for (std::size_t k = 0; k < n; ++k) {
      double s = b[k];
      const double* wrow = w.row_ptr(k);
      for (std::size_t j = 0; j < d; ++j) s += wrow[j] * x[j];
      scores[k] = s;
    }
    softmax_row(scores, probs);
    if (custom) {
      total += (*custom)(probs, ds.labels[i], grad_z);
    } else {
      total += -std::log(std::max(probs[ds.labels[i] - 1], kTinyProb));
      for (std::size_t k = 0; k < n; ++k) grad_z[k] = probs[k];
      grad_z[ds.labels[i] - 1] -= 1.0;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double g = grad_z[k];
      if (g == 0.0) continue;
      grad_b[k] += g;
      double* grow = grad_w.row_ptr(k);
      for (std::size_t j = 0; j < d; ++j) grow[j] += g * x[j];
    }
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  total *= inv_m;
  for (double& v : grad_w.data()) v *= inv_m;
  for (double& v : grad_b) v *= inv_m;
  for (std::size_t k = 0; k < w.data().size(); ++k) {
    total += l2_lambda * w.data()[k] * w.data()[k];
    grad_w.data()[k] += 2.0 * l2_lambda * w.data()[k];
  }
  return total;
}

CpeModel train_custom(const Dataset& sample, const TrainConfig& cfg, std::size_t n_classes,
                      const ExampleLoss& loss, TrainDiagnostics* diag) {
  const ExampleLoss* custom = loss ? &loss : nullptr;
  const std::size_t n = infer_classes(sample, n_classes);
  const Standardized std_ds = standardize(sample);
  const std::size_t d = sample.dim();

  Matrix w(n, d, 0.0);
  std::vector<double> b(n, 0.0);
  Matrix grad_w;
  std::vector<double> grad_b;
  double f = objective_value_and_gradient(std_ds.ds, w, b, cfg.l2_lambda, n, grad_w, grad_b, custom);
  if (diag) {
    *diag = {};
    diag->objective_history.push_back(f);
  }

  std::size_t iter = 0;
  double grad_inf = 0.0;
  for (; iter < cfg.max_iters; ++iter) {
    grad_inf = vec_norm_inf(grad_w);
    for (double g : grad_b) grad_inf = std::max(grad_inf, std::abs(g));
    if (grad_inf < cfg.grad_tolerance) break;

    double grad_sq = 0.0;
    for (double g : grad_w.data()) grad_sq += g * g;
    for (double g : grad_b) grad_sq += g * g;

    double step = cfg.learning_rate;
    Matrix w_trial;
    std::vector<double> b_trial;
    double f_trial = std::numeric_limits<double>::infinity();
    bool accepted = false;
    while (step >= kMinStep) {
      w_trial = w;
      for (std::size_t k = 0; k < w_trial.data().size(); ++k)
        w_trial.data()[k] -= step * grad_w.data()[k];
      b_trial = b;
      for (std::size_t k = 0; k < n; ++k) b_trial[k] -= step * grad_b[k];
      f_trial = objective_value(std_ds.ds, w_trial, b_trial, cfg.l2_lambda, n, custom);
      if (f_trial <= f - kArmijo * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // cannot decrease further at this precision
    w = std::move(w_trial);
    b = std::move(b_trial);
    f = objective_value_and_gradient(std_ds.ds, w, b, cfg.l2_lambda, n, grad_w, grad_b, custom);
    if (diag) diag->objective_history.push_back(f);
  }

  if (diag) {
    diag->iterations = iter;
    diag->final_grad_inf_norm = grad_inf;
  }

  CpeModel model;
  model.n = n;
  model.d = d;
  model.weights = std::move(w);
  model.biases = std::move(b);
  model.feature_means = std_ds.means;
  model.feature_stds = std_ds.stds;
  return model;
}

CpeModel train(const Dataset& sample, const TrainConfig& cfg, std::size_t n_classes,
               TrainDiagnostics* diag) {
  return train_custom(sample, cfg, n_classes, ExampleLoss{}, diag);
}

CpeModel train_cv(const Dataset& sample, const TrainConfig& cfg, std::size_t folds,
                  std::size_t n_classes, const ExampleLoss* custom, double* chosen_lambda) {
  static const double kLambdaGrid[] = {1e-2, 1e-3, 1e-4, 1e-5};
  const std::size_t n = infer_classes(sample, n_classes);
  const std::size_t m = sample.size();
  if (folds < 2 || folds > m) throw ConfigError("cv folds must lie in [2, sample size]");

  double best_lambda = kLambdaGrid[0];
  double best_score = std::numeric_limits<double>::infinity();
  for (const double lambda : kLambdaGrid) {
    double score = 0.0;
    for (std::size_t fold = 0; fold < folds; ++fold) {
      const std::size_t lo = fold * m / folds;
      const std::size_t hi = (fold + 1) * m / folds;
      Dataset train_part, val_part;
      train_part.features = Matrix(m - (hi - lo), sample.dim());
      val_part.features = Matrix(hi - lo, sample.dim());
      std::size_t tr = 0, va = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto src = sample.row(i);
        if (i >= lo && i < hi) {
          std::copy(src.begin(), src.end(), val_part.features.row_ptr(va++));
          val_part.labels.push_back(sample.labels[i]);
        } else {
          std::copy(src.begin(), src.end(), train_part.features.row_ptr(tr++));
          train_part.labels.push_back(sample.labels[i]);
        }
      }
      TrainConfig fold_cfg = cfg;
      fold_cfg.l2_lambda = lambda;
      const CpeModel model = train_custom(train_part, fold_cfg, n,
                                          custom ? *custom : ExampleLoss{}, nullptr);
      // held-out data loss (no penalty term), in the model's standardized space
      Dataset val_std;
      val_std.features = Matrix(val_part.size(), val_part.dim());
      val_std.labels = val_part.labels;
      for (std::size_t i = 0; i < val_part.size(); ++i)
        for (std::size_t j = 0; j < val_part.dim(); ++j)
          val_std.features(i, j) =
              (val_part.features(i, j) - model.feature_means[j]) / model.feature_stds[j];
      score += objective_value(val_std, model.weights, model.biases, 0.0, n, custom);
    }
    score /= static_cast<double>(folds);
    if (score < best_score) {
      best_score = score;
      best_lambda = lambda;
    }
  }

  if (chosen_lambda) *chosen_lambda = best_lambda;
  TrainConfig final_cfg = cfg;
  final_cfg.l2_lambda = best_lambda;
  return train_custom(sample, final_cfg, n, custom ? *custom : ExampleLoss{}, nullptr);
}

std::vector<double> predict_proba(const CpeModel& model, std::span<const double> x) {
  if (x.size() != model.d) {
    throw ShapeMismatch("predict_proba: expected " + std::to_string(model.d) + " features, got " +
                        std::to_string(x.size()));
  }
  std::vector<double> scores(model.n), probs(model.n);
  for (std::size_t k = 0; k < model.n; ++k) {
    double s = model.biases[k];
    const double* wrow = model.weights.row_ptr(k);
    for (std::size_t j = 0; j < model.d; ++j)
      s += wrow[j] * (x[j] - model.feature_means[j]) / model.feature_stds[j];
    scores[k] = s;
  }
  softmax_row(scores, probs);
  return probs;
}

Matrix predict_proba_matrix(const CpeModel& model, const Matrix& features) {
  if (features.cols() != model.d) throw ShapeMismatch("predict_proba_matrix: feature dim mismatch");
  Matrix out(features.rows(), model.n);
  std::vector<double> scores(model.n);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const double* x = features.row_ptr(i);
    for (std::size_t k = 0; k < model.n; ++k) {
      double s = model.biases[k];
      const double* wrow = model.weights.row_ptr(k);
      for (std::size_t j = 0; j < model.d; ++j)
        s += wrow[j] * (x[j] - model.feature_means[j]) / model.feature_stds[j];
      scores[k] = s;
    }
    softmax_row(scores, {out.row_ptr(i), model.n});
  }
  return out;
}

}  // namespace nclearn
