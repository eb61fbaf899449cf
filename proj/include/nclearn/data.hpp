#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nclearn/matrix.hpp"
#include "nclearn/measures.hpp"
#include "nclearn/rng.hpp"

namespace nclearn {

/// A labeled sample. Labels are 1-based class indices.
struct Dataset {
  Matrix features;          // m x d
  std::vector<int> labels;  // length m, values in [1..n]

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }
  std::span<const double> row(std::size_t i) const { return {features.row_ptr(i), features.cols()}; }
  int max_label() const;
};

struct GaussianComponent {
  double weight = 0.0;
  std::vector<double> mean;
  std::vector<double> stddev;  // per-coordinate (diagonal covariance)
};

/// Generating process: x from a Gaussian mixture, y drawn from the exact
/// softmax-linear class probability eta(x).
struct SyntheticSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<GaussianComponent> mixture;
  Matrix eta_weights;              // n x d
  std::vector<double> eta_biases;  // length n
};

/// The 3-class / 2-feature benchmark distribution used throughout the
/// experiments. Constants are fixed so runs are reproducible.
SyntheticSpec default_synthetic_spec();

/// Exact class probability vector of the spec at x.
std::vector<double> true_eta(const SyntheticSpec& spec, std::span<const double> x);

Dataset gen_synthetic(const SyntheticSpec& spec, std::size_t m, Rng& rng);

/// CSV with a header row; the label column (by name, or by 0-based index if
/// the string parses as an integer) holds 1-based integer labels, every other
/// column is a numeric feature.
Dataset load_csv(const std::string& path, const std::string& label_column = "label");

/// Writes header + rows. When clean_labels is nonempty a label_clean column
/// is appended after the label column.
void write_dataset_csv(const Dataset& ds, const std::string& path,
                       const std::vector<int>& clean_labels = {});

/// Shuffled disjoint partition with round(ratio*m) rows in the first part.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double ratio, Rng& rng);

/// Deterministic first-ceil(m/2) / rest split (sample order is assumed
/// randomized upstream).
std::pair<Dataset, Dataset> split_halves(const Dataset& ds);

/// Key-value config file for SyntheticSpec (documented in the README).
SyntheticSpec load_spec(const std::string& path);
void save_spec(const SyntheticSpec& spec, const std::string& path);

/// Estimates the Bayes optimal psi value by running the iterative solver with
/// the exact eta in place of a learned estimator and a Monte Carlo sample of
/// eval_points for confusion estimation (no noise). steps = 0 picks the
/// per-family default (5000 for monotonic convex, 200 for ratio-of-linear).
double bayes_oracle(const SyntheticSpec& spec, const MeasureSpec& measure, std::size_t eval_points,
                    Rng& rng, std::size_t steps = 0);

}  // namespace nclearn
