#pragma once

#include <cstddef>
#include <vector>

#include "nclearn/classifier.hpp"
#include "nclearn/cpe.hpp"
#include "nclearn/data.hpp"
#include "nclearn/dyadic.hpp"
#include "nclearn/measures.hpp"
#include "nclearn/noise.hpp"
#include "nclearn/rng.hpp"

namespace nclearn {

struct BsStep {
  std::size_t step = 0;
  double gamma = 0.0;
  bool accepted = false;
  double psi = 0.0;  // psi(T^-1 Gamma^t) via the corrected linear forms
  Dyadic alpha;      // exact interval endpoints after the update
  Dyadic beta;
};

struct BsTrace {
  std::vector<BsStep> steps;
};

struct NcbsResult {
  CostSensitiveClassifier classifier;
  BsTrace trace;
};

/// Bisection loop against precomputed probability rows; exposed for the
/// Bayes oracle. Returns the loss matrix of the final classifier (the most
/// recently accepted step, or the plug-in initializer if none accepted).
struct BsCoreResult {
  Matrix final_loss;
  BsTrace trace;
};
BsCoreResult bs_core(const Matrix& a, const Matrix& b, const Matrix& probs,
                     const std::vector<int>& labels, const NoiseModel& noise, std::size_t steps);

/// Noise-corrected Bisection for ratio-of-linear measures <A,C>/<B,C> taking
/// values in [0, 1] on feasible confusions. Same sample split and CPE
/// training as run_ncfw; each step classifies with the corrected loss
/// (T^t)^-1 (A - gamma B) and halves the search interval. Deterministic; the
/// rng parameter is reserved for stochastic CPE learners.
NcbsResult run_ncbs(const Matrix& a, const Matrix& b, const Dataset& noisy_sample,
                    const NoiseModel& noise, std::size_t steps, const TrainConfig& cpe_cfg, Rng& rng);

/// run_ncbs bound to the Micro F1 linear parts, with the class count inferred
/// from the largest label in the sample.
NcbsResult micro_f1_run(const Dataset& noisy_sample, const NoiseModel& noise, std::size_t steps,
                        const TrainConfig& cpe_cfg, Rng& rng);

}  // namespace nclearn
