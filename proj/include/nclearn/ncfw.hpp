#pragma once

#include <cstddef>
#include <vector>

#include "nclearn/classifier.hpp"
#include "nclearn/cpe.hpp"
#include "nclearn/data.hpp"
#include "nclearn/measures.hpp"
#include "nclearn/noise.hpp"
#include "nclearn/rng.hpp"

namespace nclearn {

struct FwStep {
  std::size_t step = 0;
  Matrix loss;              // noise-corrected loss used at this step
  double psi = 0.0;         // psi(T^-1 C^t) after the averaging update
  double mix_weight = 0.0;  // 2/(t+1)
};

struct FwTrace {
  std::vector<FwStep> steps;
};

struct NcfwResult {
  RandomizedClassifier classifier;
  FwTrace trace;
};

/// Frank-Wolfe loop against precomputed probability rows for the
/// confusion-estimation sample. Exposed for reuse by the Bayes oracle, which
/// substitutes exact class probabilities for the learned CPE.
struct FwCoreResult {
  std::vector<Matrix> losses;    // per-component corrected loss matrices
  std::vector<double> weights;   // matching mixture weights (tiny ones culled)
  FwTrace trace;
};
FwCoreResult fw_core(const MeasureSpec& measure, const Matrix& probs, const std::vector<int>& labels,
                     const NoiseModel& noise, std::size_t steps);

/// Noise-corrected Frank-Wolfe for monotonic convex measures. Splits the
/// noisy sample in half, trains the CPE on the first half, and runs `steps`
/// iterations of cost-sensitive classification with the corrected gradient
/// loss, estimating confusions on the second half. With the identity noise
/// model this is exactly the uncorrected Frank-Wolfe baseline.
///
/// The pipeline is deterministic; rng is part of the contract for CPE
/// learners with random initialization and is not drawn from by the current
/// implementation.
NcfwResult run_ncfw(const MeasureSpec& measure, const Dataset& noisy_sample, const NoiseModel& noise,
                    std::size_t steps, const TrainConfig& cpe_cfg, Rng& rng);

/// Closed-form mixture weights after `steps` iterations: index 0 is the
/// initializer h^0 (weight 0 for steps >= 1), index t is classifier g^t with
/// weight 2t/(steps*(steps+1)).
std::vector<double> fw_weights(std::size_t steps);

}  // namespace nclearn
