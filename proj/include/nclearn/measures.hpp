#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "nclearn/matrix.hpp"
#include "nclearn/noise.hpp"

namespace nclearn {

enum class MeasureKind { HMean, QMean, GMean, RatioOfLinear };

/// A performance measure psi over confusion matrices, in loss form (lower is
/// better). Either one of the monotonic convex family (H/Q/G-mean, with value
/// and analytic gradient) or ratio-of-linear <A,C>/<B,C> (Micro F1).
struct MeasureSpec {
  MeasureKind kind = MeasureKind::QMean;
  std::size_t n = 0;
  Matrix a;  // ratio-of-linear numerator part
  Matrix b;  // ratio-of-linear denominator part

  static MeasureSpec hmean(std::size_t n) { return {MeasureKind::HMean, n, {}, {}}; }
  static MeasureSpec qmean(std::size_t n) { return {MeasureKind::QMean, n, {}, {}}; }
  static MeasureSpec gmean(std::size_t n) { return {MeasureKind::GMean, n, {}, {}}; }
  static MeasureSpec ratio_of_linear(Matrix a, Matrix b);
  static MeasureSpec micro_f1(std::size_t n);

  bool monotonic_convex() const { return kind != MeasureKind::RatioOfLinear; }
};

/// Lookup by CLI/config name: hmean, qmean, gmean, microf1.
MeasureSpec measure_from_name(const std::string& name, std::size_t n);
std::string measure_name(const MeasureSpec& m);

/// Loss-form value of the measure. H/Q/G-mean clamp row sums and diagonal
/// entries below by 1e-8 and recall ratios into [1e-8, 1] before evaluating,
/// so noise-corrected confusions with small negative entries stay in-domain.
/// Ratio-of-linear throws NonPositiveDenominator when <B,C> <= 0.
double evaluate(const MeasureSpec& m, const ConfusionMatrix& c);

/// Analytic gradient d psi / d C for the monotonic convex family. Matches
/// central finite differences at interior points; clamped coordinates get the
/// (zero) derivative of the clamped composition. The Q-mean subgradient at
/// its minimum is the zero matrix.
Matrix gradient(const MeasureSpec& m, const ConfusionMatrix& c);

/// Linear parts (A, B) of the Micro F1 loss with class 1 as the designated
/// negative class: B[i][j] = 2 - [i==1] - [j==1], A = B - 2 diag(0,1,...,1).
/// <A,C>/<B,C> equals the direct Micro F1 loss for any C with total mass 1.
std::pair<Matrix, Matrix> micro_f1_parts(std::size_t n);

/// Noise-corrected measure psi-tilde = psi composed with T^-1. Monotonic
/// convex: evaluate(m, T^-1 C) with the usual recall clamping. Ratio-of-linear:
/// <(T^t)^-1 A, C> / <(T^t)^-1 B, C> with no clamping.
double evaluate_corrected(const MeasureSpec& m, const NoiseModel& noise, const ConfusionMatrix& c_noisy);

}  // namespace nclearn
