#include "nclearn/measures.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nclearn/errors.hpp"

namespace nclearn {

namespace {

constexpr double kEps = 1e-8;

// Per-row recall state with clamp bookkeeping for the chain rule.
struct RowRecall {
  double row_sum_raw = 0.0;
  double row_sum = 0.0;  // clamped below by kEps
  double diag = 0.0;     // clamped below by kEps
  double ratio = 0.0;    // diag / row_sum clamped into [kEps, 1]
  bool row_sum_clamped = false;
  bool diag_clamped = false;
  bool ratio_clamped = false;
};

std::vector<RowRecall> recalls(const ConfusionMatrix& c) {
  const std::size_t n = c.rows();
  std::vector<RowRecall> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    RowRecall& r = out[i];
    for (std::size_t j = 0; j < n; ++j) r.row_sum_raw += c(i, j);
    r.row_sum = r.row_sum_raw;
    if (r.row_sum < kEps) {
      r.row_sum = kEps;
      r.row_sum_clamped = true;
    }
    r.diag = c(i, i);
    if (r.diag < kEps) {
      r.diag = kEps;
      r.diag_clamped = true;
    }
    r.ratio = r.diag / r.row_sum;
    if (r.ratio < kEps) {
      r.ratio = kEps;
      r.ratio_clamped = true;
    } else if (r.ratio > 1.0) {
      r.ratio = 1.0;
      r.ratio_clamped = true;
    }
  }
  return out;
}

void require_square_match(const MeasureSpec& m, const ConfusionMatrix& c) {
  if (!c.square() || c.rows() != m.n) {
    throw ShapeMismatch("measure expects a " + std::to_string(m.n) + "x" + std::to_string(m.n) +
                        " confusion matrix");
  }
}

double ratio_of_linear_value(const Matrix& a, const Matrix& b, const ConfusionMatrix& c) {
  const double denom = inner(b, c);
  if (denom <= 0.0) {
    throw NonPositiveDenominator("<B,C> = " + std::to_string(denom));
  }
  return inner(a, c) / denom;
}

}  // namespace

MeasureSpec MeasureSpec::ratio_of_linear(Matrix a, Matrix b) {
  if (!a.square() || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("ratio_of_linear: A and B must be square with equal shapes");
  }
  MeasureSpec m;
  m.kind = MeasureKind::RatioOfLinear;
  m.n = a.rows();
  m.a = std::move(a);
  m.b = std::move(b);
  return m;
}

MeasureSpec MeasureSpec::micro_f1(std::size_t n) {
  auto [a, b] = micro_f1_parts(n);
  return ratio_of_linear(std::move(a), std::move(b));
}

MeasureSpec measure_from_name(const std::string& name, std::size_t n) {
  if (name == "hmean") return MeasureSpec::hmean(n);
  if (name == "qmean") return MeasureSpec::qmean(n);
  if (name == "gmean") return MeasureSpec::gmean(n);
  if (name == "microf1") return MeasureSpec::micro_f1(n);
  throw ConfigError("unknown measure '" + name + "' (expected hmean|qmean|gmean|microf1)");
}

std::string measure_name(const MeasureSpec& m) {
  switch (m.kind) {
    case MeasureKind::HMean: return "hmean";
    case MeasureKind::QMean: return "qmean";
    case MeasureKind::GMean: return "gmean";
    case MeasureKind::RatioOfLinear: return "ratio-of-linear";
  }
  return "?";
}

double evaluate(const MeasureSpec& m, const ConfusionMatrix& c) {
  require_square_match(m, c);
  const std::size_t n = m.n;
  switch (m.kind) {
    case MeasureKind::HMean: {
      double s = 0.0;
      for (const RowRecall& r : recalls(c)) s += 1.0 / r.ratio;
      return 1.0 - static_cast<double>(n) / s;
    }
    case MeasureKind::QMean: {
      double s = 0.0;
      for (const RowRecall& r : recalls(c)) s += (1.0 - r.ratio) * (1.0 - r.ratio);
      return std::sqrt(s / static_cast<double>(n));
    }
    case MeasureKind::GMean: {
      double log_prod = 0.0;
      for (const RowRecall& r : recalls(c)) log_prod += std::log(r.ratio);
      return 1.0 - std::exp(log_prod / static_cast<double>(n));
    }
    case MeasureKind::RatioOfLinear:
      return ratio_of_linear_value(m.a, m.b, c);
  }
  return 0.0;
}

Matrix gradient(const MeasureSpec& m, const ConfusionMatrix& c) {
  require_square_match(m, c);
  if (!m.monotonic_convex()) {
    throw Error("gradient is defined for the monotonic convex family only");
  }
  const std::size_t n = m.n;
  const auto rows = recalls(c);

  // d psi / d ratio_i
  std::vector<double> dpsi(n, 0.0);
  switch (m.kind) {
    case MeasureKind::HMean: {
      double s = 0.0;
      for (const RowRecall& r : rows) s += 1.0 / r.ratio;
      for (std::size_t i = 0; i < n; ++i) {
        dpsi[i] = -static_cast<double>(n) / (s * s * rows[i].ratio * rows[i].ratio);
      }
      break;
    }
    case MeasureKind::QMean: {
      const double value = evaluate(m, c);
      if (value <= 0.0) return Matrix(n, n, 0.0);  // subgradient at the minimum
      for (std::size_t i = 0; i < n; ++i) {
        dpsi[i] = -(1.0 - rows[i].ratio) / (static_cast<double>(n) * value);
      }
      break;
    }
    case MeasureKind::GMean: {
      double log_prod = 0.0;
      for (const RowRecall& r : rows) log_prod += std::log(r.ratio);
      const double g = std::exp(log_prod / static_cast<double>(n));
      for (std::size_t i = 0; i < n; ++i) {
        dpsi[i] = -g / (static_cast<double>(n) * rows[i].ratio);
      }
      break;
    }
    case MeasureKind::RatioOfLinear:
      break;
  }

  // Chain rule through ratio_i = clamp(diag_i / row_sum_i); clamped
  // coordinates contribute zero derivative.
  Matrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const RowRecall& r = rows[i];
    if (r.ratio_clamped) continue;
    const double d_row = r.row_sum_clamped ? 0.0 : -r.diag / (r.row_sum * r.row_sum);
    for (std::size_t j = 0; j < n; ++j) {
      double d = d_row;
      if (j == i && !r.diag_clamped) d += 1.0 / r.row_sum;
      out(i, j) = dpsi[i] * d;
    }
  }
  return out;
}

std::pair<Matrix, Matrix> micro_f1_parts(std::size_t n) {
  if (n < 2) throw ShapeMismatch("micro_f1_parts: needs at least 2 classes");
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      b(i, j) = 2.0 - (i == 0 ? 1.0 : 0.0) - (j == 0 ? 1.0 : 0.0);
  Matrix a = b;
  for (std::size_t i = 1; i < n; ++i) a(i, i) -= 2.0;
  return {a, b};
}

double evaluate_corrected(const MeasureSpec& m, const NoiseModel& noise, const ConfusionMatrix& c_noisy) {
  if (noise.n != m.n) throw ShapeMismatch("noise model and measure class counts differ");
  if (m.monotonic_convex()) {
    return evaluate(m, correct_confusion(noise, c_noisy));
  }
  const Matrix t_inv_t = transpose(noise.t_inv);
  return ratio_of_linear_value(matmul(t_inv_t, m.a), matmul(t_inv_t, m.b), c_noisy);
}

}  // namespace nclearn
