#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "nclearn/errors.hpp"
#include "nclearn/matrix.hpp"
#include "nclearn/noise.hpp"
#include "nclearn/rng.hpp"

using namespace nclearn;

namespace {

// Exhaustively enumerable distribution: four instances, three classes, all
// probabilities dyadic so the enumerated confusions are exact in doubles.
struct FinitePoint {
  double p;
  std::array<double, 3> eta;
  int prediction;  // fixed classifier output, 1-based
};

const std::array<FinitePoint, 4> kFiniteDist = {{
    {0.25, {0.5, 0.25, 0.25}, 1},
    {0.25, {0.125, 0.75, 0.125}, 2},
    {0.25, {0.25, 0.25, 0.5}, 2},
    {0.25, {0.0625, 0.1875, 0.75}, 3},
}};

const Matrix kDyadicT{{0.75, 0.125, 0.0625}, {0.125, 0.75, 0.1875}, {0.125, 0.125, 0.75}};

ConfusionMatrix enumerate_clean_confusion() {
  ConfusionMatrix c(3, 3, 0.0);
  for (const auto& pt : kFiniteDist)
    for (std::size_t y = 0; y < 3; ++y) c(y, pt.prediction - 1) += pt.p * pt.eta[y];
  return c;
}

ConfusionMatrix enumerate_noisy_confusion(const Matrix& t) {
  ConfusionMatrix c(3, 3, 0.0);
  for (const auto& pt : kFiniteDist)
    for (std::size_t y = 0; y < 3; ++y)
      for (std::size_t flipped = 0; flipped < 3; ++flipped)
        c(flipped, pt.prediction - 1) += pt.p * pt.eta[y] * t(flipped, y);
  return c;
}

// closed-form inverse of the symmetric uniform channel
Matrix uniform_inverse(std::size_t n, double sigma) {
  const double a = 1.0 - sigma;
  const double b = sigma / static_cast<double>(n - 1);
  const double scale = 1.0 / (a - b);
  const double shift = b / (a + static_cast<double>(n - 1) * b);
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = scale * ((i == j ? 1.0 : 0.0) - shift);
  return inv;
}

}  // namespace

TEST_CASE("build noise model") {
  const NoiseModel id = build_noise_model(Matrix::identity(3));
  CHECK(id.t_inv == Matrix::identity(3));
  CHECK(id.one_norm_of_inv == 1.0);

  const NoiseModel paper = build_noise_model(
      Matrix{{0.7, 0.15, 0.15}, {0.15, 0.7, 0.15}, {0.15, 0.15, 0.7}});
  CHECK(paper.n == 3);
  CHECK(vec_norm_inf(matmul(paper.t, paper.t_inv) - Matrix::identity(3)) <= 1e-9);

  CHECK_THROWS_AS(build_noise_model(Matrix{{0.5, 0.5}, {0.6, 0.5}}), NotColumnStochastic);
  CHECK_THROWS_AS(build_noise_model(Matrix{{0.5, 0.5}, {0.5, 0.5}}), SingularMatrix);
  CHECK_THROWS_AS(build_noise_model(Matrix{{1.2, -0.2}, {-0.2, 1.2}}), NotColumnStochastic);
}

TEST_CASE("uniform channel") {
  const NoiseModel m = uniform_ccn(3, 0.3);
  CHECK(m.t(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(m.t(1, 0) == doctest::Approx(0.15).epsilon(1e-15));

  CHECK(uniform_ccn(4, 0.0).t == Matrix::identity(4));
  CHECK_THROWS_AS(uniform_ccn(3, 2.0 / 3.0), InvalidSigma);
  CHECK_THROWS_AS(uniform_ccn(3, -0.1), InvalidSigma);

  CHECK(uniform_ccn(3, 0.6).one_norm_of_inv > uniform_ccn(3, 0.3).one_norm_of_inv);
  CHECK(uniform_ccn(3, 0.6).one_norm_of_inv == doctest::Approx(13.0).epsilon(1e-9));
}

TEST_CASE("uniform channel inverse matches the closed form") {
  for (std::size_t n : {2, 3, 6}) {
    for (double sigma : {0.1, 0.3, 0.5}) {
      if (sigma >= double(n - 1) / double(n)) continue;
      const NoiseModel m = uniform_ccn(n, sigma);
      CHECK(vec_norm_inf(m.t_inv - uniform_inverse(n, sigma)) <= 1e-10);
    }
  }
}

TEST_CASE("one norm of the inverse grows with sigma") {
  double prev = 0.0;
  for (double sigma : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}) {
    const double norm = uniform_ccn(3, sigma).one_norm_of_inv;
    CHECK(norm >= prev);
    prev = norm;
  }
}

TEST_CASE("random column channel") {
  Rng rng(101);
  CHECK(random_column_ccn(3, 0.0, rng).t == Matrix::identity(3));

  for (int seed = 0; seed < 100; ++seed) {
    Rng r(seed);
    const NoiseModel m = random_column_ccn(4, 0.35, r);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(m.t(j, j) == doctest::Approx(1.0 - 0.35).epsilon(1e-15));
      double col = 0.0;
      for (std::size_t i = 0; i < 4; ++i) col += m.t(i, j);
      CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(random_column_ccn(3, 1.0, rng), InvalidSigma);
}

TEST_CASE("flip labels: identity channel is a no-op") {
  Rng rng(5);
  const std::vector<int> labels{1, 2, 3, 2, 1, 3};
  CHECK(flip_labels(labels, NoiseModel::identity(3), rng) == labels);
}

TEST_CASE("flip labels: empirical flip rate approaches sigma") {
  const NoiseModel m = uniform_ccn(3, 0.4);
  Rng rng(7);
  const std::size_t count = 100000;
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) labels[i] = static_cast<int>(i % 3) + 1;
  const std::vector<int> flipped = flip_labels(labels, m, rng);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < count; ++i) changed += flipped[i] != labels[i];
  CHECK(std::abs(static_cast<double>(changed) / count - 0.4) <= 0.01);
}

TEST_CASE("flip labels: per-column transition frequencies converge to T") {
  const NoiseModel m = uniform_ccn(3, 0.3);
  Rng rng(11);
  const std::size_t per_class = 20000;
  std::vector<int> labels;
  for (int y = 1; y <= 3; ++y) labels.insert(labels.end(), per_class, y);
  const std::vector<int> flipped = flip_labels(labels, m, rng);
  Matrix freq(3, 3, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) freq(flipped[i] - 1, labels[i] - 1) += 1.0;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) {
      const double expected = m.t(i, j);
      const double observed = freq(i, j) / static_cast<double>(per_class);
      const double bound = 3.0 * std::sqrt(expected * (1.0 - expected) / per_class);
      CHECK(std::abs(observed - expected) <= bound);
      CHECK(std::abs(observed - expected) <= 0.01);
    }
  }
}

TEST_CASE("flip labels rejects out-of-range labels") {
  Rng rng(1);
  CHECK_THROWS_AS(flip_labels({0}, NoiseModel::identity(2), rng), DegenerateLabels);
  CHECK_THROWS_AS(flip_labels({3}, NoiseModel::identity(2), rng), DegenerateLabels);
}

TEST_CASE("loss correction") {
  const NoiseModel id = NoiseModel::identity(3);
  const Matrix zero_one = Matrix::ones(3, 3) - Matrix::identity(3);
  CHECK(correct_loss(id, zero_one) == zero_one);

  Rng rng(13);
  const NoiseModel noise = build_noise_model(kDyadicT);
  Matrix loss(3, 3);
  for (double& v : loss.data()) v = rng.uniform();
  // adjoint identity: T^t (T^t)^-1 L = L
  CHECK(vec_norm_inf(matmul(transpose(noise.t), correct_loss(noise, loss)) - loss) <= 1e-10);
}

TEST_CASE("corrected loss has the clean expectation on the enumerated distribution") {
  const NoiseModel noise = build_noise_model(kDyadicT);
  const Matrix loss{{0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}};
  const Matrix corrected = correct_loss(noise, loss);

  double clean_risk = 0.0, noisy_corrected_risk = 0.0;
  for (const auto& pt : kFiniteDist) {
    for (std::size_t y = 0; y < 3; ++y) {
      clean_risk += pt.p * pt.eta[y] * loss(y, pt.prediction - 1);
      for (std::size_t flipped = 0; flipped < 3; ++flipped) {
        noisy_corrected_risk +=
            pt.p * pt.eta[y] * noise.t(flipped, y) * corrected(flipped, pt.prediction - 1);
      }
    }
  }
  CHECK(std::abs(clean_risk - noisy_corrected_risk) <= 1e-12);
}

TEST_CASE("probability correction") {
  const NoiseModel id = NoiseModel::identity(3);
  const std::vector<double> p{0.2, 0.5, 0.3};
  CHECK(correct_probs(id, p) == p);

  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    Matrix t(3, 3);
    for (std::size_t j = 0; j < 3; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        t(i, j) = (i == j ? 2.0 : 0.0) + rng.uniform();
        col += t(i, j);
      }
      for (std::size_t i = 0; i < 3; ++i) t(i, j) /= col;
    }
    const NoiseModel noise = build_noise_model(t);
    std::vector<double> clean{0.3, 0.45, 0.25};
    const std::vector<double> noisy = matvec(noise.t, clean);
    const std::vector<double> recovered = correct_probs(noise, noisy);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(recovered[k] - clean[k]) <= 1e-12);

    std::vector<double> arbitrary{0.1, 0.1, 0.8};
    const std::vector<double> out = correct_probs(noise, arbitrary);
    CHECK(std::abs(out[0] + out[1] + out[2] - 1.0) <= 1e-10);
  }
}

TEST_CASE("confusion correction inverts the channel") {
  const NoiseModel id = NoiseModel::identity(2);
  const ConfusionMatrix c{{0.5, 0.1}, {0.1, 0.3}};
  CHECK(correct_confusion(id, c) == c);

  const NoiseModel noise = build_noise_model(Matrix{{0.8, 0.3}, {0.2, 0.7}});
  const ConfusionMatrix noisy{{0.43, 0.17}, {0.17, 0.23}};
  const ConfusionMatrix recovered = correct_confusion(noise, noisy);
  CHECK(vec_norm_inf(recovered - c) <= 1e-12);
}

TEST_CASE("enumerated noisy confusion equals T times the clean confusion exactly") {
  const ConfusionMatrix clean = enumerate_clean_confusion();
  const ConfusionMatrix noisy = enumerate_noisy_confusion(kDyadicT);
  CHECK(noisy == matmul(kDyadicT, clean));  // dyadic inputs keep both sides exact

  const NoiseModel noise = build_noise_model(kDyadicT);
  CHECK(vec_norm_inf(correct_confusion(noise, noisy) - clean) <= 1e-12);

  double mass = 0.0;
  for (double v : correct_confusion(noise, noisy).data()) mass += v;
  CHECK(std::abs(mass - 1.0) <= 1e-9);
}
