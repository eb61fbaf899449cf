// Acceptance suite: runs every criterion at its stated tolerance and prints
// one [PASS]/[FAIL] line per criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nclearn/baselines.hpp"
#include "nclearn/classifier.hpp"
#include "nclearn/data.hpp"
#include "nclearn/dyadic.hpp"
#include "nclearn/errors.hpp"
#include "nclearn/harness.hpp"
#include "nclearn/matrix.hpp"
#include "nclearn/measures.hpp"
#include "nclearn/ncbs.hpp"
#include "nclearn/ncfw.hpp"
#include "nclearn/noise.hpp"
#include "nclearn/rng.hpp"

using namespace nclearn;

namespace {

Matrix random_channel(std::size_t n, Rng& rng) {
  Matrix t(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      t(i, j) = (i == j ? 2.0 : 0.0) + rng.uniform();
      col += t(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) t(i, j) /= col;
  }
  return t;
}

ConfusionMatrix random_confusion(std::size_t n, Rng& rng) {
  ConfusionMatrix c(n, n);
  double total = 0.0;
  for (double& v : c.data()) {
    v = 0.05 + rng.uniform();
    total += v;
  }
  for (double& v : c.data()) v /= total;
  return c;
}

// run a batch of independent cells on two workers
std::vector<RunResult> run_batch(const std::vector<RunConfig>& cells) {
  std::vector<RunResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      results[idx] = run_single(cells[idx]);
    }
  };
  std::thread other(worker);
  worker();
  other.join();
  return results;
}

RunConfig trend_cell(const std::string& algo, const std::string& measure, double sigma,
                     std::size_t m, std::uint64_t seed) {
  RunConfig cfg;
  cfg.algo = algo;
  cfg.measure = measure;
  cfg.sigma = sigma;
  cfg.m = m;
  cfg.test_m = 50000;
  cfg.seed = seed;
  return cfg;
}

struct Check {
  int id;
  std::string name;
  std::function<bool(std::string&)> body;
};

// ---------------------------------------------------------------------------

bool criterion1_correction_identities(std::string& detail) {
  Rng rng(1001);
  double worst_roundtrip = 0.0, worst_theorem1 = 0.0, worst_adjoint = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 2 + rep % 5;
    const NoiseModel noise = build_noise_model(random_channel(n, rng));
    const ConfusionMatrix c = random_confusion(n, rng);
    const ConfusionMatrix noisy = matmul(noise.t, c);

    worst_roundtrip = std::max(worst_roundtrip, vec_norm_inf(correct_confusion(noise, noisy) - c));

    const MeasureSpec f1 = MeasureSpec::micro_f1(n);
    worst_theorem1 = std::max(
        worst_theorem1, std::abs(evaluate_corrected(f1, noise, noisy) - evaluate(f1, c)));

    Matrix loss(n, n);
    for (double& v : loss.data()) v = rng.uniform();
    worst_adjoint = std::max(
        worst_adjoint, std::abs(inner(correct_loss(noise, loss), noisy) - inner(loss, c)));
  }
  std::ostringstream out;
  out << "max roundtrip " << worst_roundtrip << ", theorem-1 " << worst_theorem1 << ", adjoint "
      << worst_adjoint << " (tol 1e-10)";
  detail = out.str();
  return worst_roundtrip <= 1e-10 && worst_theorem1 <= 1e-10 && worst_adjoint <= 1e-10;
}

bool criterion2_measure_golden_values(std::string& detail) {
  const ConfusionMatrix golden{{0.4, 0.1}, {0.2, 0.3}};
  const double h = evaluate(MeasureSpec::hmean(2), golden);
  const double q = evaluate(MeasureSpec::qmean(2), golden);
  const double g = evaluate(MeasureSpec::gmean(2), golden);

  ConfusionMatrix f1_case(3, 3, 0.0);
  f1_case(0, 0) = 0.5;
  f1_case(1, 1) = 0.2;
  f1_case(1, 2) = 0.1;
  f1_case(2, 1) = 0.1;
  f1_case(2, 2) = 0.1;
  const double f1 = evaluate(MeasureSpec::micro_f1(3), f1_case);

  bool zeros_ok = true;
  for (std::size_t n : {2, 3, 4}) {
    ConfusionMatrix perfect(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) perfect(i, i) = 1.0 / static_cast<double>(n);
    for (const auto& m : {MeasureSpec::hmean(n), MeasureSpec::qmean(n), MeasureSpec::gmean(n),
                          MeasureSpec::micro_f1(n)}) {
      zeros_ok = zeros_ok && std::abs(evaluate(m, perfect)) <= 1e-9;
    }
  }
  std::ostringstream out;
  out << "hmean " << h << ", qmean " << q << ", gmean " << g << ", microf1 " << f1;
  detail = out.str();
  return std::abs(h - 0.314286) <= 1e-6 && std::abs(q - 0.316228) <= 1e-6 &&
         std::abs(g - 0.307180) <= 1e-6 && std::abs(f1 - 0.4) <= 1e-12 && zeros_ok;
}

bool criterion3_gradient_correctness(std::string& detail) {
  Rng rng(1003);
  double worst = 0.0;
  for (const auto& m : {MeasureSpec::hmean(3), MeasureSpec::qmean(3), MeasureSpec::gmean(3)}) {
    for (int rep = 0; rep < 100; ++rep) {
      const ConfusionMatrix c = random_confusion(3, rng);
      const Matrix analytic = gradient(m, c);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          ConfusionMatrix up = c, down = c;
          up(i, j) += 1e-6;
          down(i, j) -= 1e-6;
          const double fd = (evaluate(m, up) - evaluate(m, down)) / 2e-6;
          worst = std::max(worst,
                           std::abs(analytic(i, j) - fd) / std::max(std::abs(fd), 1e-12));
        }
      }
    }
  }
  std::ostringstream out;
  out << "max relative error " << worst << " (tol 1e-5)";
  detail = out.str();
  return worst < 1e-5;
}

bool criterion4_exhaustive_oracle(std::string& detail) {
  // four instances, dyadic probabilities, fixed classifier
  const std::array<double, 4> px = {0.25, 0.25, 0.25, 0.25};
  const std::array<std::array<double, 3>, 4> eta = {{{0.5, 0.25, 0.25},
                                                     {0.125, 0.75, 0.125},
                                                     {0.25, 0.25, 0.5},
                                                     {0.0625, 0.1875, 0.75}}};
  const std::array<int, 4> pred = {1, 2, 2, 3};
  const Matrix t{{0.75, 0.125, 0.0625}, {0.125, 0.75, 0.1875}, {0.125, 0.125, 0.75}};

  ConfusionMatrix clean(3, 3, 0.0), noisy(3, 3, 0.0);
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 3; ++y) {
      clean(y, pred[x] - 1) += px[x] * eta[x][y];
      for (std::size_t f = 0; f < 3; ++f) {
        noisy(f, pred[x] - 1) += px[x] * eta[x][y] * t(f, y);
      }
    }
  }
  const bool exact = noisy == matmul(t, clean);
  const NoiseModel noise = build_noise_model(t);
  const double recovery = vec_norm_inf(correct_confusion(noise, noisy) - clean);
  std::ostringstream out;
  out << "enumerated noisy == T*clean: " << (exact ? "exact" : "NOT exact") << ", recovery error "
      << recovery << " (tol 1e-12)";
  detail = out.str();
  return exact && recovery <= 1e-12;
}

bool criterion5_reduction_to_uncorrected(std::string& detail) {
  RunConfig fw = trend_cell("fw", "qmean", 0.3, 2000, 7);
  fw.steps = 100;
  fw.test_m = 3000;
  RunConfig ncfw_id = fw;
  ncfw_id.algo = "ncfw";
  ncfw_id.identity_noise = true;

  RunConfig bs = trend_cell("bs", "microf1", 0.3, 2000, 7);
  bs.steps = 50;
  bs.test_m = 3000;
  RunConfig ncbs_id = bs;
  ncbs_id.algo = "ncbs";
  ncbs_id.identity_noise = true;

  const RunResult a = run_single(fw);
  const RunResult b = run_single(ncfw_id);
  const RunResult c = run_single(bs);
  const RunResult d = run_single(ncbs_id);

  const bool fw_match = a.clean_test_loss == b.clean_test_loss &&
                        a.noisy_test_loss == b.noisy_test_loss;
  const bool bs_match = c.clean_test_loss == d.clean_test_loss &&
                        c.noisy_test_loss == d.noisy_test_loss;
  std::ostringstream out;
  out << "fw vs ncfw(T=I): " << (fw_match ? "bit-identical" : "DIFFER") << "; bs vs ncbs(T=I): "
      << (bs_match ? "bit-identical" : "DIFFER");
  detail = out.str();
  return fw_match && bs_match;
}

bool criterion6_structural_invariants(std::string& detail) {
  // bisection: beta - alpha == 2^-t exactly, through all 200 default steps
  Rng gen(1006, 0);
  Dataset ds = gen_synthetic(default_synthetic_spec(), 1000, gen);
  const NoiseModel noise = uniform_ccn(3, 0.3);
  Rng flip(1006, 1);
  ds.labels = flip_labels(ds.labels, noise, flip);
  Rng solver(1);
  const NcbsResult res = micro_f1_run(ds, noise, 200, TrainConfig{}, solver);
  bool halving = res.trace.steps.size() == 200;
  for (const BsStep& s : res.trace.steps) {
    const int t = static_cast<int>(s.step);
    halving = halving && diff_units(s.alpha.at_level(t), s.beta.at_level(t)) == 1;
  }

  double worst_gap = 0.0;
  for (std::size_t steps : {1ul, 2ul, 10ul, 5000ul}) {
    const auto w = fw_weights(steps);
    double total = 0.0;
    for (double v : w) total += v;
    worst_gap = std::max(worst_gap, std::abs(total - 1.0));
  }
  std::ostringstream out;
  out << "interval width 2^-t for all t<=200: " << (halving ? "yes" : "NO")
      << "; fw weight-sum max deviation " << worst_gap << " (tol 1e-9)";
  detail = out.str();
  return halving && worst_gap <= 1e-9;
}

bool criterion7_sample_complexity_trend(std::string& detail) {
  const std::array<double, 3> sigmas = {0.1, 0.4, 0.6};
  const std::array<std::size_t, 2> ms = {1000, 100000};
  const std::array<std::uint64_t, 5> seeds = {1, 2, 3, 4, 5};

  struct Family {
    const char* algo;
    const char* measure;
    std::size_t steps;
  };
  const std::array<Family, 2> families = {{{"ncfw", "qmean", 5000}, {"ncbs", "microf1", 200}}};

  std::vector<RunConfig> cells;
  for (const Family& fam : families)
    for (const double sigma : sigmas)
      for (const std::size_t m : ms)
        for (const std::uint64_t seed : seeds) {
          RunConfig cfg = trend_cell(fam.algo, fam.measure, sigma, m, seed);
          cfg.steps = fam.steps;
          cells.push_back(cfg);
        }
  const std::vector<RunResult> results = run_batch(cells);

  auto loss_of = [&](const char* algo, double sigma, std::size_t m, std::uint64_t seed) {
    for (const RunResult& r : results) {
      if (r.algo == algo && r.sigma == sigma && r.m == m && r.seed == seed) return r.clean_test_loss;
    }
    throw Error("missing cell");
  };

  bool ok = true;
  std::ostringstream out;
  for (const Family& fam : families) {
    for (const double sigma : sigmas) {
      int improve = 0;
      for (const auto seed : seeds)
        improve += loss_of(fam.algo, sigma, 100000, seed) <= loss_of(fam.algo, sigma, 1000, seed);
      out << fam.algo << " sigma=" << sigma << ": m1e5<=m1e3 in " << improve << "/5; ";
      ok = ok && improve >= 3;
    }
    int hurts = 0;
    for (const auto seed : seeds)
      hurts += loss_of(fam.algo, 0.6, 1000, seed) >= loss_of(fam.algo, 0.1, 1000, seed);
    out << fam.algo << " noise-hurts(m=1e3) in " << hurts << "/5; ";
    ok = ok && hurts >= 3;
  }
  detail = out.str();
  return ok;
}

bool criterion8_baseline_direction(std::string& detail) {
  const std::array<std::uint64_t, 5> seeds = {1, 2, 3, 4, 5};
  std::vector<RunConfig> cells;
  for (const char* algo : {"ncfw", "fw"})
    for (const auto seed : seeds) cells.push_back(trend_cell(algo, "qmean", 0.4, 10000, seed));
  for (const char* algo : {"ncbs", "bs"})
    for (const auto seed : seeds) cells.push_back(trend_cell(algo, "microf1", 0.4, 10000, seed));
  const std::vector<RunResult> results = run_batch(cells);

  auto loss_of = [&](const std::string& algo, std::uint64_t seed) {
    for (const RunResult& r : results)
      if (r.algo == algo && r.seed == seed) return r.clean_test_loss;
    throw Error("missing cell");
  };

  int fw_wins = 0, bs_wins = 0;
  for (const auto seed : seeds) {
    fw_wins += loss_of("ncfw", seed) <= loss_of("fw", seed);
    bs_wins += loss_of("ncbs", seed) <= loss_of("bs", seed);
  }
  std::ostringstream out;
  out << "ncfw<=fw in " << fw_wins << "/5 seeds; ncbs<=bs in " << bs_wins << "/5 seeds (need >=3)";
  detail = out.str();
  return fw_wins >= 3 && bs_wins >= 3;
}

bool criterion9_near_bayes(std::string& detail) {
  Rng oracle_rng(1009);
  const double oracle =
      bayes_oracle(default_synthetic_spec(), MeasureSpec::qmean(3), 1000000, oracle_rng);

  RunConfig cfg = trend_cell("ncfw", "qmean", 0.0, 100000, 11);
  cfg.test_m = 100000;
  const RunResult run = run_single(cfg);

  std::ostringstream out;
  out << "oracle " << oracle << ", ncfw clean-data loss " << run.clean_test_loss << ", gap "
      << std::abs(run.clean_test_loss - oracle) << " (tol 0.03)";
  detail = out.str();
  return std::abs(run.clean_test_loss - oracle) <= 0.03;
}

bool criterion10_estimated_channel(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nclearn_acceptance_that";
  fs::create_directories(dir);

  const NoiseModel truth = uniform_ccn(3, 0.3);
  const fs::path exact_path = dir / "t_exact.csv";
  write_matrix_csv(truth.t, exact_path.string());

  Matrix perturbed = truth.t;
  for (std::size_t i = 0; i < 3; ++i) perturbed(i, i) += 0.05;
  for (std::size_t j = 0; j < 3; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < 3; ++i) col += perturbed(i, j);
    for (std::size_t i = 0; i < 3; ++i) perturbed(i, j) /= col;
  }
  const fs::path perturbed_path = dir / "t_perturbed.csv";
  write_matrix_csv(perturbed, perturbed_path.string());

  RunConfig base = trend_cell("ncfw", "qmean", 0.3, 10000, 13);
  base.steps = 500;
  base.test_m = 20000;
  const RunResult known = run_single(base);

  RunConfig with_exact = base;
  with_exact.noise_matrix_estimate_path = exact_path.string();
  const RunResult exact_estimate = run_single(with_exact);

  RunConfig with_perturbed = base;
  with_perturbed.noise_matrix_estimate_path = perturbed_path.string();
  const RunResult perturbed_estimate = run_single(with_perturbed);

  fs::remove_all(dir);

  const bool identical = known.clean_test_loss == exact_estimate.clean_test_loss &&
                         known.noisy_test_loss == exact_estimate.noisy_test_loss;
  const bool gap_recorded = perturbed_estimate.used_estimate &&
                            perturbed_estimate.t_inv_estimate_gap_one_norm > 0.0;
  std::ostringstream out;
  out << "T-hat == T: " << (identical ? "identical results" : "DIFFER")
      << "; perturbed T-hat gap recorded: " << perturbed_estimate.t_inv_estimate_gap_one_norm;
  detail = out.str();
  return identical && gap_recorded;
}

}  // namespace

int main() {
  const std::vector<Check> checks = {
      {1, "correction identities on random (T, C) pairs", criterion1_correction_identities},
      {2, "measure golden values", criterion2_measure_golden_values},
      {3, "analytic gradients vs central finite differences", criterion3_gradient_correctness},
      {4, "exhaustive four-point confusion oracle", criterion4_exhaustive_oracle},
      {5, "uncorrected baselines are the identity-noise special case", criterion5_reduction_to_uncorrected},
      {6, "bisection halving and Frank-Wolfe weight sums", criterion6_structural_invariants},
      {7, "sample-complexity trend on the synthetic benchmark", criterion7_sample_complexity_trend},
      {8, "noise-corrected beats uncorrected at sigma=0.4", criterion8_baseline_direction},
      {9, "near-Bayes loss on clean data", criterion9_near_bayes},
      {10, "estimated-channel pathway", criterion10_estimated_channel},
  };

  int failures = 0;
  for (const Check& check : checks) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = check.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const auto secs = std::chrono::duration_cast<std::chrono::duration<double>>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    std::printf("[%s] criterion %2d: %s (%.1fs)\n    %s\n", ok ? "PASS" : "FAIL", check.id,
                check.name.c_str(), secs, detail.c_str());
    std::fflush(stdout);
    failures += !ok;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
