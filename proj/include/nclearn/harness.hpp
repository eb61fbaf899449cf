#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nclearn/cpe.hpp"

namespace nclearn {

/// One experiment cell: algorithm, measure, noise source, data source, seed.
struct RunConfig {
  std::string algo = "ncfw";     // ncfw|ncbs|fw|bs|plugin|nclr-backward|nclr-forward
  std::string measure = "qmean"; // hmean|qmean|gmean|microf1
  double sigma = 0.0;
  std::string noise_scheme = "uniform";  // uniform|random-column
  std::string noise_matrix_path;         // overrides scheme when set
  std::string noise_matrix_estimate_path;  // solver uses this T-hat instead of the data channel
  bool identity_noise = false;             // solver uses T = I (the uncorrected baselines)
  std::size_t m = 10000;       // synthetic training sample size
  std::size_t test_m = 100000; // synthetic clean test size
  std::size_t steps = 0;       // 0 = per-algorithm default (ncfw/fw 5000, ncbs/bs 200)
  std::uint64_t seed = 1;
  std::string train_path;  // optional CSV input (labels taken as the noisy sample)
  std::string test_path;   // optional clean test CSV
  std::string spec_path;   // optional synthetic spec file
  std::string ab_path;     // optional ratio-of-linear (A, B) file: 2n rows of n entries
  TrainConfig cpe;
  std::size_t cv_folds = 0;  // 0 = off; otherwise k-fold CV over the lambda grid
};

struct RunResult {
  std::string algo;
  std::string measure;
  double sigma = 0.0;
  std::string noise_scheme;
  std::string noise_matrix;
  std::size_t m = 0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  double clean_test_loss = 0.0;
  double noisy_test_loss = 0.0;
  double one_norm_of_t_inv = 0.0;
  std::int64_t wall_ms = 0;
  // T-hat pathway diagnostics, populated when an estimate file is supplied
  bool used_estimate = false;
  double one_norm_of_t_hat_inv = 0.0;
  double t_inv_estimate_gap_one_norm = 0.0;
};

RunResult run_single(const RunConfig& cfg);

/// One JSON object per line; field order is fixed so identical configs give
/// byte-identical records apart from wall_ms.
std::string to_json_line(const RunResult& r);

/// The resumability key: the config-identifying subset of the record.
std::string record_key(const RunResult& r);

struct SynthConfig {
  std::size_t m = 10000;
  std::size_t test_m = 100000;
  double sigma = 0.0;
  std::string noise_scheme = "uniform";
  std::string noise_matrix_path;
  std::string spec_path;
  std::uint64_t seed = 1;
  std::string out_dir;
};

/// Writes train.csv (noisy labels, clean labels alongside when sigma > 0),
/// test.csv (clean), noise_matrix.csv and spec.txt into out_dir.
void run_synth(const SynthConfig& cfg);

struct SweepConfig {
  RunConfig base;
  std::vector<double> sigmas;
  std::vector<std::size_t> ms;
  std::vector<std::uint64_t> seeds;
  std::string out_path;
  std::size_t jobs = 1;
};

/// Cross product of (sigma, m, seed), one JSON line per cell, appended to
/// out_path. Cells whose key already appears in the file are skipped, so an
/// interrupted sweep can be rerun. Returns the number of new records.
std::size_t run_sweep(const SweepConfig& cfg, std::ostream* log = nullptr);

/// Groups records by (measure, algo, sigma, m) and writes a CSV of mean and
/// standard error (sample stddev / sqrt(k)) for the clean and noisy losses.
void write_report(const std::string& results_path, std::ostream& out);

}  // namespace nclearn
