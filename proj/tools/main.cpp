#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nclearn/errors.hpp"
#include "nclearn/harness.hpp"

namespace {

// exit codes: 0 success, 1 config error, 2 runtime numerical error
constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

template <typename T>
std::vector<T> parse_list(const std::string& csv, const char* what) {
  std::vector<T> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(cell));
      } else {
        out.push_back(static_cast<T>(std::stoull(cell)));
      }
    } catch (const std::exception&) {
      throw nclearn::ConfigError(std::string("bad value '") + cell + "' in --" + what);
    }
  }
  if (out.empty()) throw nclearn::ConfigError(std::string("--") + what + " needs at least one value");
  return out;
}

void add_shared_run_flags(CLI::App* cmd, nclearn::RunConfig& cfg) {
  cmd->add_option("--algo", cfg.algo, "ncfw|ncbs|fw|bs|plugin|nclr-backward|nclr-forward");
  cmd->add_option("--measure", cfg.measure, "hmean|qmean|gmean|microf1");
  cmd->add_option("--sigma", cfg.sigma, "noise level in [0,1)");
  cmd->add_option("--noise-scheme", cfg.noise_scheme, "uniform|random-column");
  cmd->add_option("--noise-matrix", cfg.noise_matrix_path, "headerless CSV with the channel T");
  cmd->add_option("--noise-matrix-estimate", cfg.noise_matrix_estimate_path,
                  "correct with this estimated T-hat instead of the data channel");
  cmd->add_flag("--identity-noise", cfg.identity_noise, "solver corrects with T = I");
  cmd->add_option("--steps", cfg.steps, "iterative steps (default: 5000 for ncfw/fw, 200 for ncbs/bs)");
  cmd->add_option("--seed", cfg.seed, "run seed");
  cmd->add_option("--train", cfg.train_path, "noisy training CSV (header; 'label' column)");
  cmd->add_option("--test", cfg.test_path, "clean test CSV");
  cmd->add_option("--spec", cfg.spec_path, "synthetic spec file (default: built-in benchmark spec)");
  cmd->add_option("--ab-file", cfg.ab_path, "ratio-of-linear (A,B) file: 2n rows of n entries");
  cmd->add_option("--l2-lambda", cfg.cpe.l2_lambda, "CPE L2 regularization");
  cmd->add_option("--max-iters", cfg.cpe.max_iters, "CPE gradient descent iteration cap");
  cmd->add_option("--grad-tol", cfg.cpe.grad_tolerance, "CPE gradient stopping tolerance");
  cmd->add_option("--lr", cfg.cpe.learning_rate, "CPE initial learning rate");
  cmd->add_option("--cv-folds", cfg.cv_folds, "k-fold CV over the lambda grid (0 = off)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noise-corrected learning for non-decomposable performance measures"};
  app.require_subcommand(1);

  nclearn::SynthConfig synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic train/test pair");
  synth_cmd->add_option("--m", synth.m, "training sample size");
  synth_cmd->add_option("--test-m", synth.test_m, "clean test size");
  synth_cmd->add_option("--sigma", synth.sigma, "noise level");
  synth_cmd->add_option("--noise-scheme", synth.noise_scheme, "uniform|random-column");
  synth_cmd->add_option("--noise-matrix", synth.noise_matrix_path, "headerless CSV with T");
  synth_cmd->add_option("--spec", synth.spec_path, "synthetic spec file");
  synth_cmd->add_option("--seed", synth.seed, "seed");
  synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();

  nclearn::RunConfig run_cfg;
  std::string run_out;
  CLI::App* run_cmd = app.add_subcommand("run", "train one algorithm and emit a JSON record");
  add_shared_run_flags(run_cmd, run_cfg);
  run_cmd->add_option("--m", run_cfg.m, "synthetic training sample size");
  run_cmd->add_option("--test-m", run_cfg.test_m, "synthetic clean test size");
  run_cmd->add_option("--out", run_out, "append the record to this file (default: stdout)");

  nclearn::SweepConfig sweep;
  std::string sigmas = "0.1,0.2,0.3,0.4", ms = "1000,10000", seeds = "1,2,3,4,5";
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "cross-product of sigma/m/seed runs (resumable)");
  add_shared_run_flags(sweep_cmd, sweep.base);
  sweep_cmd->add_option("--sigmas", sigmas, "comma-separated noise levels");
  sweep_cmd->add_option("--ms", ms, "comma-separated training sizes");
  sweep_cmd->add_option("--seeds", seeds, "comma-separated seeds");
  sweep_cmd->add_option("--test-m", sweep.base.test_m, "synthetic clean test size");
  sweep_cmd->add_option("--jobs", sweep.jobs, "parallel workers");
  sweep_cmd->add_option("--out", sweep.out_path, "JSON-lines results file")->required();

  std::string report_results, report_out;
  CLI::App* report_cmd = app.add_subcommand("report", "mean +/- SEM per (measure, algo, sigma, m)");
  report_cmd->add_option("--results", report_results, "JSON-lines results file")->required();
  report_cmd->add_option("--out", report_out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigExit;
  }

  try {
    if (*synth_cmd) {
      nclearn::run_synth(synth);
    } else if (*run_cmd) {
      const nclearn::RunResult result = nclearn::run_single(run_cfg);
      const std::string line = nclearn::to_json_line(result);
      if (run_out.empty()) {
        std::cout << line << '\n';
      } else {
        std::ofstream out(run_out, std::ios::app);
        if (!out) throw nclearn::Error("cannot open for appending: " + run_out);
        out << line << '\n';
      }
    } else if (*sweep_cmd) {
      sweep.sigmas = parse_list<double>(sigmas, "sigmas");
      sweep.ms = parse_list<std::size_t>(ms, "ms");
      sweep.seeds = parse_list<std::uint64_t>(seeds, "seeds");
      const std::size_t n = nclearn::run_sweep(sweep, &std::cout);
      std::cerr << n << " new records -> " << sweep.out_path << '\n';
    } else if (*report_cmd) {
      if (report_out.empty()) {
        nclearn::write_report(report_results, std::cout);
      } else {
        std::ofstream out(report_out);
        if (!out) throw nclearn::Error("cannot open for writing: " + report_out);
        nclearn::write_report(report_results, out);
      }
    }
  } catch (const nclearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const nclearn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeExit;
  }
  return 0;
}
