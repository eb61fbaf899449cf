#include "nclearn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nclearn/baselines.hpp"
#include "nclearn/classifier.hpp"
#include "nclearn/data.hpp"
#include "nclearn/errors.hpp"
#include "nclearn/measures.hpp"
#include "nclearn/ncbs.hpp"
#include "nclearn/ncfw.hpp"
#include "nclearn/noise.hpp"

namespace nclearn {

namespace {

// rng substreams derived from the run seed
enum Stream : std::uint64_t {
  kTrainData = 0,
  kTrainFlip = 1,
  kTestData = 2,
  kTestFlip = 3,
  kNoiseMatrix = 4,
  kSolver = 5,
};

bool is_fw_family(const std::string& algo) { return algo == "ncfw" || algo == "fw"; }
bool is_bs_family(const std::string& algo) { return algo == "ncbs" || algo == "bs"; }
bool is_lr_family(const std::string& algo) {
  return algo == "plugin" || algo == "nclr-backward" || algo == "nclr-forward";
}

struct ResolvedNoise {
  NoiseModel data;     // channel that corrupted the labels
  NoiseModel correct;  // channel the solver corrects with
  bool used_estimate = false;
};

NoiseModel data_noise_model(const RunConfig& cfg, std::size_t n) {
  if (!cfg.noise_matrix_path.empty()) {
    return build_noise_model(read_matrix_csv(cfg.noise_matrix_path));
  }
  if (cfg.noise_scheme == "uniform") return uniform_ccn(n, cfg.sigma);
  if (cfg.noise_scheme == "random-column") {
    Rng rng(cfg.seed, kNoiseMatrix);
    return random_column_ccn(n, cfg.sigma, rng);
  }
  throw ConfigError("unknown noise scheme '" + cfg.noise_scheme + "' (expected uniform|random-column)");
}

ResolvedNoise resolve_noise(const RunConfig& cfg, std::size_t n) {
  ResolvedNoise out;
  out.data = data_noise_model(cfg, n);
  if (cfg.identity_noise || cfg.algo == "fw" || cfg.algo == "bs") {
    out.correct = NoiseModel::identity(n);
  } else if (!cfg.noise_matrix_estimate_path.empty()) {
    out.correct = build_noise_model(read_matrix_csv(cfg.noise_matrix_estimate_path));
    out.used_estimate = true;
  } else {
    out.correct = out.data;
  }
  if (out.correct.n != n) throw ShapeMismatch("correction noise matrix has wrong class count");
  return out;
}

MeasureSpec resolve_measure(const RunConfig& cfg, std::size_t n) {
  if (!cfg.ab_path.empty()) {
    const Matrix both = read_matrix_csv(cfg.ab_path);
    if (both.rows() != 2 * n || both.cols() != n) {
      throw ConfigError("A/B file must hold 2n rows of n entries (A above B)");
    }
    Matrix a(n, n), b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = both(i, j);
        b(i, j) = both(n + i, j);
      }
    return MeasureSpec::ratio_of_linear(std::move(a), std::move(b));
  }
  return measure_from_name(cfg.measure, n);
}

void validate_algo_measure(const RunConfig& cfg, const MeasureSpec& measure) {
  if (is_fw_family(cfg.algo) && !measure.monotonic_convex()) {
    throw ConfigError(cfg.algo + " optimizes monotonic convex measures (hmean|qmean|gmean)");
  }
  if (is_bs_family(cfg.algo) && measure.monotonic_convex()) {
    throw ConfigError(cfg.algo + " optimizes ratio-of-linear measures (microf1 or an A/B file)");
  }
}

struct RunData {
  Dataset noisy_train;
  Dataset clean_test;
  std::vector<int> noisy_test_labels;
};

RunData prepare_data(const RunConfig& cfg, const NoiseModel& data_noise, const SyntheticSpec& spec) {
  RunData out;
  if (!cfg.train_path.empty()) {
    out.noisy_train = load_csv(cfg.train_path);
    if (cfg.test_path.empty()) throw ConfigError("--train requires --test");
    out.clean_test = load_csv(cfg.test_path);
  } else {
    Rng train_rng(cfg.seed, kTrainData);
    Dataset clean_train = gen_synthetic(spec, cfg.m, train_rng);
    Rng flip_rng(cfg.seed, kTrainFlip);
    out.noisy_train = std::move(clean_train);
    out.noisy_train.labels = flip_labels(out.noisy_train.labels, data_noise, flip_rng);
    Rng test_rng(cfg.seed, kTestData);
    out.clean_test = gen_synthetic(spec, cfg.test_m, test_rng);
  }
  Rng test_flip_rng(cfg.seed, kTestFlip);
  out.noisy_test_labels = flip_labels(out.clean_test.labels, data_noise, test_flip_rng);
  return out;
}

std::size_t default_steps(const std::string& algo) {
  if (is_fw_family(algo)) return 5000;
  if (is_bs_family(algo)) return 200;
  return 0;
}

}  // namespace

RunResult run_single(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();

  const SyntheticSpec spec = cfg.spec_path.empty() ? default_synthetic_spec() : load_spec(cfg.spec_path);
  std::size_t n = spec.n;
  if (!cfg.train_path.empty()) {
    const Dataset peek = load_csv(cfg.train_path);  // class count comes from the data
    n = static_cast<std::size_t>(peek.max_label());
  }
  if (!cfg.noise_matrix_path.empty()) {
    n = read_matrix_csv(cfg.noise_matrix_path).rows();
  }

  const ResolvedNoise noise = resolve_noise(cfg, n);
  const MeasureSpec measure = resolve_measure(cfg, n);
  validate_algo_measure(cfg, measure);
  const RunData data = prepare_data(cfg, noise.data, spec);
  const std::size_t steps = cfg.steps == 0 ? default_steps(cfg.algo) : cfg.steps;

  ConfusionMatrix clean_confusion, noisy_confusion;
  Rng solver_rng(cfg.seed, kSolver);

  if (is_fw_family(cfg.algo)) {
    const NcfwResult res = run_ncfw(measure, data.noisy_train, noise.correct, steps, cfg.cpe, solver_rng);
    clean_confusion = expected_confusion(res.classifier, data.clean_test);
    Dataset noisy_test = data.clean_test;
    noisy_test.labels = data.noisy_test_labels;
    noisy_confusion = expected_confusion(res.classifier, noisy_test);
  } else if (is_bs_family(cfg.algo)) {
    const NcbsResult res = run_ncbs(measure.a, measure.b, data.noisy_train, noise.correct, steps,
                                    cfg.cpe, solver_rng);
    clean_confusion = empirical_confusion(res.classifier, data.clean_test);
    Dataset noisy_test = data.clean_test;
    noisy_test.labels = data.noisy_test_labels;
    noisy_confusion = empirical_confusion(res.classifier, noisy_test);
  } else if (is_lr_family(cfg.algo)) {
    CostSensitiveClassifier classifier;
    if (cfg.algo == "plugin") {
      auto model = std::make_shared<const CpeModel>(
          cfg.cv_folds >= 2 ? train_cv(data.noisy_train, cfg.cpe, cfg.cv_folds, n)
                            : train(data.noisy_train, cfg.cpe, n));
      classifier = plugin_classifier(std::move(model), noise.correct);
    } else {
      const ExampleLoss loss = cfg.algo == "nclr-backward" ? backward_loss(noise.correct)
                                                           : forward_loss(noise.correct);
      auto model = std::make_shared<const CpeModel>(
          cfg.cv_folds >= 2 ? train_cv(data.noisy_train, cfg.cpe, cfg.cv_folds, n, &loss)
                            : train_custom(data.noisy_train, cfg.cpe, n, loss));
      classifier = {std::move(model), Matrix::ones(n, n) - Matrix::identity(n)};
    }
    clean_confusion = empirical_confusion(classifier, data.clean_test);
    Dataset noisy_test = data.clean_test;
    noisy_test.labels = data.noisy_test_labels;
    noisy_confusion = empirical_confusion(classifier, noisy_test);
  } else {
    throw ConfigError("unknown algo '" + cfg.algo +
                      "' (expected ncfw|ncbs|fw|bs|plugin|nclr-backward|nclr-forward)");
  }

  RunResult r;
  r.algo = cfg.algo;
  r.measure = cfg.ab_path.empty() ? cfg.measure : "ratio-of-linear";
  r.sigma = cfg.sigma;
  r.noise_scheme = cfg.noise_matrix_path.empty() ? cfg.noise_scheme : "matrix";
  r.noise_matrix = cfg.noise_matrix_path;
  r.m = cfg.train_path.empty() ? cfg.m : data.noisy_train.size();
  r.steps = steps;
  r.seed = cfg.seed;
  r.clean_test_loss = evaluate(measure, clean_confusion);
  r.noisy_test_loss = evaluate(measure, noisy_confusion);
  r.one_norm_of_t_inv = noise.correct.one_norm_of_inv;
  if (noise.used_estimate) {
    r.used_estimate = true;
    r.one_norm_of_t_hat_inv = noise.correct.one_norm_of_inv;
    r.t_inv_estimate_gap_one_norm = induced_one_norm(noise.correct.t_inv - noise.data.t_inv);
    r.one_norm_of_t_inv = noise.data.one_norm_of_inv;
  }
  const auto end = std::chrono::steady_clock::now();
  r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
  return r;
}

std::string to_json_line(const RunResult& r) {
  nlohmann::ordered_json j;
  j["algo"] = r.algo;
  j["measure"] = r.measure;
  j["sigma"] = r.sigma;
  j["noise_scheme"] = r.noise_scheme;
  j["noise_matrix"] = r.noise_matrix;
  j["m"] = r.m;
  j["steps"] = r.steps;
  j["seed"] = r.seed;
  j["clean_test_loss"] = r.clean_test_loss;
  j["noisy_test_loss"] = r.noisy_test_loss;
  j["one_norm_of_T_inv"] = r.one_norm_of_t_inv;
  if (r.used_estimate) {
    j["one_norm_of_T_hat_inv"] = r.one_norm_of_t_hat_inv;
    j["T_inv_estimate_gap_one_norm"] = r.t_inv_estimate_gap_one_norm;
  }
  j["wall_ms"] = r.wall_ms;
  return j.dump();
}

std::string record_key(const RunResult& r) {
  std::ostringstream key;
  key << r.algo << '|' << r.measure << '|' << r.sigma << '|' << r.noise_scheme << '|'
      << r.noise_matrix << '|' << r.m << '|' << r.steps << '|' << r.seed;
  return key.str();
}

void run_synth(const SynthConfig& cfg) {
  namespace fs = std::filesystem;
  if (cfg.out_dir.empty()) throw ConfigError("synth: --out directory required");
  fs::create_directories(cfg.out_dir);

  const SyntheticSpec spec = cfg.spec_path.empty() ? default_synthetic_spec() : load_spec(cfg.spec_path);
  NoiseModel noise;
  if (!cfg.noise_matrix_path.empty()) {
    noise = build_noise_model(read_matrix_csv(cfg.noise_matrix_path));
  } else if (cfg.noise_scheme == "uniform") {
    noise = uniform_ccn(spec.n, cfg.sigma);
  } else if (cfg.noise_scheme == "random-column") {
    Rng rng(cfg.seed, kNoiseMatrix);
    noise = random_column_ccn(spec.n, cfg.sigma, rng);
  } else {
    throw ConfigError("unknown noise scheme '" + cfg.noise_scheme + "'");
  }

  Rng train_rng(cfg.seed, kTrainData);
  Dataset train = gen_synthetic(spec, cfg.m, train_rng);
  const std::vector<int> clean_labels = train.labels;
  Rng flip_rng(cfg.seed, kTrainFlip);
  train.labels = flip_labels(train.labels, noise, flip_rng);

  Rng test_rng(cfg.seed, kTestData);
  const Dataset test = gen_synthetic(spec, cfg.test_m, test_rng);

  const fs::path dir(cfg.out_dir);
  write_dataset_csv(train, (dir / "train.csv").string(),
                    cfg.sigma > 0.0 ? clean_labels : std::vector<int>{});
  write_dataset_csv(test, (dir / "test.csv").string());
  write_matrix_csv(noise.t, (dir / "noise_matrix.csv").string());
  save_spec(spec, (dir / "spec.txt").string());
}

std::size_t run_sweep(const SweepConfig& cfg, std::ostream* log) {
  if (cfg.out_path.empty()) throw ConfigError("sweep: --out file required");
  if (cfg.sigmas.empty() || cfg.ms.empty() || cfg.seeds.empty()) {
    throw ConfigError("sweep: need at least one sigma, one m and one seed");
  }

  // keys already present in the results file
  std::set<std::string> done;
  {
    std::ifstream in(cfg.out_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      RunResult r;
      r.algo = j.value("algo", "");
      r.measure = j.value("measure", "");
      r.sigma = j.value("sigma", 0.0);
      r.noise_scheme = j.value("noise_scheme", "");
      r.noise_matrix = j.value("noise_matrix", "");
      r.m = j.value("m", std::size_t{0});
      r.steps = j.value("steps", std::size_t{0});
      r.seed = j.value("seed", std::uint64_t{0});
      done.insert(record_key(r));
    }
  }

  std::vector<RunConfig> cells;
  for (const double sigma : cfg.sigmas) {
    for (const std::size_t m : cfg.ms) {
      for (const std::uint64_t seed : cfg.seeds) {
        RunConfig rc = cfg.base;
        rc.sigma = sigma;
        rc.m = m;
        rc.seed = seed;
        cells.push_back(std::move(rc));
      }
    }
  }

  std::ofstream out(cfg.out_path, std::ios::app);
  if (!out) throw Error("cannot open for appending: " + cfg.out_path);

  // Results are written in cell order regardless of which worker finishes
  // first, so a completed sweep file has a deterministic layout.
  std::mutex mu;
  std::map<std::size_t, std::string> pending;  // cell index -> line ("" = skipped)
  std::size_t next_write = 0;
  std::size_t next_cell = 0;
  std::size_t written = 0;

  auto worker = [&]() {
    for (;;) {
      std::size_t idx;
      {
        std::lock_guard lock(mu);
        if (next_cell >= cells.size()) return;
        idx = next_cell++;
      }
      const RunConfig& rc = cells[idx];
      std::string line;
      RunResult probe;
      probe.algo = rc.algo;
      probe.measure = rc.ab_path.empty() ? rc.measure : "ratio-of-linear";
      probe.sigma = rc.sigma;
      probe.noise_scheme = rc.noise_matrix_path.empty() ? rc.noise_scheme : "matrix";
      probe.noise_matrix = rc.noise_matrix_path;
      probe.m = rc.m;
      probe.steps = rc.steps == 0 ? default_steps(rc.algo) : rc.steps;
      probe.seed = rc.seed;
      if (!done.count(record_key(probe))) {
        line = to_json_line(run_single(rc));
      }
      {
        std::lock_guard lock(mu);
        pending[idx] = std::move(line);
        while (!pending.empty() && pending.begin()->first == next_write) {
          const std::string& ready = pending.begin()->second;
          if (!ready.empty()) {
            out << ready << '\n';
            out.flush();
            ++written;
            if (log) *log << ready << '\n';
          }
          pending.erase(pending.begin());
          ++next_write;
        }
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k + 1 < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return written;
}

void write_report(const std::string& results_path, std::ostream& out) {
  std::ifstream in(results_path);
  if (!in) throw Error("cannot open: " + results_path);

  struct Group {
    std::vector<double> clean, noisy;
  };
  // ordered key: (measure, algo, sigma, m)
  std::map<std::tuple<std::string, std::string, double, std::size_t>, Group> groups;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(results_path + ": bad JSON line: " + line);
    Group& g = groups[{j.value("measure", ""), j.value("algo", ""), j.value("sigma", 0.0),
                       j.value("m", std::size_t{0})}];
    g.clean.push_back(j.value("clean_test_loss", 0.0));
    g.noisy.push_back(j.value("noisy_test_loss", 0.0));
  }
  if (groups.empty()) throw EmptyResults(results_path + ": no records");

  auto mean_sem = [](const std::vector<double>& v) {
    const double k = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= k;
    double sem = 0.0;
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      sem = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    }
    return std::pair{mean, sem};
  };

  out << "measure,algo,sigma,m,runs,clean_mean,clean_sem,noisy_mean,noisy_sem\n";
  out.precision(10);
  for (const auto& [key, g] : groups) {
    const auto [cm, cs] = mean_sem(g.clean);
    const auto [nm, ns] = mean_sem(g.noisy);
    out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
        << std::get<3>(key) << ',' << g.clean.size() << ',' << cm << ',' << cs << ',' << nm << ','
        << ns << '\n';
  }
}

}  // namespace nclearn
