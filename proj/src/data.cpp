#include "nclearn/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nclearn/errors.hpp"

namespace nclearn {

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.push_back("");
  return cells;
}

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.features = Matrix(idx.size(), ds.dim());
  out.labels.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto src = ds.row(idx[r]);
    std::copy(src.begin(), src.end(), out.features.row_ptr(r));
    out.labels.push_back(ds.labels[idx[r]]);
  }
  return out;
}

}  // namespace

int Dataset::max_label() const {
  int best = 0;
  for (int y : labels) best = std::max(best, y);
  return best;
}

SyntheticSpec default_synthetic_spec() {
  SyntheticSpec spec;
  spec.n = 3;
  spec.d = 2;
  spec.mixture = {
      {1.0 / 3.0, {0.0, 0.0}, {1.0, 1.0}},
      {1.0 / 3.0, {3.0, 0.0}, {1.0, 1.0}},
      {1.0 / 3.0, {0.0, 3.0}, {1.0, 1.0}},
  };
  spec.eta_weights = Matrix{{-1.0, -1.0}, {1.5, -0.5}, {-0.5, 1.5}};
  spec.eta_biases = {1.5, -1.5, -1.5};
  return spec;
}

std::vector<double> true_eta(const SyntheticSpec& spec, std::span<const double> x) {
  if (x.size() != spec.d) throw ShapeMismatch("true_eta: feature dimension mismatch");
  std::vector<double> scores(spec.n);
  for (std::size_t y = 0; y < spec.n; ++y) {
    double s = spec.eta_biases[y];
    for (std::size_t j = 0; j < spec.d; ++j) s += spec.eta_weights(y, j) * x[j];
    scores[y] = s;
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : scores) s /= total;
  return scores;
}

Dataset gen_synthetic(const SyntheticSpec& spec, std::size_t m, Rng& rng) {
  if (m == 0) throw EmptySample("gen_synthetic: m must be positive");
  Dataset ds;
  ds.features = Matrix(m, spec.d);
  ds.labels.reserve(m);
  std::vector<double> x(spec.d);
  for (std::size_t i = 0; i < m; ++i) {
    // mixture component by inverse CDF over weights
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t comp = spec.mixture.size() - 1;
    for (std::size_t k = 0; k < spec.mixture.size(); ++k) {
      cum += spec.mixture[k].weight;
      if (u < cum) {
        comp = k;
        break;
      }
    }
    const GaussianComponent& g = spec.mixture[comp];
    for (std::size_t j = 0; j < spec.d; ++j) {
      x[j] = g.mean[j] + g.stddev[j] * rng.normal();
      ds.features(i, j) = x[j];
    }
    const std::vector<double> eta = true_eta(spec, x);
    const double v = rng.uniform();
    double acc = 0.0;
    int label = static_cast<int>(spec.n);
    for (std::size_t y = 0; y < spec.n; ++y) {
      acc += eta[y];
      if (v < acc) {
        label = static_cast<int>(y) + 1;
        break;
      }
    }
    ds.labels.push_back(label);
  }
  return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line, ',');

  std::size_t label_idx = header.size();
  bool numeric_selector = !label_column.empty() &&
                          label_column.find_first_not_of("0123456789") == std::string::npos;
  if (numeric_selector) {
    label_idx = std::stoul(label_column);
    if (label_idx >= header.size()) {
      throw MissingLabelColumn(path + ": label column index " + label_column + " out of range");
    }
  } else {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == label_column) {
        label_idx = j;
        break;
      }
    }
    if (label_idx == header.size()) {
      throw MissingLabelColumn(path + ": no column named '" + label_column + "'");
    }
  }

  std::vector<std::vector<double>> feature_rows;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line, ',');
    if (cells.size() != header.size()) {
      throw ParseError(path + ": line " + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string& cell = cells[j];
      std::size_t pos = 0;
      double v = 0.0;
      bool ok = true;
      try {
        v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        ok = pos == cell.size() && std::isfinite(v);
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) {
        throw ParseError(path + ": line " + std::to_string(lineno) + ", column '" + header[j] +
                         "': bad numeric cell '" + cell + "'");
      }
      if (j == label_idx) {
        const int y = static_cast<int>(std::llround(v));
        if (std::abs(v - y) > 1e-9 || y < 1) {
          throw ParseError(path + ": line " + std::to_string(lineno) +
                           ": label must be a positive integer (1-based), got '" + cell + "'");
        }
        labels.push_back(y);
      } else {
        row.push_back(v);
      }
    }
    feature_rows.push_back(std::move(row));
  }
  if (labels.empty()) throw ParseError(path + ": no data rows");

  Dataset ds;
  ds.features = Matrix(feature_rows.size(), feature_rows.front().size());
  for (std::size_t i = 0; i < feature_rows.size(); ++i) {
    std::copy(feature_rows[i].begin(), feature_rows[i].end(), ds.features.row_ptr(i));
  }
  ds.labels = std::move(labels);
  return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path,
                       const std::vector<int>& clean_labels) {
  if (!clean_labels.empty() && clean_labels.size() != ds.size()) {
    throw ShapeMismatch("write_dataset_csv: clean label count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  for (std::size_t j = 0; j < ds.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "label";
  if (!clean_labels.empty()) out << ",label_clean";
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.dim(); ++j) out << ds.features(i, j) << ',';
    out << ds.labels[i];
    if (!clean_labels.empty()) out << ',' << clean_labels[i];
    out << '\n';
  }
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double ratio, Rng& rng) {
  if (ds.size() == 0) throw EmptySample("split_train_test: empty dataset");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
  const std::size_t m = ds.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = m; i > 1; --i) {  // Fisher-Yates
    std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
  }
  std::size_t first = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(m)));
  first = std::clamp<std::size_t>(first, 1, m > 1 ? m - 1 : 1);
  const std::vector<std::size_t> head(idx.begin(), idx.begin() + first);
  const std::vector<std::size_t> tail(idx.begin() + first, idx.end());
  return {take_rows(ds, head), take_rows(ds, tail)};
}

std::pair<Dataset, Dataset> split_halves(const Dataset& ds) {
  if (ds.size() == 0) throw EmptySample("split_halves: empty dataset");
  const std::size_t m = ds.size();
  const std::size_t first = (m + 1) / 2;
  std::vector<std::size_t> head(first), tail(m - first);
  std::iota(head.begin(), head.end(), 0);
  std::iota(tail.begin(), tail.end(), first);
  return {take_rows(ds, head), take_rows(ds, tail)};
}

SyntheticSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);
  SyntheticSpec spec;
  std::vector<std::vector<double>> eta_rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string key;
    ss >> key;
    auto read_doubles = [&](std::size_t count) {
      std::vector<double> vals(count);
      for (double& v : vals) {
        if (!(ss >> v)) {
          throw ParseError(path + ": line " + std::to_string(lineno) + ": expected " +
                           std::to_string(count) + " numbers after '" + key + "'");
        }
      }
      return vals;
    };
    if (key == "classes") {
      ss >> spec.n;
    } else if (key == "features") {
      ss >> spec.d;
    } else if (key == "component") {
      if (spec.d == 0) throw ParseError(path + ": 'features' must come before 'component'");
      GaussianComponent g;
      const auto vals = read_doubles(1 + 2 * spec.d);
      g.weight = vals[0];
      g.mean.assign(vals.begin() + 1, vals.begin() + 1 + spec.d);
      g.stddev.assign(vals.begin() + 1 + spec.d, vals.end());
      for (double s : g.stddev) {
        if (s <= 0.0) throw ParseError(path + ": component stddev must be positive");
      }
      spec.mixture.push_back(std::move(g));
    } else if (key == "eta") {
      if (spec.d == 0) throw ParseError(path + ": 'features' must come before 'eta'");
      const auto vals = read_doubles(spec.d + 1);
      eta_rows.emplace_back(vals.begin(), vals.begin() + spec.d);
      spec.eta_biases.push_back(vals.back());
    } else {
      throw ParseError(path + ": line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (spec.n == 0 || spec.d == 0 || spec.mixture.empty() || eta_rows.size() != spec.n) {
    throw ParseError(path + ": incomplete spec (need classes, features, components, one eta row per class)");
  }
  double total_weight = 0.0;
  for (const auto& g : spec.mixture) total_weight += g.weight;
  if (std::abs(total_weight - 1.0) > 1e-6) {
    throw ParseError(path + ": mixture weights sum to " + std::to_string(total_weight));
  }
  spec.eta_weights = Matrix(spec.n, spec.d);
  for (std::size_t i = 0; i < spec.n; ++i) {
    std::copy(eta_rows[i].begin(), eta_rows[i].end(), spec.eta_weights.row_ptr(i));
  }
  return spec;
}

void save_spec(const SyntheticSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out.precision(17);
  out << "# synthetic data spec: Gaussian mixture + softmax-linear class probabilities\n";
  out << "classes " << spec.n << "\n";
  out << "features " << spec.d << "\n";
  for (const auto& g : spec.mixture) {
    out << "component " << g.weight;
    for (double v : g.mean) out << ' ' << v;
    for (double v : g.stddev) out << ' ' << v;
    out << '\n';
  }
  for (std::size_t i = 0; i < spec.n; ++i) {
    out << "eta";
    for (std::size_t j = 0; j < spec.d; ++j) out << ' ' << spec.eta_weights(i, j);
    out << ' ' << spec.eta_biases[i] << '\n';
  }
}

}  // namespace nclearn
