#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <memory>
#include <vector>

#include "nclearn/baselines.hpp"
#include "nclearn/classifier.hpp"
#include "nclearn/cpe.hpp"
#include "nclearn/data.hpp"
#include "nclearn/errors.hpp"
#include "nclearn/matrix.hpp"
#include "nclearn/measures.hpp"
#include "nclearn/ncbs.hpp"
#include "nclearn/ncfw.hpp"
#include "nclearn/noise.hpp"
#include "nclearn/rng.hpp"

namespace py = pybind11;
using namespace nclearn;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& arr) {
  if (arr.ndim() != 2) throw ShapeMismatch("expected a 2-D array");
  Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
  std::memcpy(m.data().data(), arr.data(), sizeof(double) * m.data().size());
  return m;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> arr({m.rows(), m.cols()});
  std::memcpy(arr.mutable_data(), m.data().data(), sizeof(double) * m.data().size());
  return arr;
}

Dataset to_dataset(const DoubleArray& features, const std::vector<int>& labels) {
  Dataset ds;
  ds.features = to_matrix(features);
  if (labels.size() != ds.features.rows()) {
    throw ShapeMismatch("label count does not match the number of feature rows");
  }
  ds.labels = labels;
  return ds;
}

TrainConfig make_train_config(double l2_lambda, std::size_t max_iters, double grad_tol, double lr) {
  TrainConfig cfg;
  cfg.l2_lambda = l2_lambda;
  cfg.max_iters = max_iters;
  cfg.grad_tolerance = grad_tol;
  cfg.learning_rate = lr;
  return cfg;
}

MeasureSpec make_measure(const std::string& name, std::size_t n) { return measure_from_name(name, n); }

struct PyNcfwResult {
  RandomizedClassifier classifier;
  std::vector<double> trace_psi;
  std::vector<double> trace_weights;

  std::vector<double> weights() const {
    std::vector<double> out;
    for (const auto& c : classifier.components) out.push_back(c.weight);
    return out;
  }
  std::vector<py::array_t<double>> losses() const {
    std::vector<py::array_t<double>> out;
    for (const auto& c : classifier.components) out.push_back(to_array(c.classifier.loss));
    return out;
  }
  py::array_t<double> confusion(const DoubleArray& features, const std::vector<int>& labels) const {
    return to_array(expected_confusion(classifier, to_dataset(features, labels)));
  }
};

struct PyNcbsResult {
  CostSensitiveClassifier classifier;
  std::vector<double> gammas;
  std::vector<bool> accepted;
  std::vector<double> trace_psi;

  py::array_t<double> loss() const { return to_array(classifier.loss); }
  std::vector<int> predict(const DoubleArray& features) const {
    const Matrix f = to_matrix(features);
    std::vector<int> out;
    out.reserve(f.rows());
    for (std::size_t i = 0; i < f.rows(); ++i)
      out.push_back(classify(classifier, {f.row_ptr(i), f.cols()}));
    return out;
  }
  py::array_t<double> confusion(const DoubleArray& features, const std::vector<int>& labels) const {
    return to_array(empirical_confusion(classifier, to_dataset(features, labels)));
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "noise-corrected learning for non-decomposable performance measures "
            "(class labels are 1-based throughout)";

  py::class_<NoiseModel>(m, "NoiseModel")
      .def_static("identity", &NoiseModel::identity, py::arg("n"))
      .def_static(
          "from_matrix", [](const DoubleArray& t) { return build_noise_model(to_matrix(t)); },
          py::arg("t"))
      .def_static("uniform", &uniform_ccn, py::arg("n"), py::arg("sigma"))
      .def_static(
          "random_column",
          [](std::size_t n, double sigma, std::uint64_t seed) {
            Rng rng(seed);
            return random_column_ccn(n, sigma, rng);
          },
          py::arg("n"), py::arg("sigma"), py::arg("seed"))
      .def_property_readonly("n", [](const NoiseModel& nm) { return nm.n; })
      .def_property_readonly("t", [](const NoiseModel& nm) { return to_array(nm.t); })
      .def_property_readonly("t_inv", [](const NoiseModel& nm) { return to_array(nm.t_inv); })
      .def_property_readonly("one_norm_of_inv",
                             [](const NoiseModel& nm) { return nm.one_norm_of_inv; });

  m.def(
      "flip_labels",
      [](const std::vector<int>& labels, const NoiseModel& noise, std::uint64_t seed) {
        Rng rng(seed);
        return flip_labels(labels, noise, rng);
      },
      py::arg("labels"), py::arg("noise"), py::arg("seed"));
  m.def(
      "correct_loss",
      [](const NoiseModel& noise, const DoubleArray& loss) {
        return to_array(correct_loss(noise, to_matrix(loss)));
      },
      py::arg("noise"), py::arg("loss"));
  m.def("correct_probs", &correct_probs, py::arg("noise"), py::arg("p_noisy"));
  m.def(
      "correct_confusion",
      [](const NoiseModel& noise, const DoubleArray& c) {
        return to_array(correct_confusion(noise, to_matrix(c)));
      },
      py::arg("noise"), py::arg("confusion"));

  m.def(
      "invert", [](const DoubleArray& a) { return to_array(invert(to_matrix(a))); }, py::arg("a"));
  m.def(
      "induced_one_norm", [](const DoubleArray& a) { return induced_one_norm(to_matrix(a)); },
      py::arg("a"));

  m.def(
      "evaluate",
      [](const std::string& measure, const DoubleArray& c) {
        const Matrix conf = to_matrix(c);
        return evaluate(make_measure(measure, conf.rows()), conf);
      },
      py::arg("measure"), py::arg("confusion"));
  m.def(
      "gradient",
      [](const std::string& measure, const DoubleArray& c) {
        const Matrix conf = to_matrix(c);
        return to_array(gradient(make_measure(measure, conf.rows()), conf));
      },
      py::arg("measure"), py::arg("confusion"));
  m.def(
      "evaluate_corrected",
      [](const std::string& measure, const NoiseModel& noise, const DoubleArray& c) {
        const Matrix conf = to_matrix(c);
        return evaluate_corrected(make_measure(measure, conf.rows()), noise, conf);
      },
      py::arg("measure"), py::arg("noise"), py::arg("confusion"));
  m.def(
      "micro_f1_parts",
      [](std::size_t n) {
        const auto [a, b] = micro_f1_parts(n);
        return py::make_tuple(to_array(a), to_array(b));
      },
      py::arg("n"));

  m.def(
      "gen_synthetic",
      [](std::size_t m_rows, std::uint64_t seed, const std::string& spec_path) {
        const SyntheticSpec spec = spec_path.empty() ? default_synthetic_spec() : load_spec(spec_path);
        Rng rng(seed);
        const Dataset ds = gen_synthetic(spec, m_rows, rng);
        return py::make_tuple(to_array(ds.features), ds.labels);
      },
      py::arg("m"), py::arg("seed"), py::arg("spec_path") = "");
  m.def(
      "true_eta",
      [](const std::vector<double>& x, const std::string& spec_path) {
        const SyntheticSpec spec = spec_path.empty() ? default_synthetic_spec() : load_spec(spec_path);
        return true_eta(spec, x);
      },
      py::arg("x"), py::arg("spec_path") = "");
  m.def(
      "bayes_oracle",
      [](const std::string& measure, std::size_t n, std::size_t eval_points, std::uint64_t seed,
         std::size_t steps, const std::string& spec_path) {
        const SyntheticSpec spec = spec_path.empty() ? default_synthetic_spec() : load_spec(spec_path);
        Rng rng(seed);
        return bayes_oracle(spec, make_measure(measure, n), eval_points, rng, steps);
      },
      py::arg("measure"), py::arg("n"), py::arg("eval_points"), py::arg("seed"),
      py::arg("steps") = 0, py::arg("spec_path") = "");

  py::class_<CpeModel, std::shared_ptr<CpeModel>>(m, "CpeModel")
      .def_property_readonly("n", [](const CpeModel& c) { return c.n; })
      .def_property_readonly("weights", [](const CpeModel& c) { return to_array(c.weights); })
      .def_property_readonly("biases", [](const CpeModel& c) { return c.biases; })
      .def(
          "predict_proba",
          [](const CpeModel& c, const DoubleArray& features) {
            return to_array(predict_proba_matrix(c, to_matrix(features)));
          },
          py::arg("features"));

  m.def(
      "train_cpe",
      [](const DoubleArray& features, const std::vector<int>& labels, std::size_t n,
         double l2_lambda, std::size_t max_iters, double grad_tol, double lr) {
        return train(to_dataset(features, labels), make_train_config(l2_lambda, max_iters, grad_tol, lr), n);
      },
      py::arg("features"), py::arg("labels"), py::arg("n") = 0, py::arg("l2_lambda") = 1e-4,
      py::arg("max_iters") = 2000, py::arg("grad_tol") = 1e-6, py::arg("lr") = 1.0);

  py::class_<PyNcfwResult>(m, "NcfwResult")
      .def_property_readonly("weights", &PyNcfwResult::weights)
      .def_property_readonly("losses", &PyNcfwResult::losses)
      .def_property_readonly("trace_psi", [](const PyNcfwResult& r) { return r.trace_psi; })
      .def_property_readonly("trace_weights",
                             [](const PyNcfwResult& r) { return r.trace_weights; })
      .def("expected_confusion", &PyNcfwResult::confusion, py::arg("features"), py::arg("labels"));

  m.def(
      "run_ncfw",
      [](const DoubleArray& features, const std::vector<int>& labels, const NoiseModel& noise,
         const std::string& measure, std::size_t steps, std::uint64_t seed, double l2_lambda,
         std::size_t max_iters, double grad_tol, double lr) {
        Rng rng(seed);
        const NcfwResult res =
            run_ncfw(make_measure(measure, noise.n), to_dataset(features, labels), noise, steps,
                     make_train_config(l2_lambda, max_iters, grad_tol, lr), rng);
        PyNcfwResult out;
        out.classifier = res.classifier;
        for (const FwStep& s : res.trace.steps) {
          out.trace_psi.push_back(s.psi);
          out.trace_weights.push_back(s.mix_weight);
        }
        return out;
      },
      py::arg("features"), py::arg("labels"), py::arg("noise"), py::arg("measure") = "qmean",
      py::arg("steps") = 5000, py::arg("seed") = 1, py::arg("l2_lambda") = 1e-4,
      py::arg("max_iters") = 2000, py::arg("grad_tol") = 1e-6, py::arg("lr") = 1.0);

  py::class_<PyNcbsResult>(m, "NcbsResult")
      .def_property_readonly("loss", &PyNcbsResult::loss)
      .def_property_readonly("gammas", [](const PyNcbsResult& r) { return r.gammas; })
      .def_property_readonly("accepted", [](const PyNcbsResult& r) { return r.accepted; })
      .def_property_readonly("trace_psi", [](const PyNcbsResult& r) { return r.trace_psi; })
      .def("predict", &PyNcbsResult::predict, py::arg("features"))
      .def("empirical_confusion", &PyNcbsResult::confusion, py::arg("features"), py::arg("labels"));

  m.def(
      "run_ncbs",
      [](const DoubleArray& features, const std::vector<int>& labels, const NoiseModel& noise,
         std::size_t steps, std::uint64_t seed, double l2_lambda, std::size_t max_iters,
         double grad_tol, double lr) {
        Rng rng(seed);
        const NcbsResult res =
            micro_f1_run(to_dataset(features, labels), noise, steps,
                         make_train_config(l2_lambda, max_iters, grad_tol, lr), rng);
        PyNcbsResult out;
        out.classifier = res.classifier;
        for (const BsStep& s : res.trace.steps) {
          out.gammas.push_back(s.gamma);
          out.accepted.push_back(s.accepted);
          out.trace_psi.push_back(s.psi);
        }
        return out;
      },
      py::arg("features"), py::arg("labels"), py::arg("noise"), py::arg("steps") = 200,
      py::arg("seed") = 1, py::arg("l2_lambda") = 1e-4, py::arg("max_iters") = 2000,
      py::arg("grad_tol") = 1e-6, py::arg("lr") = 1.0);

  m.attr("__version__") = "0.1.0";
}
