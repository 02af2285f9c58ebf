#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vpr/experiment.hpp"
#include "vpr/inference.hpp"
#include "vpr/io.hpp"
#include "vpr/map_model.hpp"
#include "vpr/oracle.hpp"
#include "vpr/sensor_model.hpp"

namespace py = pybind11;
using namespace vpr;

namespace {

// T x M array, one belief per row.
Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& rows, int m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m);
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
  return out;
}

LikelihoodSequence unstack(const Eigen::MatrixXd& rows) {
  LikelihoodSequence out;
  for (Eigen::Index k = 0; k < rows.rows(); ++k) out.push_back(rows.row(k).transpose());
  return out;
}

py::dict inference_dict(const InferenceResult& r, int m) {
  py::dict d;
  d["filtered"] = stack(r.filtered, m);
  d["smoothed"] = stack(r.smoothed, m);
  d["log_likelihood"] = r.log_likelihood;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Road-graph HMM place recognition core";

  py::register_exception<MapError>(m, "MapError", PyExc_ValueError);
  py::register_exception<InferenceError>(m, "InferenceError", PyExc_RuntimeError);

  py::class_<RoadGraph>(m, "RoadGraph")
      .def(py::init([](int num_nodes, const std::vector<std::tuple<NodeId, NodeId, double>>& edges) {
             std::vector<Edge> e;
             for (const auto& [from, to, w] : edges) e.push_back({from, to, w});
             return RoadGraph(num_nodes, std::move(e));
           }),
           py::arg("num_nodes"), py::arg("edges"))
      .def_property_readonly("num_nodes", &RoadGraph::num_nodes)
      .def_property_readonly("edges",
                             [](const RoadGraph& g) {
                               std::vector<std::tuple<NodeId, NodeId, double>> out;
                               for (const Edge& e : g.edges()) out.emplace_back(e.from, e.to, e.weight);
                               return out;
                             })
      .def("to_json", &save_map)
      .def("__eq__", [](const RoadGraph& a, const RoadGraph& b) { return a == b; });

  py::class_<MapGeneratorConfig>(m, "MapGeneratorConfig").def(py::init<>());
  m.def("load_map", [](const std::string& text) { return load_map(text); }, py::arg("text"));
  m.def("save_map", &save_map, py::arg("graph"));
  m.def("generate_default_map", &generate_default_map, py::arg("num_nodes") = kDefaultMapNodes,
        py::arg("main_road_nodes") = std::set<NodeId>{1, 2, 3, 4, 5, 6, 7, 8, 9},
        py::arg("seed") = kDefaultMapSeed, py::arg("config") = MapGeneratorConfig{});

  py::class_<TransitionMatrix>(m, "TransitionMatrix")
      .def(py::init<Eigen::MatrixXd>(), py::arg("entries"))
      .def_property_readonly("matrix", &TransitionMatrix::matrix)
      .def_property_readonly("size", &TransitionMatrix::size);
  m.def("build_transition_matrix", &build_transition_matrix, py::arg("graph"));

  py::class_<ConfusionBase>(m, "ConfusionBase")
      .def(py::init<Eigen::MatrixXd>(), py::arg("entries"))
      .def_property_readonly("matrix", &ConfusionBase::matrix);
  py::class_<ObservationMatrix>(m, "ObservationMatrix")
      .def(py::init<Eigen::MatrixXd>(), py::arg("entries"))
      .def_property_readonly("matrix", &ObservationMatrix::matrix)
      .def_property_readonly("size", &ObservationMatrix::size);

  m.def("build_confusion_base", &build_confusion_base, py::arg("graph"),
        py::arg("diagonal_target") = kDefaultDiagonalTarget);
  m.def("gaussian_kernel", &gaussian_kernel, py::arg("j"), py::arg("i"), py::arg("sigma"));
  m.def("apply_gaussian_noise",
        [](const ConfusionBase& base, double sigma) { return apply_gaussian_noise(base, NoiseSpec(sigma)); },
        py::arg("base"), py::arg("sigma"));
  m.def("likelihood_vector", &likelihood_vector, py::arg("obs"), py::arg("y"));

  m.def(
      "filter_step",
      [](const Eigen::VectorXd& prior, const TransitionMatrix& a, const Eigen::VectorXd& likelihood) {
        auto r = filter_step(prior, a, likelihood);
        return py::make_tuple(r.posterior, r.normalizer);
      },
      py::arg("prior"), py::arg("transition"), py::arg("likelihood"));
  m.def(
      "run_filter",
      [](const TransitionMatrix& a, const ObservationMatrix& obs, const std::vector<NodeId>& ys,
         const Eigen::VectorXd& initial) {
        auto r = run_filter(a, obs, ys, InitialBelief(initial));
        return py::make_tuple(stack(r.beliefs, a.size()), r.log_likelihood);
      },
      py::arg("transition"), py::arg("obs"), py::arg("measurements"), py::arg("initial"));
  m.def(
      "infer",
      [](const TransitionMatrix& a, const ObservationMatrix& obs, const std::vector<NodeId>& ys,
         const Eigen::VectorXd& initial) {
        return inference_dict(infer(a, obs, ys, InitialBelief(initial)), a.size());
      },
      py::arg("transition"), py::arg("obs"), py::arg("measurements"), py::arg("initial"));
  m.def(
      "infer_likelihoods",
      [](const TransitionMatrix& a, const Eigen::MatrixXd& likelihoods, const Eigen::VectorXd& initial) {
        return inference_dict(infer(a, unstack(likelihoods), InitialBelief(initial)), a.size());
      },
      py::arg("transition"), py::arg("likelihoods"), py::arg("initial"),
      "Like infer, but takes a T x M array of raw likelihood rows.");
  m.def(
      "enumerate_posteriors",
      [](const TransitionMatrix& a, const Eigen::MatrixXd& likelihoods, const Eigen::VectorXd& initial,
         std::uint64_t max_paths) {
        auto r = enumerate_posteriors(a, unstack(likelihoods), InitialBelief(initial), {max_paths});
        py::dict d;
        d["filtered"] = stack(r.filtered, a.size());
        d["smoothed"] = stack(r.smoothed, a.size());
        d["evidence"] = r.evidence;
        return d;
      },
      py::arg("transition"), py::arg("likelihoods"), py::arg("initial"),
      py::arg("max_paths") = EnumerationBudget{}.max_paths);
  m.def("map_estimate", &map_estimate, py::arg("belief"));

  m.def(
      "sample_trajectory",
      [](const TransitionMatrix& a, const ObservationMatrix& obs, NodeId initial_state, int steps,
         std::uint64_t seed) {
        auto s = sample_trajectory(a, obs, initial_state, steps, seed);
        return py::make_tuple(s.true_states, s.measurements);
      },
      py::arg("transition"), py::arg("obs"), py::arg("initial_state"), py::arg("steps"), py::arg("seed"));
  m.def(
      "accuracy",
      [](const std::vector<NodeId>& truth, const std::vector<NodeId>& est) { return accuracy(truth, est); },
      py::arg("true_states"), py::arg("estimates"));
  m.def("trial_seed", &trial_seed, py::arg("master_seed"), py::arg("trial"));

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("filter_accuracy", &ExperimentResult::filter_accuracy)
      .def_readonly("smoother_accuracy", &ExperimentResult::smoother_accuracy)
      .def_readonly("seeds", &ExperimentResult::seeds)
      .def_readonly("filter_mean", &ExperimentResult::filter_mean)
      .def_readonly("filter_std", &ExperimentResult::filter_std)
      .def_readonly("smoother_mean", &ExperimentResult::smoother_mean)
      .def_readonly("smoother_std", &ExperimentResult::smoother_std);

  m.def(
      "run_experiment",
      [](NodeId initial_state, double sigma, int steps, int trials, std::uint64_t master_seed,
         const std::string& map_source, int threads) {
        ExperimentConfig c{initial_state, sigma, steps, trials, master_seed, map_source, threads};
        py::gil_scoped_release release;
        return run_experiment(c);
      },
      py::arg("initial_state") = 5, py::arg("sigma") = 1.0, py::arg("steps") = 50, py::arg("trials") = 1,
      py::arg("master_seed") = 0, py::arg("map_source") = "default", py::arg("threads") = 1);

  m.def(
      "replicate_table1",
      [](std::uint64_t master_seed, int trials, int threads) {
        std::vector<Table1Row> rows;
        {
          py::gil_scoped_release release;
          rows = replicate_table1(master_seed, trials, threads);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["label"] = r.label;
          d["initial_state"] = r.initial_state;
          d["sigma"] = r.sigma;
          d["reference_filter"] = r.reference_filter;
          d["reference_smoother"] = r.reference_smoother;
          d["result"] = r.result;
          out.append(d);
        }
        return out;
      },
      py::arg("master_seed") = 0, py::arg("trials") = 500, py::arg("threads") = 0);

  m.def("matrix_to_pgm", &matrix_to_pgm, py::arg("matrix"));
  m.def("matrix_to_csv", &matrix_to_csv, py::arg("matrix"));
  m.def("parse_matrix_csv", [](const std::string& text) { return parse_matrix_csv(text); }, py::arg("text"));
}
