#include <cstdint>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tvcs/crowd.hpp"
#include "tvcs/experiments.hpp"
#include "tvcs/generators.hpp"
#include "tvcs/grn.hpp"
#include "tvcs/metrics.hpp"
#include "tvcs/projection.hpp"
#include "tvcs/regression.hpp"
#include "tvcs/serialization.hpp"
#include "tvcs/solvers.hpp"
#include "tvcs/unimodular.hpp"

namespace py = pybind11;
using namespace tvcs;

namespace {

py::array_t<std::uint8_t> to_array(const Support& s) { return py::array_t<std::uint8_t>(s.size(), s.data()); }

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

ProjectionConfig projection_config(std::size_t max_iterations, double binary_tolerance, double gap_tolerance,
                                   double perturbation_scale, std::uint64_t seed) {
  ProjectionConfig c;
  c.max_iterations = max_iterations;
  c.binary_tolerance = binary_tolerance;
  c.gap_tolerance = gap_tolerance;
  c.perturbation_scale = perturbation_scale;
  c.rng_seed = seed;
  c.validate();
  return c;
}

py::dict result_dict(const ProjectionResult& r) {
  py::dict d;
  d["support"] = to_array(r.support);
  d["projected"] = to_array(r.projected);
  d["iterations"] = r.iterations_used;
  d["gap"] = r.final_gap;
  d["contraction_ratio"] = r.contraction_ratio;
  d["max_fractionality"] = r.max_fractionality;
  d["perturbed"] = r.perturbed;
  return d;
}

py::dict trace_dict(const SolveTrace& t) {
  py::dict d;
  d["w"] = to_array(t.final_w);
  d["objective"] = t.objective;
  d["iterations"] = t.iterations;
  d["converged"] = t.converged;
  return d;
}

SolverConfig solver_config(const std::string& variant, double step_size, std::size_t iterations, double tolerance,
                           std::uint64_t seed) {
  SolverConfig c;
  c.variant = parse_solver_variant(variant);
  c.step_size = step_size;
  c.max_outer_iterations = iterations;
  c.stop_tolerance = tolerance;
  c.rng_seed = seed;
  c.projection.rng_seed = seed;
  c.validate();
  return c;
}

RegressionData regression_data(const Eigen::MatrixXd& features, const Eigen::VectorXd& responses,
                               std::size_t rows, std::size_t cols) {
  RegressionData d;
  d.rows = rows;
  d.cols = cols;
  d.features = features;
  d.responses = responses;
  return d;
}

CrowdModel crowd_model(const Eigen::MatrixXd& quality, std::vector<double> priors) {
  CrowdModel m;
  m.quality = quality;
  m.priors = priors.empty() ? std::vector<double>(static_cast<std::size_t>(quality.cols()), 0.5) : std::move(priors);
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Projection onto three-view cardinality structures and sparse solvers";
  m.attr("__version__") = TVCS_VERSION;

  py::register_exception<ProjectionError>(m, "ProjectionError", PyExc_RuntimeError);

  py::class_<Group>(m, "Group")
      .def(py::init<>())
      .def(py::init([](std::vector<std::size_t> indices, std::size_t budget) {
             return Group{std::move(indices), budget};
           }),
           py::arg("indices"), py::arg("budget"))
      .def_readwrite("indices", &Group::indices)
      .def_readwrite("budget", &Group::budget)
      .def("__repr__", [](const Group& g) {
        return "Group(" + std::to_string(g.indices.size()) + " indices, budget=" + std::to_string(g.budget) + ")";
      });

  py::class_<TvcsStructure>(m, "Structure")
      .def(py::init<>())
      .def(py::init([](std::size_t dimension, std::size_t overall, std::vector<Group> view1, std::vector<Group> view2) {
             return TvcsStructure{dimension, overall, std::move(view1), std::move(view2)};
           }),
           py::arg("dimension"), py::arg("overall"), py::arg("view1") = std::vector<Group>{},
           py::arg("view2") = std::vector<Group>{})
      .def_readwrite("dimension", &TvcsStructure::dimension)
      .def_readwrite("overall_budget", &TvcsStructure::overall_budget)
      .def_readwrite("view1", &TvcsStructure::view1)
      .def_readwrite("view2", &TvcsStructure::view2)
      .def("num_groups", &TvcsStructure::num_groups)
      .def("to_json", [](const TvcsStructure& s) { return structure_to_json(s); })
      .def_static("from_json", &structure_from_json, py::arg("text"));

  m.def("validate_structure", [](const TvcsStructure& s) { return validate_structure(s).violations; },
        py::arg("structure"), "List of violations; empty when the structure is valid.");
  m.def("matrix_view_structure",
        [](std::size_t rows, std::size_t cols, std::vector<std::size_t> row_budgets,
           std::vector<std::size_t> col_budgets, std::size_t overall) {
          return matrix_view_structure(rows, cols, row_budgets, col_budgets, overall);
        },
        py::arg("rows"), py::arg("cols"), py::arg("row_budgets"), py::arg("col_budgets"), py::arg("overall"));
  m.def("constraint_matrix",
        [](const TvcsStructure& s) {
          const auto system = build_constraint_system(s);
          const auto dense = system.dense();
          py::array_t<int> a({dense.size(), system.cols()});
          auto view = a.mutable_unchecked<2>();
          for (std::size_t r = 0; r < dense.size(); ++r) {
            for (std::size_t c = 0; c < system.cols(); ++c) view(r, c) = dense[r][c];
          }
          return py::make_tuple(a, to_array(system.bounds()));
        },
        py::arg("structure"), "Dense (A, s) with rows ordered overall, view1, view2.");
  m.def("check_totally_unimodular", &check_totally_unimodular, py::arg("matrix"), py::arg("size_cap"));

  m.def("project",
        [](const std::vector<double>& v, const TvcsStructure& s, std::size_t max_iterations, double binary_tolerance,
           double gap_tolerance, double perturbation_scale, std::uint64_t seed) {
          const auto cfg = projection_config(max_iterations, binary_tolerance, gap_tolerance, perturbation_scale, seed);
          ProjectionResult r;
          {
            py::gil_scoped_release release;
            r = project(v, s, cfg);
          }
          return result_dict(r);
        },
        py::arg("v"), py::arg("structure"), py::arg("max_iterations") = ProjectionConfig{}.max_iterations,
        py::arg("binary_tolerance") = 0.1, py::arg("gap_tolerance") = 1e-9, py::arg("perturbation_scale") = 1e-9,
        py::arg("seed") = 0);
  m.def("project_bruteforce",
        [](const std::vector<double>& v, const TvcsStructure& s) { return result_dict(project_bruteforce(v, s)); },
        py::arg("v"), py::arg("structure"));

  m.def("solve_least_squares",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t rows, std::size_t cols,
           const TvcsStructure& s, const std::string& variant, double step_size, std::size_t iterations,
           double tolerance, std::uint64_t seed) {
          auto data = regression_data(x, y, rows, cols);
          data.validate();
          const LeastSquaresObjective f(std::move(data));
          const double step = step_size > 0.0 ? step_size : f.default_step_size();
          py::gil_scoped_release release;
          return solve(f, s, solver_config(variant, step, iterations, tolerance, seed));
        },
        py::arg("features"), py::arg("responses"), py::arg("rows"), py::arg("cols"), py::arg("structure"),
        py::arg("variant") = "iht", py::arg("step_size") = 0.0, py::arg("iterations") = 500,
        py::arg("tolerance") = 1e-6, py::arg("seed") = 0);
  m.def("solve_squared_hinge",
        [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t rows, std::size_t cols,
           const TvcsStructure& s, const std::string& variant, double step_size, std::size_t iterations,
           double tolerance, std::uint64_t seed) {
          auto data = regression_data(x, y, rows, cols);
          data.validate(true);
          const SquaredHingeObjective f(std::move(data));
          const double step = step_size > 0.0 ? step_size : f.default_step_size();
          py::gil_scoped_release release;
          return solve(f, s, solver_config(variant, step, iterations, tolerance, seed));
        },
        py::arg("features"), py::arg("labels"), py::arg("rows"), py::arg("cols"), py::arg("structure"),
        py::arg("variant") = "iht", py::arg("step_size") = 0.0, py::arg("iterations") = 500,
        py::arg("tolerance") = 1e-6, py::arg("seed") = 0);
  m.def("solve_grn",
        [](const std::vector<Eigen::MatrixXd>& series, const TvcsStructure& s, const std::string& variant,
           double step_size, std::size_t iterations, double tolerance, std::uint64_t seed) {
          GrnData data;
          data.series = series;
          data.validate();
          const GrnObjective f(data);
          const double step = step_size > 0.0 ? step_size : f.default_step_size();
          py::gil_scoped_release release;
          return solve(f, s, solver_config(variant, step, iterations, tolerance, seed));
        },
        py::arg("series"), py::arg("structure"), py::arg("variant") = "iht", py::arg("step_size") = 0.0,
        py::arg("iterations") = 500, py::arg("tolerance") = 1e-6, py::arg("seed") = 0,
        "Each series entry is one genes x time trajectory.");
  m.def("solve_crowd",
        [](const Eigen::MatrixXd& quality, const TvcsStructure& s, std::vector<double> priors,
           const std::string& variant, double step_size, std::size_t iterations, std::size_t samples,
           double temperature, std::uint64_t seed) {
          auto model = crowd_model(quality, std::move(priors));
          const double step = step_size > 0.0 ? step_size : static_cast<double>(model.tasks());
          CrowdObjective::Options options;
          options.samples = samples;
          options.temperature = temperature;
          options.seed = seed;
          const CrowdObjective f(std::move(model), options);
          auto cfg = solver_config(variant, step, iterations, 0.0, seed);
          py::gil_scoped_release release;
          return solve(f, s, cfg);
        },
        py::arg("quality"), py::arg("structure"), py::arg("priors") = std::vector<double>{},
        py::arg("variant") = "stoiht", py::arg("step_size") = 0.0, py::arg("iterations") = 40,
        py::arg("samples") = 64, py::arg("temperature") = 1.0, py::arg("seed") = 0);

  py::class_<SolveTrace>(m, "SolveTrace")
      .def_property_readonly("w", [](const SolveTrace& t) { return to_array(t.final_w); })
      .def_readonly("objective", &SolveTrace::objective)
      .def_readonly("iterations", &SolveTrace::iterations)
      .def_readonly("converged", &SolveTrace::converged)
      .def("as_dict", &trace_dict);

  m.def("crowd_structure", &crowd_structure, py::arg("workers"), py::arg("tasks"), py::arg("per_worker"),
        py::arg("per_task"), py::arg("total"));
  m.def("grn_structure", &grn_structure, py::arg("genes"), py::arg("row_budget"), py::arg("col_budget"),
        py::arg("overall"));
  m.def("grn_matrix", [](std::size_t genes, const std::vector<double>& w) { return grn_matrix(genes, w); },
        py::arg("genes"), py::arg("w"));
  m.def("exact_expected_accuracy",
        [](const Eigen::MatrixXd& quality, std::vector<double> priors, const Support& assignment) {
          return exact_expected_accuracy(crowd_model(quality, std::move(priors)), assignment).mean;
        },
        py::arg("quality"), py::arg("priors"), py::arg("assignment"));
  m.def("bayesian_predict",
        [](const std::vector<double>& quality, const Support& assigned, const Support& labels, double prior) {
          return bayesian_predict(quality, assigned, labels, prior);
        },
        py::arg("quality"), py::arg("assigned"), py::arg("labels"), py::arg("prior"));

  m.def("metrics",
        [](const Support& predicted, const Support& truth) {
          const auto c = confusion(predicted, truth);
          const auto r = metrics_from_counts(c);
          py::dict d;
          d["tp"] = c.tp;
          d["fp"] = c.fp;
          d["tn"] = c.tn;
          d["fn"] = c.fn;
          d["sn"] = r.sn;
          d["sp"] = r.sp;
          d["acc"] = r.acc;
          d["f_measure"] = r.f_measure;
          d["mcc"] = r.mcc;
          return d;
        },
        py::arg("predicted"), py::arg("truth"));
  m.def("auc_score",
        [](const std::vector<double>& scores, const Support& truth) { return auc_score(scores, truth); },
        py::arg("scores"), py::arg("truth"));
  m.def("selection_recall",
        [](const std::vector<double>& w, const std::vector<double>& w_bar) { return selection_recall(w, w_bar); },
        py::arg("w"), py::arg("w_bar"));

  m.def("gen_random_structure",
        [](std::size_t side, std::uint64_t seed) {
          Rng rng(seed);
          return gen_random_structure(side, rng);
        },
        py::arg("side"), py::arg("seed") = 0);
  m.def("gen_true_model",
        [](const TvcsStructure& s, std::uint64_t seed) {
          Rng rng(seed);
          return to_array(gen_true_model(s, rng));
        },
        py::arg("structure"), py::arg("seed") = 0);
  m.def("gen_regression_data",
        [](const std::vector<double>& w_bar, std::size_t rows, std::size_t cols, std::size_t samples,
           double noise_sd, std::uint64_t seed) {
          Rng rng(seed);
          auto d = gen_regression_data(w_bar, rows, cols, samples, noise_sd, rng);
          return py::make_tuple(d.features, d.responses);
        },
        py::arg("w_bar"), py::arg("rows"), py::arg("cols"), py::arg("samples"), py::arg("noise_sd") = 0.01,
        py::arg("seed") = 0);
  m.def("gen_crowd_model",
        [](std::size_t workers, std::size_t tasks, std::uint64_t seed) {
          Rng rng(seed);
          return gen_crowd_model(workers, tasks, rng).quality;
        },
        py::arg("workers"), py::arg("tasks"), py::arg("seed") = 0);

  m.def("run_experiment",
        [](const std::string& kind, const std::string& config_json) {
          const auto k = parse_experiment_kind(kind);
          auto cfg = experiment_config_from_json(config_json.empty() ? "{}" : config_json, k);
          ExperimentResult r;
          {
            py::gil_scoped_release release;
            r = run_experiment(cfg);
          }
          py::dict d;
          d["trials_csv"] = trials_to_csv(r, cfg);
          d["aggregate_csv"] = aggregate_to_csv(r);
          d["seconds"] = r.seconds;
          d["config"] = experiment_config_to_json(cfg);
          return d;
        },
        py::arg("kind"), py::arg("config_json") = "{}",
        "Runs an experiment and returns its CSV tables and resolved config.");
}
