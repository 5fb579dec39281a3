#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "treeglm/bounds.hpp"
#include "treeglm/experiment.hpp"
#include "treeglm/metrics.hpp"
#include "treeglm/mixture.hpp"
#include "treeglm/multiresp.hpp"

namespace py = pybind11;
using namespace treeglm;

namespace {

Dataset dataset_from_arrays(const py::array_t<double, py::array::c_style |
                                                          py::array::forcecast>& x,
                            const py::array_t<double, py::array::c_style |
                                                          py::array::forcecast>& y) {
  if (x.ndim() != 2) throw std::invalid_argument("features must be a 2-d array");
  if (y.ndim() != 1) throw std::invalid_argument("response must be a 1-d array");
  if (x.shape(0) != y.shape(0)) {
    throw std::invalid_argument("features and response row counts differ");
  }
  Dataset ds;
  ds.n_rows = static_cast<std::size_t>(x.shape(0));
  ds.n_cols = static_cast<std::size_t>(x.shape(1));
  ds.features.assign(x.data(), x.data() + ds.n_rows * ds.n_cols);
  ds.response.assign(y.data(), y.data() + ds.n_rows);
  for (std::size_t j = 0; j < ds.n_cols; ++j) {
    ds.feature_names.push_back("x" + std::to_string(j + 1));
  }
  return ds;
}

Dataset features_only(const py::array_t<double, py::array::c_style |
                                                    py::array::forcecast>& x) {
  py::array_t<double> zeros(x.shape(0));
  std::fill(zeros.mutable_data(), zeros.mutable_data() + x.shape(0), 0.0);
  return dataset_from_arrays(x, zeros);
}

py::array_t<double> to_array(const std::vector<double>& values) {
  py::array_t<double> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

FitConfig fit_config(double learning_rate, long max_epochs, double tolerance,
                     double init_scale, std::uint64_t seed) {
  FitConfig config;
  config.learning_rate = learning_rate;
  config.max_epochs = max_epochs;
  config.tolerance = tolerance;
  config.init_scale = init_scale;
  config.seed = seed;
  return config;
}

using CArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Poisson GLM variants, a from-scratch GBM, and the synthetic "
            "scenario generators behind them";

  py::class_<SubmodelParams>(m, "SubmodelParams")
      .def_readonly("intercept", &SubmodelParams::intercept)
      .def_property_readonly(
          "coefficients",
          [](const SubmodelParams& p) { return to_array(p.coefficients); })
      .def("predict",
           [](const SubmodelParams& p, const CArray& x) {
             return to_array(glm_predict(features_only(x), p));
           },
           py::arg("features"));

  py::class_<MultirespModel>(m, "MultirespModel")
      .def_property_readonly(
          "submodels", [](const MultirespModel& m_) { return m_.submodels; })
      .def("predict",
           [](const MultirespModel& model, const CArray& x) {
             return to_array(multiresp_predict(features_only(x), model));
           },
           py::arg("features"));

  py::class_<MixtureModel>(m, "MixtureModel")
      .def_property_readonly(
          "submodels", [](const MixtureModel& m_) { return m_.submodels; })
      .def_property_readonly(
          "prevalences", [](const MixtureModel& m_) { return to_array(m_.prevalences); })
      .def("predict",
           [](const MixtureModel& model, const CArray& x) {
             return to_array(mixture_predict(features_only(x), model));
           },
           py::arg("features"));

  py::class_<GbmModel>(m, "GbmModel")
      .def_readonly("base_score", &GbmModel::base_score)
      .def_readonly("learning_rate", &GbmModel::learning_rate)
      .def_property_readonly(
          "n_trees", [](const GbmModel& m_) { return m_.trees.size(); })
      .def_property_readonly("max_depth", &GbmModel::max_tree_depth)
      .def("predict",
           [](const GbmModel& model, const CArray& x) {
             return to_array(gbm_predict(features_only(x), model));
           },
           py::arg("features"))
      .def("dump", [](const GbmModel& model) {
        std::ostringstream out;
        write_gbm_dump(model, out);
        return out.str();
      });

  m.def("load_gbm", [](const std::string& text) {
    std::istringstream in(text);
    return read_gbm_dump(in);
  });

  m.def(
      "generate",
      [](const std::string& scenario, std::size_t n, std::uint64_t seed,
         const std::map<std::string, double>& overrides) {
        ScenarioSpec spec;
        spec.scenario = scenario_from_name(scenario);
        spec.n = n;
        spec.seed = seed;
        spec.overrides = overrides;
        const Dataset ds = generate(spec);
        py::array_t<double> features(std::vector<py::ssize_t>{
            static_cast<py::ssize_t>(ds.n_rows), static_cast<py::ssize_t>(ds.n_cols)});
        std::copy(ds.features.begin(), ds.features.end(), features.mutable_data());
        py::dict out;
        out["features"] = features;
        out["response"] = to_array(ds.response);
        out["feature_names"] = ds.feature_names;
        out["info"] = ds.info;
        out["latent_class"] = ds.latent_class;
        return out;
      },
      py::arg("scenario"), py::arg("n"), py::arg("seed") = 0,
      py::arg("overrides") = std::map<std::string, double>{});

  m.def(
      "fit_glm",
      [](const CArray& x, const CArray& y, double learning_rate, long max_epochs,
         double tolerance, double init_scale, std::uint64_t seed) {
        return fit_glm(dataset_from_arrays(x, y),
                       fit_config(learning_rate, max_epochs, tolerance,
                                  init_scale, seed));
      },
      py::arg("features"), py::arg("response"), py::arg("learning_rate") = 0.05,
      py::arg("max_epochs") = 20000, py::arg("tolerance") = 1e-10,
      py::arg("init_scale") = 0.1, py::arg("seed") = 0);

  m.def(
      "fit_multiresp",
      [](const CArray& x, const CArray& y, int submodels, double learning_rate,
         long max_epochs, double tolerance, double init_scale,
         std::uint64_t seed) {
        return fit_multiresp(dataset_from_arrays(x, y), submodels,
                             fit_config(learning_rate, max_epochs, tolerance,
                                        init_scale, seed));
      },
      py::arg("features"), py::arg("response"), py::arg("submodels"),
      py::arg("learning_rate") = 0.05, py::arg("max_epochs") = 20000,
      py::arg("tolerance") = 1e-10, py::arg("init_scale") = 0.1,
      py::arg("seed") = 0);

  m.def(
      "fit_mixture",
      [](const CArray& x, const CArray& y, double f, double learning_rate,
         long max_epochs, double tolerance, double init_scale,
         std::uint64_t seed) {
        return fit_mixture(dataset_from_arrays(x, y), f,
                           fit_config(learning_rate, max_epochs, tolerance,
                                      init_scale, seed));
      },
      py::arg("features"), py::arg("response"), py::arg("f"),
      py::arg("learning_rate") = 0.05, py::arg("max_epochs") = 20000,
      py::arg("tolerance") = 1e-10, py::arg("init_scale") = 0.1,
      py::arg("seed") = 0);

  m.def(
      "fit_gbm",
      [](const CArray& x, const CArray& y, const std::string& objective,
         int max_depth, int n_trees, double learning_rate, int min_child_samples) {
        GbmConfig config;
        config.max_depth = max_depth;
        config.n_trees = n_trees;
        config.learning_rate = learning_rate;
        config.objective = objective_from_name(objective);
        config.min_child_samples = min_child_samples;
        return fit_gbm(dataset_from_arrays(x, y), config);
      },
      py::arg("features"), py::arg("response"),
      py::arg("objective") = "squared_error_identity", py::arg("max_depth") = 3,
      py::arg("n_trees") = 100, py::arg("learning_rate") = 0.1,
      py::arg("min_child_samples") = 1);

  m.def(
      "expand_interactions",
      [](const CArray& x, int order) {
        Dataset ds = features_only(x);
        const auto design = make_interaction_design(ds.n_cols, order);
        const auto values = expand_interactions(ds, order);
        py::array_t<double> out(std::vector<py::ssize_t>{
            static_cast<py::ssize_t>(ds.n_rows),
            static_cast<py::ssize_t>(design.n_columns())});
        std::copy(values.begin(), values.end(), out.mutable_data());
        return out;
      },
      py::arg("features"), py::arg("order"));

  m.def(
      "fit_interaction_glm",
      [](const CArray& x, const CArray& y, int order, const std::string& family) {
        const Dataset ds = dataset_from_arrays(x, y);
        const auto model = fit_interaction_glm(ds, order, family_from_name(family));
        py::dict out;
        out["coefficients"] = to_array(model.coefficients);
        std::vector<std::string> labels;
        for (std::size_t c = 0; c < model.design.n_columns(); ++c) {
          labels.push_back(model.design.column_label(c));
        }
        out["labels"] = labels;
        out["predictions"] = to_array(interaction_predict(ds, model));
        return out;
      },
      py::arg("features"), py::arg("response"), py::arg("order"),
      py::arg("family") = "poisson_log");

  m.def("hypercube_equivalence_check",
        [](int order, const std::string& family) {
          return hypercube_equivalence_check(order, family_from_name(family));
        },
        py::arg("order"), py::arg("family"));

  m.def("mae",
        [](const CArray& predictions, const CArray& actuals) {
          return mae(std::span<const double>(predictions.data(), predictions.size()),
                     std::span<const double>(actuals.data(), actuals.size()));
        },
        py::arg("predictions"), py::arg("actuals"));
  m.def("rmse",
        [](const CArray& predictions, const CArray& actuals) {
          return rmse(std::span<const double>(predictions.data(), predictions.size()),
                      std::span<const double>(actuals.data(), actuals.size()));
        },
        py::arg("predictions"), py::arg("actuals"));

  m.def("k_values_multiresp", &k_values_multiresp, py::arg("submodels"),
        py::arg("n_features"));
  m.def("k_values_mixture", &k_values_mixture, py::arg("submodels"),
        py::arg("n_features"));
  m.def("max_useful_submodels_multiresp", &max_useful_submodels_multiresp,
        py::arg("n_features"));
  m.def("max_useful_submodels_mixture", &max_useful_submodels_mixture,
        py::arg("n_features"));

  m.def(
      "run_experiment",
      [](const std::string& config_text, const std::string& format) {
        std::istringstream in(config_text);
        const auto config = read_experiment_config(in);
        const auto report = run_experiment(config);
        return render_report(report, format == "csv" ? ReportFormat::csv
                                                     : ReportFormat::markdown);
      },
      py::arg("config_text"), py::arg("format") = "markdown");
}
