#include "treeglm/multiresp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "treeglm/common.hpp"
#include "treeglm/rng.hpp"

namespace treeglm {

namespace {
constexpr int kStablePlateauEpochs = 5;
constexpr double kInitEps = 1e-9;
}  // namespace

double multiresp_predict(const MultirespModel& model, std::span<const double> x) {
  if (model.submodels.empty()) {
    throw std::invalid_argument("multiresp_predict: model has no submodels");
  }
  std::vector<double> rates;
  rates.reserve(model.submodels.size());
  for (const auto& sub : model.submodels) {
    rates.push_back(log_link_predict(sub, x));
  }
  // Ascending-order summation makes the total independent of submodel order.
  std::sort(rates.begin(), rates.end());
  double total = 0.0;
  for (double r : rates) total += r;
  return total;
}

MultirespGradient multiresp_gradient(double k, std::span<const double> rates,
                                     double lambda, std::span<const double> x) {
  if (!(lambda > 0.0)) {
    throw std::domain_error("multiresp_gradient: total rate must be positive");
  }
  MultirespGradient g;
  const double w = (k - lambda) / lambda;
  g.d_intercept.resize(rates.size());
  g.d_coefficients.resize(rates.size());
  for (std::size_t s = 0; s < rates.size(); ++s) {
    const double scale = w * rates[s];
    g.d_intercept[s] = scale;
    g.d_coefficients[s].resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      g.d_coefficients[s][j] = scale * x[j];
    }
  }
  return g;
}

MultirespModel fit_multiresp(const Dataset& ds, int submodel_count,
                             const FitConfig& config) {
  ds.validate(true);
  if (submodel_count < 1) {
    throw std::invalid_argument("fit_multiresp: S must be >= 1");
  }
  if (!(config.learning_rate > 0.0) || config.max_epochs < 1 ||
      config.tolerance < 0.0 || config.init_scale < 0.0) {
    throw std::invalid_argument("fit_multiresp: invalid fit config");
  }
  const std::size_t n = ds.n_rows;
  const std::size_t b = ds.n_cols;
  const std::size_t s_count = static_cast<std::size_t>(submodel_count);

  double mean_y = 0.0;
  for (double y : ds.response) mean_y += y;
  mean_y /= static_cast<double>(n);

  MultirespModel model;
  model.submodels.resize(s_count);
  Rng rng(config.seed);
  for (auto& sub : model.submodels) {
    sub.intercept = std::log(mean_y / static_cast<double>(s_count) + kInitEps);
    sub.coefficients.resize(b);
    for (double& m : sub.coefficients) {
      m = (2.0 * rng.uniform() - 1.0) * config.init_scale;
    }
  }

  std::vector<double> grad((b + 1) * s_count, 0.0);
  std::vector<double> rates(s_count);
  long clamp_count = 0;
  double prev_obj = -std::numeric_limits<double>::infinity();
  int stable_epochs = 0;

  for (long epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = ds.row(i);
      const double k = ds.response[i];
      double lambda = 0.0;
      for (std::size_t s = 0; s < s_count; ++s) {
        rates[s] = detail::clamped_rate(model.submodels[s], x, &clamp_count);
        lambda += rates[s];
      }
      obj += k * std::log(lambda) - lambda;
      const double w = (k - lambda) / lambda;
      for (std::size_t s = 0; s < s_count; ++s) {
        const double scale = w * rates[s];
        double* g = grad.data() + s * (b + 1);
        g[0] += scale;
        for (std::size_t j = 0; j < b; ++j) g[j + 1] += scale * x[j];
      }
    }
    obj /= static_cast<double>(n);
    if (!std::isfinite(obj)) {
      throw TrainingError("fit_multiresp: objective diverged at epoch " +
                          std::to_string(epoch));
    }

    const double rel = std::fabs(obj - prev_obj) /
                       std::max(std::fabs(prev_obj), 1e-300);
    stable_epochs = (epoch > 0 && rel < config.tolerance) ? stable_epochs + 1 : 0;
    if (stable_epochs >= kStablePlateauEpochs) break;
    prev_obj = obj;

    const double step = config.learning_rate / static_cast<double>(n);
    for (std::size_t s = 0; s < s_count; ++s) {
      const double* g = grad.data() + s * (b + 1);
      auto& sub = model.submodels[s];
      sub.intercept += step * g[0];
      for (std::size_t j = 0; j < b; ++j) sub.coefficients[j] += step * g[j + 1];
    }
  }

  if (clamp_count > 0) {
    std::cerr << "fit_multiresp: clamped " << clamp_count
              << " linear-predictor evaluations to +/-" << detail::kMaxExpArg
              << "\n";
  }
  return model;
}

std::vector<double> multiresp_predict(const Dataset& ds, const MultirespModel& model) {
  std::vector<double> out(ds.n_rows);
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    out[i] = multiresp_predict(model, ds.row(i));
  }
  return out;
}

double multiresp_mean_objective(const Dataset& ds, const MultirespModel& model) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    total += poisson_row_objective(ds.response[i],
                                   multiresp_predict(model, ds.row(i)));
  }
  return total / static_cast<double>(ds.n_rows);
}

void write_multiresp_csv(const MultirespModel& model, std::ostream& out) {
  write_submodel_csv(model.submodels, out);
}

MultirespModel read_multiresp_csv(std::istream& in) {
  MultirespModel model;
  model.submodels = read_submodel_csv(in);
  if (model.submodels.empty()) {
    throw std::invalid_argument("multiresp csv: no submodels");
  }
  return model;
}

}  // namespace treeglm
