#include "treeglm/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "treeglm/common.hpp"
#include "treeglm/rng.hpp"

namespace treeglm {

double log_link_predict(const SubmodelParams& params, std::span<const double> x) {
  if (x.size() != params.coefficients.size()) {
    throw std::invalid_argument("log_link_predict: feature dimension mismatch");
  }
  double lin = params.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) lin += params.coefficients[j] * x[j];
  return std::exp(lin);
}

double poisson_row_objective(double k, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::domain_error("poisson_row_objective: lambda must be positive");
  }
  if (k < 0.0) throw std::domain_error("poisson_row_objective: k must be >= 0");
  return k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
}

PoissonGradient poisson_gradient(double k, double lambda, std::span<const double> x) {
  if (!(lambda > 0.0)) {
    throw std::domain_error("poisson_gradient: lambda must be positive");
  }
  PoissonGradient g;
  g.d_intercept = k - lambda;
  g.d_coefficients.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    g.d_coefficients[j] = (k - lambda) * x[j];
  }
  return g;
}

namespace detail {

double clamped_rate(const SubmodelParams& params, std::span<const double> x,
                    long* clamp_count) {
  double lin = params.intercept;
  const double* m = params.coefficients.data();
  for (std::size_t j = 0; j < x.size(); ++j) lin += m[j] * x[j];
  if (lin > kMaxExpArg || lin < -kMaxExpArg) {
    if (clamp_count != nullptr) ++*clamp_count;
    lin = std::clamp(lin, -kMaxExpArg, kMaxExpArg);
  }
  return std::exp(lin);
}

}  // namespace detail

namespace {

void check_fit_config(const FitConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("fit config: learning_rate must be positive");
  }
  if (config.max_epochs < 1) {
    throw std::invalid_argument("fit config: max_epochs must be positive");
  }
  if (config.tolerance < 0.0 || config.init_scale < 0.0) {
    throw std::invalid_argument("fit config: tolerance and init_scale must be >= 0");
  }
}

constexpr int kStablePlateauEpochs = 5;
constexpr double kInitEps = 1e-9;

}  // namespace

SubmodelParams fit_glm(const Dataset& ds, const FitConfig& config) {
  ds.validate(true);
  check_fit_config(config);
  const std::size_t n = ds.n_rows;
  const std::size_t b = ds.n_cols;

  double mean_y = 0.0;
  for (double y : ds.response) mean_y += y;
  mean_y /= static_cast<double>(n);

  SubmodelParams params;
  params.intercept = std::log(mean_y + kInitEps);
  params.coefficients.assign(b, 0.0);

  std::vector<double> grad(b + 1, 0.0);  // [intercept, m_1..m_B]
  double prev_obj = -std::numeric_limits<double>::infinity();
  int stable_epochs = 0;

  for (long epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = ds.row(i);
      const double k = ds.response[i];
      double lin = params.intercept;
      for (std::size_t j = 0; j < b; ++j) lin += params.coefficients[j] * x[j];
      const double lambda = std::exp(lin);
      obj += k * lin - lambda;
      const double r = k - lambda;
      grad[0] += r;
      for (std::size_t j = 0; j < b; ++j) grad[j + 1] += r * x[j];
    }
    obj /= static_cast<double>(n);
    if (!std::isfinite(obj)) {
      throw TrainingError("fit_glm: objective diverged at epoch " +
                          std::to_string(epoch));
    }

    const double rel = std::fabs(obj - prev_obj) /
                       std::max(std::fabs(prev_obj), 1e-300);
    stable_epochs = (epoch > 0 && rel < config.tolerance) ? stable_epochs + 1 : 0;
    if (stable_epochs >= kStablePlateauEpochs) break;
    prev_obj = obj;

    const double step = config.learning_rate / static_cast<double>(n);
    params.intercept += step * grad[0];
    for (std::size_t j = 0; j < b; ++j) params.coefficients[j] += step * grad[j + 1];
  }
  return params;
}

std::vector<double> glm_predict(const Dataset& ds, const SubmodelParams& params) {
  std::vector<double> out(ds.n_rows);
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    out[i] = log_link_predict(params, ds.row(i));
  }
  return out;
}

double glm_mean_objective(const Dataset& ds, const SubmodelParams& params) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    total += poisson_row_objective(ds.response[i], log_link_predict(params, ds.row(i)));
  }
  return total / static_cast<double>(ds.n_rows);
}

void write_submodel_csv(const std::vector<SubmodelParams>& submodels,
                        std::ostream& out) {
  if (submodels.empty()) throw std::invalid_argument("no submodels to write");
  const std::size_t b = submodels.front().coefficients.size();
  out << 'c';
  for (std::size_t j = 0; j < b; ++j) out << ",m" << (j + 1);
  out << '\n';
  for (const auto& sub : submodels) {
    out << format_double(sub.intercept);
    for (double m : sub.coefficients) out << ',' << format_double(m);
    out << '\n';
  }
}

std::vector<SubmodelParams> read_submodel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("submodel csv: empty");
  std::vector<SubmodelParams> submodels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    SubmodelParams params;
    bool first = true;
    while (std::getline(row, cell, ',')) {
      const double v = std::stod(cell);
      if (first) {
        params.intercept = v;
        first = false;
      } else {
        params.coefficients.push_back(v);
      }
    }
    submodels.push_back(std::move(params));
  }
  return submodels;
}

}  // namespace treeglm
