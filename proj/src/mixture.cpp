#include "treeglm/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "treeglm/common.hpp"
#include "treeglm/metrics.hpp"
#include "treeglm/rng.hpp"

namespace treeglm {

namespace {

constexpr int kStablePlateauEpochs = 5;
constexpr double kInitEps = 1e-9;

void check_mixture_inputs(std::span<const double> rates,
                          std::span<const double> prevalences) {
  if (rates.size() != prevalences.size() || rates.empty()) {
    throw std::domain_error("mixture: rates/prevalences size mismatch");
  }
  double total = 0.0;
  for (double f : prevalences) {
    if (!(f > 0.0)) throw std::domain_error("mixture: prevalences must be positive");
    total += f;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw std::domain_error("mixture: prevalences must sum to 1");
  }
  for (double r : rates) {
    if (!(r > 0.0)) throw std::domain_error("mixture: rates must be positive");
  }
}

/// Log-sum-exp of ln(f_s) + k*ln(lambda_s) - lambda_s over components.
double mixture_lse(double k, std::span<const double> rates,
                   std::span<const double> prevalences,
                   std::vector<double>* log_terms_out) {
  std::vector<double> terms(rates.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < rates.size(); ++s) {
    terms[s] = std::log(prevalences[s]) + k * std::log(rates[s]) - rates[s];
    peak = std::max(peak, terms[s]);
  }
  double total = 0.0;
  for (double t : terms) total += std::exp(t - peak);
  const double lse = peak + std::log(total);
  if (log_terms_out != nullptr) *log_terms_out = std::move(terms);
  return lse;
}

}  // namespace

double mixture_row_objective(double k, std::span<const double> rates,
                             std::span<const double> prevalences) {
  check_mixture_inputs(rates, prevalences);
  if (k < 0.0) throw std::domain_error("mixture_row_objective: k must be >= 0");
  return mixture_lse(k, rates, prevalences, nullptr) - std::lgamma(k + 1.0);
}

std::vector<double> mixture_responsibilities(double k, std::span<const double> rates,
                                             std::span<const double> prevalences) {
  check_mixture_inputs(rates, prevalences);
  std::vector<double> terms;
  const double lse = mixture_lse(k, rates, prevalences, &terms);
  std::vector<double> r(rates.size());
  for (std::size_t s = 0; s < rates.size(); ++s) r[s] = std::exp(terms[s] - lse);
  return r;
}

MixtureGradient mixture_gradient(double k, std::span<const double> rates,
                                 std::span<const double> prevalences,
                                 std::span<const double> x) {
  const auto resp = mixture_responsibilities(k, rates, prevalences);
  MixtureGradient g;
  g.d_intercept.resize(rates.size());
  g.d_coefficients.resize(rates.size());
  for (std::size_t s = 0; s < rates.size(); ++s) {
    const double scale = resp[s] * (k - rates[s]);
    g.d_intercept[s] = scale;
    g.d_coefficients[s].resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      g.d_coefficients[s][j] = scale * x[j];
    }
  }
  return g;
}

MixtureModel fit_mixture(const Dataset& ds, double f, const FitConfig& config) {
  ds.validate(true);
  if (!(f > 0.0 && f < 1.0)) {
    throw std::invalid_argument("fit_mixture: f must lie in (0, 1)");
  }
  if (!(config.learning_rate > 0.0) || config.max_epochs < 1 ||
      config.tolerance < 0.0 || config.init_scale < 0.0) {
    throw std::invalid_argument("fit_mixture: invalid fit config");
  }
  const std::size_t n = ds.n_rows;
  const std::size_t b = ds.n_cols;
  constexpr std::size_t kComponents = 2;

  double mean_y = 0.0;
  for (double y : ds.response) mean_y += y;
  mean_y /= static_cast<double>(n);

  MixtureModel model;
  model.prevalences = {f, 1.0 - f};
  model.submodels.resize(kComponents);
  Rng rng(config.seed);
  for (auto& sub : model.submodels) {
    sub.intercept = std::log(mean_y + kInitEps);
    sub.coefficients.resize(b);
    for (double& m : sub.coefficients) {
      m = (2.0 * rng.uniform() - 1.0) * config.init_scale;
    }
  }
  const double log_f[kComponents] = {std::log(f), std::log(1.0 - f)};

  std::vector<double> grad((b + 1) * kComponents, 0.0);
  long clamp_count = 0;
  double prev_obj = -std::numeric_limits<double>::infinity();
  int stable_epochs = 0;

  for (long epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = ds.row(i);
      const double k = ds.response[i];
      double lin[kComponents];
      double rate[kComponents];
      double term[kComponents];
      for (std::size_t s = 0; s < kComponents; ++s) {
        double v = model.submodels[s].intercept;
        const double* m = model.submodels[s].coefficients.data();
        for (std::size_t j = 0; j < b; ++j) v += m[j] * x[j];
        if (v > detail::kMaxExpArg || v < -detail::kMaxExpArg) {
          ++clamp_count;
          v = std::clamp(v, -detail::kMaxExpArg, detail::kMaxExpArg);
        }
        lin[s] = v;
        rate[s] = std::exp(v);
        term[s] = log_f[s] + k * lin[s] - rate[s];
      }
      const double peak = std::max(term[0], term[1]);
      const double lse =
          peak + std::log(std::exp(term[0] - peak) + std::exp(term[1] - peak));
      obj += lse;
      for (std::size_t s = 0; s < kComponents; ++s) {
        const double scale = std::exp(term[s] - lse) * (k - rate[s]);
        double* g = grad.data() + s * (b + 1);
        g[0] += scale;
        for (std::size_t j = 0; j < b; ++j) g[j + 1] += scale * x[j];
      }
    }
    obj /= static_cast<double>(n);
    if (!std::isfinite(obj)) {
      throw TrainingError("fit_mixture: objective diverged at epoch " +
                          std::to_string(epoch));
    }

    const double rel = std::fabs(obj - prev_obj) /
                       std::max(std::fabs(prev_obj), 1e-300);
    stable_epochs = (epoch > 0 && rel < config.tolerance) ? stable_epochs + 1 : 0;
    if (stable_epochs >= kStablePlateauEpochs) break;
    prev_obj = obj;

    const double step = config.learning_rate / static_cast<double>(n);
    for (std::size_t s = 0; s < kComponents; ++s) {
      const double* g = grad.data() + s * (b + 1);
      auto& sub = model.submodels[s];
      sub.intercept += step * g[0];
      for (std::size_t j = 0; j < b; ++j) sub.coefficients[j] += step * g[j + 1];
    }
  }

  if (clamp_count > 0) {
    std::cerr << "fit_mixture: clamped " << clamp_count
              << " linear-predictor evaluations to +/-" << detail::kMaxExpArg
              << "\n";
  }
  return model;
}

double mixture_mean(const MixtureModel& model, std::span<const double> x) {
  if (model.submodels.size() != model.prevalences.size() || model.submodels.empty()) {
    throw std::invalid_argument("mixture_mean: malformed model");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < model.submodels.size(); ++s) {
    total += model.prevalences[s] * log_link_predict(model.submodels[s], x);
  }
  return total;
}

std::vector<double> mixture_predict(const Dataset& ds, const MixtureModel& model) {
  std::vector<double> out(ds.n_rows);
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    out[i] = mixture_mean(model, ds.row(i));
  }
  return out;
}

double mixture_mean_objective(const Dataset& ds, const MixtureModel& model) {
  double total = 0.0;
  std::vector<double> rates(model.submodels.size());
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    const auto x = ds.row(i);
    for (std::size_t s = 0; s < model.submodels.size(); ++s) {
      rates[s] = log_link_predict(model.submodels[s], x);
    }
    total += mixture_row_objective(ds.response[i], rates, model.prevalences);
  }
  return total / static_cast<double>(ds.n_rows);
}

std::vector<FSweepCell> sweep_f(const Dataset& ds, std::span<const double> f_grid,
                                const FitConfig& config) {
  if (f_grid.empty()) throw std::invalid_argument("sweep_f: empty grid");
  std::vector<double> grid(f_grid.begin(), f_grid.end());
  std::sort(grid.begin(), grid.end());

  std::vector<FSweepCell> cells;
  cells.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    FSweepCell cell;
    cell.f = grid[i];
    FitConfig cell_config = config;
    cell_config.seed = config.seed + i;  // fresh symmetry-broken init per cell
    try {
      cell.model = fit_mixture(ds, grid[i], cell_config);
      const auto preds = mixture_predict(ds, cell.model);
      cell.mae = mae(preds, ds.response);
      cell.rmse = rmse(preds, ds.response);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

void write_mixture_csv(const MixtureModel& model, std::ostream& out) {
  if (model.submodels.empty()) throw std::invalid_argument("mixture csv: empty model");
  const std::size_t b = model.submodels.front().coefficients.size();
  out << "f,c";
  for (std::size_t j = 0; j < b; ++j) out << ",m" << (j + 1);
  out << '\n';
  for (std::size_t s = 0; s < model.submodels.size(); ++s) {
    out << format_double(model.prevalences[s]) << ','
        << format_double(model.submodels[s].intercept);
    for (double m : model.submodels[s].coefficients) out << ',' << format_double(m);
    out << '\n';
  }
}

MixtureModel read_mixture_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("mixture csv: empty");
  MixtureModel model;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    SubmodelParams params;
    int column = 0;
    while (std::getline(row, cell, ',')) {
      const double v = std::stod(cell);
      if (column == 0) {
        model.prevalences.push_back(v);
      } else if (column == 1) {
        params.intercept = v;
      } else {
        params.coefficients.push_back(v);
      }
      ++column;
    }
    model.submodels.push_back(std::move(params));
  }
  if (model.submodels.empty()) throw std::invalid_argument("mixture csv: no rows");
  return model;
}

}  // namespace treeglm
