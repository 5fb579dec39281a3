#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "treeglm/glm.hpp"

namespace treeglm {

/// Mixture of log-linked Poisson GLMs with fixed prevalences. Prevalences
/// are strictly positive and sum to one; they are hyperparameters, never
/// updated by the fit.
struct MixtureModel {
  std::vector<SubmodelParams> submodels;
  std::vector<double> prevalences;

  std::size_t n_features() const {
    return submodels.empty() ? 0 : submodels.front().coefficients.size();
  }
};

/// ln( sum_s f_s * lambda_s^k * exp(-lambda_s) ) - ln(k!), evaluated as a
/// log-sum-exp so large counts cannot overflow.
double mixture_row_objective(double k, std::span<const double> rates,
                             std::span<const double> prevalences);

/// Posterior responsibilities r_s = f_s p_s / sum_t f_t p_t, via log-sum-exp.
std::vector<double> mixture_responsibilities(double k, std::span<const double> rates,
                                             std::span<const double> prevalences);

struct MixtureGradient {
  std::vector<double> d_intercept;
  std::vector<std::vector<double>> d_coefficients;
};

/// d/dc_s = r_s * (k - lambda_s), d/dm_{n,s} = x_n * r_s * (k - lambda_s).
MixtureGradient mixture_gradient(double k, std::span<const double> rates,
                                 std::span<const double> prevalences,
                                 std::span<const double> x);

/// Two-component fit with prevalences (f, 1-f) held fixed. Intercepts start
/// at ln(mean + eps); coefficients at seeded uniform draws. Deterministic
/// given (dataset, f, config).
MixtureModel fit_mixture(const Dataset& ds, double f, const FitConfig& config = {});

/// Point prediction used for scoring: the mixture mean sum_s f_s lambda_s.
double mixture_mean(const MixtureModel& model, std::span<const double> x);
std::vector<double> mixture_predict(const Dataset& ds, const MixtureModel& model);

double mixture_mean_objective(const Dataset& ds, const MixtureModel& model);

struct FSweepCell {
  double f = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  MixtureModel model;
  std::string error;  // non-empty when the fit failed; sweep continues
};

/// One fit per grid value with a fresh symmetry-broken init (seed + cell
/// index); in-sample MAE/RMSE of the mixture mean, rows sorted by f.
std::vector<FSweepCell> sweep_f(const Dataset& ds, std::span<const double> f_grid,
                                const FitConfig& config = {});

void write_mixture_csv(const MixtureModel& model, std::ostream& out);
MixtureModel read_mixture_csv(std::istream& in);

}  // namespace treeglm
