#include "treeglm/interaction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "treeglm/common.hpp"
#include "treeglm/gbm.hpp"

namespace treeglm {

std::string family_name(Family family) {
  return family == Family::gaussian_identity ? "gaussian_identity" : "poisson_log";
}

Family family_from_name(const std::string& name) {
  if (name == "gaussian_identity" || name == "gaussian") {
    return Family::gaussian_identity;
  }
  if (name == "poisson_log" || name == "poisson") return Family::poisson_log;
  throw std::invalid_argument("unknown family: " + name);
}

std::string InteractionDesign::column_label(std::size_t col) const {
  const auto& subset = columns.at(col);
  if (subset.empty()) return "1";
  std::string label;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i > 0) label += '*';
    label += 'x' + std::to_string(subset[i] + 1);
  }
  return label;
}

InteractionDesign make_interaction_design(std::size_t n_base_features, int order) {
  if (n_base_features < 1) {
    throw std::invalid_argument("interaction design: B must be >= 1");
  }
  if (order < 1 || static_cast<std::size_t>(order) > n_base_features) {
    throw std::invalid_argument("interaction design: need 1 <= d <= B");
  }
  InteractionDesign design;
  design.n_base_features = n_base_features;
  design.order = order;
  design.columns.push_back({});  // intercept
  // Size-major, lexicographic within each size.
  for (int size = 1; size <= order; ++size) {
    std::vector<int> subset(size);
    for (int i = 0; i < size; ++i) subset[i] = i;
    while (true) {
      design.columns.push_back(subset);
      int pos = size - 1;
      while (pos >= 0 &&
             subset[pos] == static_cast<int>(n_base_features) - size + pos) {
        --pos;
      }
      if (pos < 0) break;
      ++subset[pos];
      for (int i = pos + 1; i < size; ++i) subset[i] = subset[i - 1] + 1;
    }
  }
  return design;
}

namespace {

Eigen::MatrixXd design_matrix(const Dataset& ds, const InteractionDesign& design) {
  Eigen::MatrixXd x(ds.n_rows, design.n_columns());
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    for (std::size_t c = 0; c < design.n_columns(); ++c) {
      double v = 1.0;
      for (int j : design.columns[c]) v *= ds.x(i, j);
      x(i, c) = v;
    }
  }
  return x;
}

constexpr double kLinClamp = 30.0;
constexpr double kInitEps = 1e-9;

}  // namespace

std::vector<double> expand_interactions(const Dataset& ds, int order) {
  const auto design = make_interaction_design(ds.n_cols, order);
  const Eigen::MatrixXd x = design_matrix(ds, design);
  std::vector<double> out(x.rows() * x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) out[i * x.cols() + c] = x(i, c);
  }
  return out;
}

InteractionGlm fit_interaction_glm(const Dataset& ds, int order, Family family,
                                   const IrlsConfig& config) {
  ds.validate(family == Family::poisson_log);
  InteractionGlm model;
  model.design = make_interaction_design(ds.n_cols, order);
  model.family = family;

  const Eigen::MatrixXd x = design_matrix(ds, model.design);
  Eigen::Map<const Eigen::VectorXd> y(ds.response.data(), ds.n_rows);
  const Eigen::Index p = x.cols();

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;

  if (family == Family::gaussian_identity) {
    cod.compute(x);
    model.rank_deficient = cod.rank() < p;
    const Eigen::VectorXd beta = cod.solve(y);
    model.coefficients.assign(beta.data(), beta.data() + p);
    return model;
  }

  // Poisson log link: IRLS on the working response, minimum-norm step when
  // the weighted design is rank deficient.
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  beta(0) = std::log(y.mean() + kInitEps);
  double prev_dev = -std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    Eigen::VectorXd eta = (x * beta).cwiseMax(-kLinClamp).cwiseMin(kLinClamp);
    Eigen::VectorXd mu = eta.array().exp();
    const double dev = (y.array() * eta.array() - mu.array()).mean();
    if (!std::isfinite(dev)) {
      throw TrainingError("fit_interaction_glm: deviance became non-finite");
    }
    if (iter > 0 && std::fabs(dev - prev_dev) <=
                        config.tolerance * std::max(1.0, std::fabs(prev_dev))) {
      converged = true;
      break;
    }
    prev_dev = dev;

    const Eigen::VectorXd w = mu.array().sqrt();
    const Eigen::VectorXd z = eta.array() + (y - mu).array() / mu.array();
    cod.compute(w.asDiagonal() * x);
    model.rank_deficient = model.rank_deficient || cod.rank() < p;
    beta = cod.solve((w.array() * z.array()).matrix());
  }

  if (!converged) {
    // Gradient-ascent fallback from the last IRLS iterate.
    const double n = static_cast<double>(ds.n_rows);
    for (long epoch = 0; epoch < config.fallback_epochs; ++epoch) {
      Eigen::VectorXd eta = (x * beta).cwiseMax(-kLinClamp).cwiseMin(kLinClamp);
      Eigen::VectorXd mu = eta.array().exp();
      beta += (config.fallback_learning_rate / n) * (x.transpose() * (y - mu));
      if (!beta.allFinite()) {
        throw TrainingError(
            "fit_interaction_glm: gradient fallback diverged at epoch " +
            std::to_string(epoch));
      }
    }
  }

  model.coefficients.assign(beta.data(), beta.data() + p);
  return model;
}

std::vector<double> interaction_predict(const Dataset& ds, const InteractionGlm& model) {
  if (ds.n_cols != model.design.n_base_features) {
    throw std::invalid_argument("interaction_predict: feature dimension mismatch");
  }
  const Eigen::MatrixXd x = design_matrix(ds, model.design);
  Eigen::Map<const Eigen::VectorXd> beta(model.coefficients.data(),
                                         model.coefficients.size());
  Eigen::VectorXd eta = x * beta;
  std::vector<double> out(ds.n_rows);
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    out[i] = model.family == Family::poisson_log ? std::exp(eta(i)) : eta(i);
  }
  return out;
}

namespace {

/// 2^4 grid, one row per cell, lexicographic with x1 most significant.
Dataset prime_hypercube() {
  constexpr double primes[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                                 23, 29, 31, 37, 41, 43, 47, 53};
  Dataset ds;
  ds.n_rows = 16;
  ds.n_cols = 4;
  for (int cell = 0; cell < 16; ++cell) {
    for (int j = 0; j < 4; ++j) {
      ds.features.push_back((cell >> (3 - j)) & 1 ? 1.0 : 0.0);
    }
    ds.response.push_back(primes[cell]);
  }
  for (int j = 0; j < 4; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
  return ds;
}

}  // namespace

double hypercube_equivalence_check(int order, Family family) {
  if (order < 1 || order > 4) {
    throw std::invalid_argument("hypercube_equivalence_check: d must be in 1..4");
  }
  const Dataset grid = prime_hypercube();

  GbmConfig gbm_config;
  gbm_config.max_depth = order;
  gbm_config.n_trees = 3000;
  gbm_config.learning_rate = 0.5;
  gbm_config.objective = family == Family::poisson_log
                             ? Objective::poisson_log
                             : Objective::squared_error_identity;
  const GbmModel gbm = fit_gbm(grid, gbm_config);
  const auto gbm_preds = gbm_predict(grid, gbm);

  const InteractionGlm glm = fit_interaction_glm(grid, order, family);
  const auto glm_preds = interaction_predict(grid, glm);

  double worst = 0.0;
  for (std::size_t i = 0; i < grid.n_rows; ++i) {
    const double denom = std::max(std::fabs(glm_preds[i]), 1e-12);
    worst = std::max(worst, std::fabs(gbm_preds[i] - glm_preds[i]) / denom);
  }
  return worst;
}

void write_interaction_csv(const InteractionGlm& model, std::ostream& out) {
  out << "subset,coefficient\n";
  for (std::size_t c = 0; c < model.design.n_columns(); ++c) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", model.coefficients[c]);
    out << model.design.column_label(c) << ',' << buf << '\n';
  }
}

}  // namespace treeglm
