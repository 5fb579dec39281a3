#pragma once

#include <span>
#include <string>
#include <vector>

#include "treeglm/dataset.hpp"

namespace treeglm {

enum class Family { gaussian_identity, poisson_log };

std::string family_name(Family family);
Family family_from_name(const std::string& name);

/// Column layout of the order-d interaction expansion over B binary
/// features: one column per feature subset of size 0..d (the empty subset is
/// the intercept), ordered by subset size then lexicographically.
struct InteractionDesign {
  std::size_t n_base_features = 0;
  int order = 0;
  std::vector<std::vector<int>> columns;  // 0-based feature indices

  std::size_t n_columns() const { return columns.size(); }
  std::string column_label(std::size_t col) const;  // "1", "x2", "x1*x3", ...
};

InteractionDesign make_interaction_design(std::size_t n_base_features, int order);

/// Row-major design matrix: each cell is the product of the subset's
/// features (1 for the intercept column). Requires 1 <= d <= B.
std::vector<double> expand_interactions(const Dataset& ds, int order);

struct InteractionGlm {
  InteractionDesign design;
  Family family = Family::gaussian_identity;
  std::vector<double> coefficients;
  bool rank_deficient = false;  // minimum-norm solution was used
};

struct IrlsConfig {
  int max_iterations = 200;
  double tolerance = 1e-12;          // relative deviance change
  long fallback_epochs = 50000;      // gradient ascent used if IRLS stalls
  double fallback_learning_rate = 0.01;
};

/// Unpenalised maximum-likelihood fit of the order-d interaction GLM by
/// iteratively reweighted least squares (minimum-norm step on rank-deficient
/// designs), with a gradient-ascent fallback. Deterministic.
InteractionGlm fit_interaction_glm(const Dataset& ds, int order, Family family,
                                   const IrlsConfig& config = {});

std::vector<double> interaction_predict(const Dataset& ds, const InteractionGlm& model);

/// Builds the full 2x2x2x2 grid whose cell responses are the first sixteen
/// primes in lexicographic cell order (x1 most significant), fits a
/// converged unregularised GBM and the order-d interaction GLM, and returns
/// the maximum relative prediction difference across the sixteen cells.
double hypercube_equivalence_check(int order, Family family);

void write_interaction_csv(const InteractionGlm& model, std::ostream& out);

}  // namespace treeglm
