#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "treeglm/dataset.hpp"

namespace treeglm {

enum class Objective { squared_error_identity, poisson_log };

std::string objective_name(Objective obj);
Objective objective_from_name(const std::string& name);

/// Flat-array binary tree node. Internal nodes route x[feature] < threshold
/// to `yes`, otherwise to `no`; leaves carry the unscaled Newton value.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int yes = -1;
  int no = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double leaf_value(std::span<const double> x) const;
  int depth() const;
};

struct GbmConfig {
  int max_depth = 3;
  int n_trees = 100;
  double learning_rate = 0.1;
  Objective objective = Objective::squared_error_identity;
  int min_child_samples = 1;
  double hessian_floor = 1e-16;
};

/// Additive ensemble over depth-limited regression trees. Prediction is
/// link_inverse(base_score + learning_rate * sum of tree leaf values).
struct GbmModel {
  Objective objective = Objective::squared_error_identity;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::size_t n_features = 0;
  std::vector<Tree> trees;

  double score(std::span<const double> x) const;    // link scale
  double predict(std::span<const double> x) const;  // response scale
  int max_tree_depth() const;
};

/// Second-order boosting with exact greedy splits. Per round the per-row
/// gradient/hessian of the objective are computed against the current score
/// (squared error: g = pred - y, h = 1; Poisson log-link: g = lambda - y,
/// h = lambda), one tree is grown maximising
///   G_L^2/(H_L+eps) + G_R^2/(H_R+eps) - G^2/(H+eps)
/// with leaf value -G/(H+eps), and added scaled by the learning rate.
/// Ties are broken toward the lowest feature index, then lowest threshold.
/// Deterministic.
GbmModel fit_gbm(const Dataset& ds, const GbmConfig& config);

std::vector<double> gbm_predict(const Dataset& ds, const GbmModel& model);

/// Per-round mean training loss (MSE for squared error, mean negative
/// Poisson log-likelihood without the ln(k!) constant for poisson_log),
/// evaluated after each tree is added.
std::vector<double> gbm_training_curve(const Dataset& ds, const GbmConfig& config);

/// Indented text dump, one tree per block; reloads bit-exactly.
void write_gbm_dump(const GbmModel& model, std::ostream& out);
GbmModel read_gbm_dump(std::istream& in);

}  // namespace treeglm
