#include "treeglm/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "treeglm/common.hpp"

namespace treeglm {

std::string objective_name(Objective obj) {
  return obj == Objective::squared_error_identity ? "squared_error_identity"
                                                  : "poisson_log";
}

Objective objective_from_name(const std::string& name) {
  if (name == "squared_error_identity" || name == "squared_error") {
    return Objective::squared_error_identity;
  }
  if (name == "poisson_log" || name == "poisson") return Objective::poisson_log;
  throw std::invalid_argument("unknown objective: " + name);
}

double Tree::leaf_value(std::span<const double> x) const {
  int id = 0;
  while (!nodes[id].is_leaf()) {
    const TreeNode& node = nodes[id];
    id = x[node.feature] < node.threshold ? node.yes : node.no;
  }
  return nodes[id].value;
}

namespace {

int node_depth(const std::vector<TreeNode>& nodes, int id) {
  const TreeNode& node = nodes[id];
  if (node.is_leaf()) return 0;
  return 1 + std::max(node_depth(nodes, node.yes), node_depth(nodes, node.no));
}

}  // namespace

int Tree::depth() const { return nodes.empty() ? 0 : node_depth(nodes, 0); }

double GbmModel::score(std::span<const double> x) const {
  if (x.size() != n_features) {
    throw std::invalid_argument("gbm predict: feature dimension mismatch");
  }
  double total = base_score;
  for (const Tree& tree : trees) total += learning_rate * tree.leaf_value(x);
  return total;
}

double GbmModel::predict(std::span<const double> x) const {
  const double s = score(x);
  return objective == Objective::poisson_log ? std::exp(s) : s;
}

int GbmModel::max_tree_depth() const {
  int deepest = 0;
  for (const Tree& tree : trees) deepest = std::max(deepest, tree.depth());
  return deepest;
}

namespace {

/// Candidate thresholds per feature: midpoints between consecutive sorted
/// unique values. bin_of maps each row to the index of its value.
struct FeatureBins {
  std::vector<std::vector<double>> cuts;
  std::vector<std::vector<int>> bin_of;
  std::vector<int> n_bins;
};

FeatureBins build_bins(const Dataset& ds) {
  FeatureBins bins;
  bins.cuts.resize(ds.n_cols);
  bins.bin_of.resize(ds.n_cols);
  bins.n_bins.resize(ds.n_cols);
  std::vector<double> values(ds.n_rows);
  for (std::size_t j = 0; j < ds.n_cols; ++j) {
    for (std::size_t i = 0; i < ds.n_rows; ++i) values[i] = ds.x(i, j);
    std::vector<double> unique = values;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    bins.n_bins[j] = static_cast<int>(unique.size());
    bins.cuts[j].resize(unique.size() > 1 ? unique.size() - 1 : 0);
    for (std::size_t b = 0; b + 1 < unique.size(); ++b) {
      bins.cuts[j][b] = 0.5 * (unique[b] + unique[b + 1]);
    }
    bins.bin_of[j].resize(ds.n_rows);
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
      bins.bin_of[j][i] = static_cast<int>(
          std::lower_bound(unique.begin(), unique.end(), values[i]) -
          unique.begin());
    }
  }
  return bins;
}

struct BuildNode {
  int id = 0;
  double grad_sum = 0.0;
  double hess_sum = 0.0;
  std::vector<int> rows;
};

struct BestSplit {
  double gain = 0.0;  // splits require strictly positive gain
  int feature = -1;
  int cut = -1;
  bool found() const { return feature >= 0; }
};

Tree grow_tree(const Dataset& ds, const FeatureBins& bins,
               const std::vector<double>& grad, const std::vector<double>& hess,
               const GbmConfig& config) {
  Tree tree;
  tree.nodes.emplace_back();

  BuildNode root;
  root.id = 0;
  root.rows.resize(ds.n_rows);
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    root.rows[i] = static_cast<int>(i);
    root.grad_sum += grad[i];
    root.hess_sum += hess[i];
  }

  const double eps = config.hessian_floor;
  std::vector<BuildNode> frontier;
  frontier.push_back(std::move(root));

  std::vector<double> hist_g;
  std::vector<double> hist_h;
  std::vector<int> hist_c;

  for (int level = 0; level < config.max_depth && !frontier.empty(); ++level) {
    std::vector<BuildNode> next;
    for (BuildNode& node : frontier) {
      BestSplit best;
      const double parent_term =
          node.grad_sum * node.grad_sum / (node.hess_sum + eps);
      for (std::size_t j = 0; j < ds.n_cols; ++j) {
        const int nb = bins.n_bins[j];
        if (nb < 2) continue;
        hist_g.assign(nb, 0.0);
        hist_h.assign(nb, 0.0);
        hist_c.assign(nb, 0);
        const auto& bin_of = bins.bin_of[j];
        for (int r : node.rows) {
          const int b = bin_of[r];
          hist_g[b] += grad[r];
          hist_h[b] += hess[r];
          ++hist_c[b];
        }
        double left_g = 0.0, left_h = 0.0;
        int left_c = 0;
        const int total_c = static_cast<int>(node.rows.size());
        for (int b = 0; b + 1 < nb; ++b) {
          left_g += hist_g[b];
          left_h += hist_h[b];
          left_c += hist_c[b];
          const int right_c = total_c - left_c;
          if (left_c < config.min_child_samples || right_c < config.min_child_samples) {
            continue;
          }
          const double right_g = node.grad_sum - left_g;
          const double right_h = node.hess_sum - left_h;
          const double gain = left_g * left_g / (left_h + eps) +
                              right_g * right_g / (right_h + eps) - parent_term;
          if (gain > best.gain) {
            best.gain = gain;
            best.feature = static_cast<int>(j);
            best.cut = b;
          }
        }
      }

      if (!best.found()) {
        tree.nodes[node.id].value = -node.grad_sum / (node.hess_sum + eps);
        continue;
      }

      BuildNode yes_child, no_child;
      yes_child.id = static_cast<int>(tree.nodes.size());
      no_child.id = yes_child.id + 1;
      tree.nodes[node.id].feature = best.feature;
      tree.nodes[node.id].threshold = bins.cuts[best.feature][best.cut];
      tree.nodes[node.id].yes = yes_child.id;
      tree.nodes[node.id].no = no_child.id;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();

      const auto& bin_of = bins.bin_of[best.feature];
      for (int r : node.rows) {
        if (bin_of[r] <= best.cut) {
          yes_child.rows.push_back(r);
          yes_child.grad_sum += grad[r];
          yes_child.hess_sum += hess[r];
        } else {
          no_child.rows.push_back(r);
          no_child.grad_sum += grad[r];
          no_child.hess_sum += hess[r];
        }
      }
      next.push_back(std::move(yes_child));
      next.push_back(std::move(no_child));
    }
    frontier = std::move(next);
  }

  // Nodes that reached the depth limit become leaves.
  for (const BuildNode& node : frontier) {
    tree.nodes[node.id].value = -node.grad_sum / (node.hess_sum + eps);
  }
  return tree;
}

void check_gbm_config(const GbmConfig& config) {
  if (config.max_depth < 1) throw std::invalid_argument("gbm: max_depth must be >= 1");
  if (config.n_trees < 1) throw std::invalid_argument("gbm: n_trees must be >= 1");
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("gbm: learning_rate must be positive");
  }
  if (config.min_child_samples < 1) {
    throw std::invalid_argument("gbm: min_child_samples must be >= 1");
  }
  if (config.hessian_floor < 0.0) {
    throw std::invalid_argument("gbm: hessian_floor must be >= 0");
  }
}

GbmModel fit_impl(const Dataset& ds, const GbmConfig& config,
                  std::vector<double>* curve) {
  check_gbm_config(config);
  const bool poisson = config.objective == Objective::poisson_log;
  ds.validate(poisson);

  double mean_y = 0.0;
  for (double y : ds.response) mean_y += y;
  mean_y /= static_cast<double>(ds.n_rows);
  if (poisson && !(mean_y > 0.0)) {
    throw std::invalid_argument("gbm: Poisson objective needs a positive mean response");
  }

  GbmModel model;
  model.objective = config.objective;
  model.learning_rate = config.learning_rate;
  model.n_features = ds.n_cols;
  model.base_score = poisson ? std::log(mean_y) : mean_y;

  const FeatureBins bins = build_bins(ds);
  const std::size_t n = ds.n_rows;
  std::vector<double> score(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);

  for (int round = 0; round < config.n_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      if (poisson) {
        const double lambda = std::exp(score[i]);
        grad[i] = lambda - ds.response[i];
        hess[i] = lambda;
      } else {
        grad[i] = score[i] - ds.response[i];
        hess[i] = 1.0;
      }
    }
    Tree tree = grow_tree(ds, bins, grad, hess, config);
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += config.learning_rate * tree.leaf_value(ds.row(i));
    }
    model.trees.push_back(std::move(tree));

    if (curve != nullptr) {
      double loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (poisson) {
          loss += std::exp(score[i]) - ds.response[i] * score[i];
        } else {
          const double e = score[i] - ds.response[i];
          loss += e * e;
        }
      }
      curve->push_back(loss / static_cast<double>(n));
    }
  }
  return model;
}

}  // namespace

GbmModel fit_gbm(const Dataset& ds, const GbmConfig& config) {
  return fit_impl(ds, config, nullptr);
}

std::vector<double> gbm_training_curve(const Dataset& ds, const GbmConfig& config) {
  std::vector<double> curve;
  fit_impl(ds, config, &curve);
  return curve;
}

std::vector<double> gbm_predict(const Dataset& ds, const GbmModel& model) {
  std::vector<double> out(ds.n_rows);
  for (std::size_t i = 0; i < ds.n_rows; ++i) out[i] = model.predict(ds.row(i));
  return out;
}

namespace {

void dump_node(const Tree& tree, int id, int indent, std::ostream& out) {
  const TreeNode& node = tree.nodes[id];
  for (int i = 0; i < indent; ++i) out << ' ';
  char buf[64];
  if (node.is_leaf()) {
    std::snprintf(buf, sizeof(buf), "%.17g", node.value);
    out << "leaf " << id << ": " << buf << '\n';
    return;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", node.threshold);
  out << "node " << id << ": [x" << (node.feature + 1) << " < " << buf
      << "] yes=" << node.yes << " no=" << node.no << '\n';
  dump_node(tree, node.yes, indent + 2, out);
  dump_node(tree, node.no, indent + 2, out);
}

}  // namespace

void write_gbm_dump(const GbmModel& model, std::ostream& out) {
  out << "gbm\n";
  out << "objective=" << objective_name(model.objective) << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", model.base_score);
  out << "base_score=" << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", model.learning_rate);
  out << "learning_rate=" << buf << '\n';
  out << "n_features=" << model.n_features << '\n';
  out << "n_trees=" << model.trees.size() << '\n';
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    out << "tree " << t << ":\n";
    dump_node(model.trees[t], 0, 2, out);
  }
}

GbmModel read_gbm_dump(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "gbm") {
    throw std::invalid_argument("gbm dump: missing 'gbm' header");
  }
  auto header_value = [&](const std::string& key) {
    if (!std::getline(in, line) || line.rfind(key + "=", 0) != 0) {
      throw std::invalid_argument("gbm dump: expected '" + key + "='");
    }
    return line.substr(key.size() + 1);
  };
  GbmModel model;
  model.objective = objective_from_name(header_value("objective"));
  model.base_score = std::stod(header_value("base_score"));
  model.learning_rate = std::stod(header_value("learning_rate"));
  model.n_features = std::stoul(header_value("n_features"));
  const std::size_t n_trees = std::stoul(header_value("n_trees"));

  model.trees.reserve(n_trees);
  Tree current;
  auto flush_tree = [&]() {
    if (!current.nodes.empty()) model.trees.push_back(std::move(current));
    current = Tree{};
  };
  auto ensure_node = [&](int id) -> TreeNode& {
    if (static_cast<std::size_t>(id) >= current.nodes.size()) {
      current.nodes.resize(id + 1);
    }
    return current.nodes[id];
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int id = 0, feature = 0, yes = 0, no = 0;
    double value = 0.0;
    if (std::sscanf(line.c_str(), " tree %d", &id) == 1) {
      flush_tree();
      continue;
    }
    if (std::sscanf(line.c_str(), " node %d : [x%d < %lf ] yes=%d no=%d", &id,
                    &feature, &value, &yes, &no) == 5) {
      TreeNode& node = ensure_node(id);
      node.feature = feature - 1;
      node.threshold = value;
      node.yes = yes;
      node.no = no;
      continue;
    }
    if (std::sscanf(line.c_str(), " leaf %d : %lf", &id, &value) == 2) {
      TreeNode& node = ensure_node(id);
      node.feature = -1;
      node.value = value;
      continue;
    }
    throw std::invalid_argument("gbm dump: unrecognised line: " + line);
  }
  flush_tree();
  if (model.trees.size() != n_trees) {
    throw std::invalid_argument("gbm dump: tree count mismatch");
  }
  return model;
}

}  // namespace treeglm
