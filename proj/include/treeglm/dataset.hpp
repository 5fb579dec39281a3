#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace treeglm {

enum class Scenario {
  none,
  insufficient_learning,
  gemstones,
  composite,
  composite_scaled,
  mixture,
  missing_features,
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

/// A fully materialised feature matrix plus response vector.
///
/// Features are stored row-major. Latent per-row values produced by a
/// generator (e.g. the hidden population label of the mixture scenario) go
/// into `latent_class` / `info`, never into `features`.
struct Dataset {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> features;  // n_rows * n_cols, row-major
  std::vector<double> response;  // n_rows
  std::vector<std::string> feature_names;
  Scenario scenario = Scenario::none;
  std::uint64_t seed = 0;
  std::map<std::string, double> overrides;

  std::vector<int> latent_class;         // diagnostics only, may be empty
  std::map<std::string, double> info;    // latent summaries for the sidecar

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * n_cols, n_cols};
  }
  double x(std::size_t i, std::size_t j) const {
    return features[i * n_cols + j];
  }

  /// Throws std::invalid_argument unless shapes line up and all values are
  /// finite. `poisson` additionally requires a non-negative integer response.
  void validate(bool poisson = false) const;
};

/// CSV with header `x1,...,xB,y`. Integral cells are written without a
/// decimal point; everything else round-trips at full double precision.
void write_dataset_csv(const Dataset& ds, std::ostream& out);
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

/// key=value sidecar describing how the dataset was generated.
void write_dataset_metadata(const Dataset& ds, std::ostream& out);
void write_dataset_metadata(const Dataset& ds, const std::string& path);

/// Lossless text form of a double (17 significant digits).
std::string format_double(double v);

}  // namespace treeglm
