#include "treeglm/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace treeglm {

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::none: return "none";
    case Scenario::insufficient_learning: return "insufficient_learning";
    case Scenario::gemstones: return "gemstones";
    case Scenario::composite: return "composite";
    case Scenario::composite_scaled: return "composite_scaled";
    case Scenario::mixture: return "mixture";
    case Scenario::missing_features: return "missing_features";
  }
  return "none";
}

Scenario scenario_from_name(const std::string& name) {
  for (Scenario s : {Scenario::none, Scenario::insufficient_learning,
                     Scenario::gemstones, Scenario::composite,
                     Scenario::composite_scaled, Scenario::mixture,
                     Scenario::missing_features}) {
    if (scenario_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown scenario: " + name);
}

void Dataset::validate(bool poisson) const {
  if (n_rows < 1 || n_cols < 1) {
    throw std::invalid_argument("dataset: need n >= 1 rows and B >= 1 features");
  }
  if (features.size() != n_rows * n_cols || response.size() != n_rows) {
    throw std::invalid_argument("dataset: feature/response shape mismatch");
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: non-finite feature");
  }
  for (double y : response) {
    if (!std::isfinite(y)) throw std::invalid_argument("dataset: non-finite response");
    if (poisson && (y < 0.0 || y != std::floor(y))) {
      throw std::invalid_argument(
          "dataset: Poisson response must be a non-negative integer");
    }
  }
}

std::string format_double(double v) {
  char buf[40];
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
  }
  return buf;
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
  for (std::size_t j = 0; j < ds.n_cols; ++j) {
    const std::string name =
        j < ds.feature_names.size() ? ds.feature_names[j] : "x" + std::to_string(j + 1);
    out << name << ',';
  }
  out << "y\n";
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    for (std::size_t j = 0; j < ds.n_cols; ++j) {
      out << format_double(ds.x(i, j)) << ',';
    }
    out << format_double(ds.response[i]) << '\n';
  }
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  write_dataset_csv(ds, out);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset csv: empty input");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "y") {
    throw std::invalid_argument("dataset csv: header must end in 'y'");
  }
  Dataset ds;
  ds.n_cols = header.size() - 1;
  ds.feature_names.assign(header.begin(), header.end() - 1);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("dataset csv: ragged row");
    }
    for (std::size_t j = 0; j < ds.n_cols; ++j) {
      ds.features.push_back(parse_double(cells[j]));
    }
    ds.response.push_back(parse_double(cells.back()));
  }
  ds.n_rows = ds.response.size();
  ds.validate(false);
  return ds;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  return read_dataset_csv(in);
}

void write_dataset_metadata(const Dataset& ds, std::ostream& out) {
  out << "scenario=" << scenario_name(ds.scenario) << '\n';
  out << "seed=" << ds.seed << '\n';
  out << "n=" << ds.n_rows << '\n';
  out << "features=" << ds.n_cols << '\n';
  for (const auto& [key, value] : ds.overrides) {
    out << "override." << key << '=' << format_double(value) << '\n';
  }
  for (const auto& [key, value] : ds.info) {
    out << key << '=' << format_double(value) << '\n';
  }
}

void write_dataset_metadata(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  write_dataset_metadata(ds, out);
}

}  // namespace treeglm
