#include "treeglm/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "treeglm/metrics.hpp"
#include "treeglm/mixture.hpp"
#include "treeglm/multiresp.hpp"

namespace treeglm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string short_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string ModelSpec::label() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::gbm:
      out << "gbm d=" << depth << " trees=" << n_trees
          << " lr=" << short_number(gbm_learning_rate) << ' '
          << objective_name(objective);
      break;
    case Kind::glm:
      out << "glm";
      break;
    case Kind::multiresp:
      out << "multiresp S=" << submodel_count;
      break;
    case Kind::mixture:
      out << "mixture S=2 f=" << short_number(prevalence);
      break;
    case Kind::interaction_glm:
      out << "interaction_glm d=" << depth << ' ' << family_name(family);
      break;
  }
  return out.str();
}

ModelSpec ModelSpec::parse(const std::string& text) {
  std::istringstream in(text);
  std::string token;
  if (!std::getline(in, token, ',')) {
    throw std::invalid_argument("empty model spec");
  }
  token = trim(token);

  ModelSpec spec;
  if (token == "gbm") {
    spec.kind = Kind::gbm;
  } else if (token == "glm") {
    spec.kind = Kind::glm;
  } else if (token == "multiresp") {
    spec.kind = Kind::multiresp;
  } else if (token == "mixture") {
    spec.kind = Kind::mixture;
  } else if (token == "interaction_glm") {
    spec.kind = Kind::interaction_glm;
  } else {
    throw std::invalid_argument("unknown model kind: " + token);
  }

  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("model spec option needs key=value: " + token);
    }
    const std::string key = trim(token.substr(0, eq));
    const std::string value = trim(token.substr(eq + 1));
    if (key == "d" || key == "depth") {
      spec.depth = std::stoi(value);
    } else if (key == "n_trees" || key == "trees") {
      spec.n_trees = std::stoi(value);
    } else if (key == "lr") {
      if (spec.kind == Kind::gbm) {
        spec.gbm_learning_rate = std::stod(value);
      } else {
        spec.fit_learning_rate = std::stod(value);
      }
    } else if (key == "objective") {
      spec.objective = objective_from_name(value);
    } else if (key == "family") {
      spec.family = family_from_name(value);
    } else if (key == "S") {
      spec.submodel_count = std::stoi(value);
    } else if (key == "f") {
      spec.prevalence = std::stod(value);
    } else if (key == "epochs") {
      spec.fit_epochs = std::stol(value);
    } else if (key == "tol") {
      spec.fit_tolerance = std::stod(value);
    } else if (key == "init_scale") {
      spec.fit_init_scale = std::stod(value);
    } else {
      throw std::invalid_argument("unknown model spec option: " + key);
    }
  }
  return spec;
}

bool ExperimentReport::has_errors() const {
  for (const auto& row : rows) {
    if (!row.error.empty()) return true;
  }
  return false;
}

namespace {

FitConfig fit_config_for(const ModelSpec& spec, std::uint64_t seed) {
  FitConfig config;
  if (spec.fit_learning_rate) config.learning_rate = *spec.fit_learning_rate;
  if (spec.fit_epochs) config.max_epochs = *spec.fit_epochs;
  if (spec.fit_tolerance) config.tolerance = *spec.fit_tolerance;
  if (spec.fit_init_scale) config.init_scale = *spec.fit_init_scale;
  config.seed = seed;
  return config;
}

std::vector<double> fit_and_predict(const ModelSpec& spec, const Dataset& train,
                                    const Dataset& test, std::uint64_t seed) {
  switch (spec.kind) {
    case ModelSpec::Kind::gbm: {
      GbmConfig config;
      config.max_depth = spec.depth;
      config.n_trees = spec.n_trees;
      config.learning_rate = spec.gbm_learning_rate;
      config.objective = spec.objective;
      return gbm_predict(test, fit_gbm(train, config));
    }
    case ModelSpec::Kind::glm:
      return glm_predict(test, fit_glm(train, fit_config_for(spec, seed)));
    case ModelSpec::Kind::multiresp:
      return multiresp_predict(
          test,
          fit_multiresp(train, spec.submodel_count, fit_config_for(spec, seed)));
    case ModelSpec::Kind::mixture:
      return mixture_predict(
          test, fit_mixture(train, spec.prevalence, fit_config_for(spec, seed)));
    case ModelSpec::Kind::interaction_glm:
      return interaction_predict(
          test, fit_interaction_glm(train, spec.depth, spec.family));
  }
  throw std::invalid_argument("unhandled model kind");
}

struct CellResult {
  double mae = std::numeric_limits<double>::quiet_NaN();
  double rmse = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  std::string error;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.grid.empty()) throw std::invalid_argument("run_experiment: empty grid");
  if (config.replications < 1) {
    throw std::invalid_argument("run_experiment: replications must be >= 1");
  }

  const int reps = config.replications;
  std::vector<Dataset> train(reps), test(reps);
  for (int r = 0; r < reps; ++r) {
    ScenarioSpec spec;
    spec.scenario = config.scenario;
    spec.overrides = config.overrides;
    spec.n = config.n_train;
    spec.seed = config.seed + 2 * static_cast<std::uint64_t>(r);
    train[r] = generate(spec);
    spec.n = config.n_test;
    spec.seed = config.seed + 2 * static_cast<std::uint64_t>(r) + 1;
    test[r] = generate(spec);
  }

  const std::size_t n_cells = config.grid.size();
  std::vector<std::vector<CellResult>> results(n_cells);
  for (auto& per_rep : results) per_rep.resize(reps);

  const std::size_t n_tasks = n_cells * static_cast<std::size_t>(reps);
  std::atomic<std::size_t> next_task{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= n_tasks) return;
      const std::size_t cell = task / reps;
      const int rep = static_cast<int>(task % reps);
      const ModelSpec& spec = config.grid[cell];
      CellResult& slot = results[cell][rep];
      const auto start = std::chrono::steady_clock::now();
      try {
        const std::uint64_t fit_seed = config.seed + 1009 * cell + rep;
        const auto preds = fit_and_predict(spec, train[rep], test[rep], fit_seed);
        slot.mae = mae(preds, test[rep].response);
        slot.rmse = rmse(preds, test[rep].response);
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
      slot.seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    }
  };

  int workers = config.workers > 0
                    ? config.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n_tasks)));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();

  ExperimentReport report;
  report.scenario = scenario_name(config.scenario);
  report.seed = config.seed;
  report.n_train = config.n_train;
  report.n_test = config.n_test;
  report.replications = reps;
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    ReportRow row;
    row.label = config.grid[cell].label();
    double mae_sum = 0.0, rmse_sum = 0.0;
    int ok = 0;
    for (int r = 0; r < reps; ++r) {
      const CellResult& res = results[cell][r];
      row.seconds += res.seconds;
      if (!res.error.empty()) {
        if (row.error.empty()) {
          row.error = "replication " + std::to_string(r) + ": " + res.error;
        }
        continue;
      }
      row.rep_mae.push_back(res.mae);
      row.rep_rmse.push_back(res.rmse);
      mae_sum += res.mae;
      rmse_sum += res.rmse;
      ++ok;
    }
    if (ok > 0) {
      row.mae = mae_sum / ok;
      row.rmse = rmse_sum / ok;
    } else {
      row.mae = std::numeric_limits<double>::quiet_NaN();
      row.rmse = std::numeric_limits<double>::quiet_NaN();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport gbm_depth_lr_sweep(const Dataset& train, const Dataset& test,
                                    std::span<const int> depths,
                                    std::span<const double> learning_rates,
                                    int n_trees, Objective objective) {
  if (depths.empty() || learning_rates.empty()) {
    throw std::invalid_argument("depth/lr sweep: empty grid");
  }
  ExperimentReport report;
  report.scenario = scenario_name(train.scenario);
  report.seed = train.seed;
  report.n_train = train.n_rows;
  report.n_test = test.n_rows;
  report.replications = 1;

  for (int d : depths) {
    ReportRow best;
    best.label = "best d=" + std::to_string(d);
    best.mae = std::numeric_limits<double>::infinity();
    best.rmse = std::numeric_limits<double>::infinity();
    for (double lr : learning_rates) {
      ModelSpec spec;
      spec.kind = ModelSpec::Kind::gbm;
      spec.depth = d;
      spec.n_trees = n_trees;
      spec.gbm_learning_rate = lr;
      spec.objective = objective;

      ReportRow row;
      row.label = spec.label();
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto preds = fit_and_predict(spec, train, test, 0);
        row.mae = mae(preds, test.response);
        row.rmse = rmse(preds, test.response);
        row.rep_mae = {row.mae};
        row.rep_rmse = {row.rmse};
      } catch (const std::exception& e) {
        row.error = e.what();
        row.mae = std::numeric_limits<double>::quiet_NaN();
        row.rmse = std::numeric_limits<double>::quiet_NaN();
      }
      row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      if (row.error.empty()) {
        best.mae = std::min(best.mae, row.mae);
        best.rmse = std::min(best.rmse, row.rmse);
      }
      report.rows.push_back(std::move(row));
    }
    best.rep_mae = {best.mae};
    best.rep_rmse = {best.rmse};
    report.rows.push_back(std::move(best));
  }
  return report;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::vector<std::string> split_csv(const std::string& line) {
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

std::string fixed4(double v) {
  if (std::isnan(v)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string render_report(const ExperimentReport& report, ReportFormat format,
                          bool include_timing) {
  if (report.rows.empty()) throw std::invalid_argument("render_report: empty report");

  // Best means per metric, for the markdown flags.
  double best_mae = std::numeric_limits<double>::infinity();
  double best_rmse = std::numeric_limits<double>::infinity();
  for (const auto& row : report.rows) {
    if (row.label.rfind("best ", 0) == 0 || !row.error.empty()) continue;
    best_mae = std::min(best_mae, row.mae);
    best_rmse = std::min(best_rmse, row.rmse);
  }

  std::ostringstream out;
  const int reps = report.replications;
  if (format == ReportFormat::markdown) {
    out << "scenario: " << report.scenario << "  seed: " << report.seed
        << "  n_train: " << report.n_train << "  n_test: " << report.n_test
        << "  replications: " << reps << "\n\n";
    out << "| model | MAE | RMSE |";
    for (int r = 1; r <= reps && reps > 1; ++r) out << " mae_r" << r << " |";
    for (int r = 1; r <= reps && reps > 1; ++r) out << " rmse_r" << r << " |";
    if (include_timing) out << " seconds |";
    out << "\n|---|---:|---:|";
    for (int r = 0; r < 2 * reps && reps > 1; ++r) out << "---:|";
    if (include_timing) out << "---:|";
    out << '\n';
    for (const auto& row : report.rows) {
      if (!row.error.empty()) {
        out << "| " << row.label << " | error | error |";
        for (int r = 0; r < 2 * reps && reps > 1; ++r) out << " - |";
        if (include_timing) out << " - |";
        out << '\n';
        continue;
      }
      const bool flag_mae = row.mae == best_mae && row.label.rfind("best ", 0) != 0;
      const bool flag_rmse = row.rmse == best_rmse && row.label.rfind("best ", 0) != 0;
      out << "| " << row.label << " | "
          << (flag_mae ? "**" + fixed4(row.mae) + "**" : fixed4(row.mae)) << " | "
          << (flag_rmse ? "**" + fixed4(row.rmse) + "**" : fixed4(row.rmse)) << " |";
      if (reps > 1) {
        for (int r = 0; r < reps; ++r) {
          out << ' '
              << (r < static_cast<int>(row.rep_mae.size()) ? fixed4(row.rep_mae[r])
                                                           : "-")
              << " |";
        }
        for (int r = 0; r < reps; ++r) {
          out << ' '
              << (r < static_cast<int>(row.rep_rmse.size()) ? fixed4(row.rep_rmse[r])
                                                            : "-")
              << " |";
        }
      }
      if (include_timing) out << ' ' << fixed4(row.seconds) << " |";
      out << '\n';
    }
    return out.str();
  }

  // CSV: two header lines of run metadata, then one line per row.
  out << "scenario,seed,n_train,n_test,replications\n";
  out << csv_quote(report.scenario) << ',' << report.seed << ',' << report.n_train
      << ',' << report.n_test << ',' << reps << '\n';
  out << "label,mae,rmse";
  for (int r = 1; r <= reps; ++r) out << ",mae_r" << r;
  for (int r = 1; r <= reps; ++r) out << ",rmse_r" << r;
  if (include_timing) out << ",seconds";
  out << ",error\n";
  for (const auto& row : report.rows) {
    out << csv_quote(row.label) << ',' << full(row.mae) << ',' << full(row.rmse);
    for (int r = 0; r < reps; ++r) {
      out << ',';
      if (r < static_cast<int>(row.rep_mae.size())) out << full(row.rep_mae[r]);
    }
    for (int r = 0; r < reps; ++r) {
      out << ',';
      if (r < static_cast<int>(row.rep_rmse.size())) out << full(row.rep_rmse[r]);
    }
    if (include_timing) out << ',' << full(row.seconds);
    out << ',' << csv_quote(row.error) << '\n';
  }
  return out.str();
}

ExperimentReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv(line).size() != 5) {
    throw std::invalid_argument("report csv: bad metadata header");
  }
  if (!std::getline(in, line)) {
    throw std::invalid_argument("report csv: missing metadata row");
  }
  const auto meta = split_csv(line);
  if (meta.size() != 5) throw std::invalid_argument("report csv: bad metadata row");

  ExperimentReport report;
  report.scenario = meta[0];
  report.seed = std::stoull(meta[1]);
  report.n_train = std::stoul(meta[2]);
  report.n_test = std::stoul(meta[3]);
  report.replications = std::stoi(meta[4]);

  if (!std::getline(in, line)) {
    throw std::invalid_argument("report csv: missing column header");
  }
  const auto header = split_csv(line);
  const int reps = report.replications;
  const bool has_timing =
      header.size() == static_cast<std::size_t>(3 + 2 * reps + 2);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("report csv: ragged row");
    }
    ReportRow row;
    row.label = cells[0];
    row.mae = std::stod(cells[1]);
    row.rmse = std::stod(cells[2]);
    for (int r = 0; r < reps; ++r) {
      const std::string& cell = cells[3 + r];
      if (!cell.empty()) row.rep_mae.push_back(std::stod(cell));
    }
    for (int r = 0; r < reps; ++r) {
      const std::string& cell = cells[3 + reps + r];
      if (!cell.empty()) row.rep_rmse.push_back(std::stod(cell));
    }
    std::size_t next = 3 + 2 * static_cast<std::size_t>(reps);
    if (has_timing) row.seconds = std::stod(cells[next++]);
    row.error = cells[next];
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  return read_report_csv(in);
}

ExperimentConfig read_experiment_config(std::istream& in) {
  ExperimentConfig config;
  config.grid.clear();
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: expected key=value, got: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "scenario") {
      config.scenario = scenario_from_name(value);
    } else if (key == "n_train") {
      config.n_train = std::stoul(value);
    } else if (key == "n_test") {
      config.n_test = std::stoul(value);
    } else if (key == "seed") {
      config.seed = std::stoull(value);
    } else if (key == "replications") {
      config.replications = std::stoi(value);
    } else if (key == "workers") {
      config.workers = std::stoi(value);
    } else if (key == "model") {
      config.grid.push_back(ModelSpec::parse(value));
    } else if (key.rfind("scenario.", 0) == 0) {
      config.overrides[key.substr(9)] = std::stod(value);
    } else {
      throw std::invalid_argument("config: unknown key: " + key);
    }
  }
  if (config.grid.empty()) {
    throw std::invalid_argument("config: needs at least one model= line");
  }
  return config;
}

ExperimentConfig read_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  return read_experiment_config(in);
}

}  // namespace treeglm
