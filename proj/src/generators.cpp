#include "treeglm/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "treeglm/rng.hpp"

namespace treeglm {

namespace {

double override_or(const ScenarioSpec& spec, const std::string& key, double fallback,
                   const std::vector<std::string>& allowed) {
  for (const auto& [k, v] : spec.overrides) {
    bool known = false;
    for (const auto& a : allowed) known = known || a == k;
    if (!known) {
      throw std::invalid_argument("generator override not supported here: " + k);
    }
    (void)v;
  }
  auto it = spec.overrides.find(key);
  return it == spec.overrides.end() ? fallback : it->second;
}

Dataset new_dataset(const ScenarioSpec& spec, std::size_t n_cols) {
  if (spec.n < 1) throw std::invalid_argument("generator: n must be >= 1");
  Dataset ds;
  ds.scenario = spec.scenario;
  ds.seed = spec.seed;
  ds.overrides = spec.overrides;
  ds.n_rows = spec.n;
  ds.n_cols = n_cols;
  ds.features.reserve(spec.n * n_cols);
  ds.response.reserve(spec.n);
  for (std::size_t j = 0; j < n_cols; ++j) {
    ds.feature_names.push_back("x" + std::to_string(j + 1));
  }
  return ds;
}

Dataset gen_composite_impl(const ScenarioSpec& spec, std::size_t m) {
  Dataset ds = new_dataset(spec, m);
  Rng rng(spec.seed);
  std::vector<double> x(m);
  double response_sum = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < m; ++j) x[j] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    long y = 0;
    for (int s = 0; s < 3; ++s) y += rng.poisson(composite_true_rate(x, s));
    ds.features.insert(ds.features.end(), x.begin(), x.end());
    ds.response.push_back(static_cast<double>(y));
    response_sum += static_cast<double>(y);
  }
  ds.info["response_mean"] = response_sum / static_cast<double>(spec.n);
  return ds;
}

// One column in each group of four (x1, and x5 when m = 8) carries the same
// sign in every pattern.
constexpr int kCompositeSigns[3][4] = {
    {+1, +1, -1, -1},
    {+1, -1, +1, -1},
    {+1, -1, -1, +1},
};

}  // namespace

std::array<std::vector<int>, 3> composite_sign_patterns(std::size_t m) {
  if (m != 4 && m != 8) {
    throw std::invalid_argument("composite patterns are defined for m = 4 or 8");
  }
  std::array<std::vector<int>, 3> patterns;
  for (int s = 0; s < 3; ++s) {
    patterns[s].resize(m);
    for (std::size_t j = 0; j < m; ++j) patterns[s][j] = kCompositeSigns[s][j % 4];
  }
  return patterns;
}

double composite_true_rate(std::span<const double> x, int pattern) {
  if (pattern < 0 || pattern > 2) {
    throw std::invalid_argument("composite pattern must be 0, 1 or 2");
  }
  if (x.size() != 4 && x.size() != 8) {
    throw std::invalid_argument("composite rows have 4 or 8 coins");
  }
  int exponent = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const int sign = kCompositeSigns[pattern][j % 4];
    exponent += x[j] > 0.5 ? sign : -sign;
  }
  return std::exp2(exponent);
}

double mixture_true_rate(std::span<const double> x, bool population_a) {
  if (x.size() != 12) {
    throw std::invalid_argument("mixture rows have 12 coins");
  }
  const double f_a = population_a ? 2.0 : 0.5;  // 2^(2k-1)
  const double f_b = population_a ? 0.5 : 2.0;  // 2 - 1.5k
  const double doublings = x[0] + x[1] + x[2];
  const double a_heads = x[3] + x[4] + x[5];
  const double b_heads = x[6] + x[7] + x[8];
  const double halvings = x[9] + x[10] + x[11];
  return std::exp2(doublings) * std::pow(0.5, halvings) * std::pow(f_a, a_heads) *
         std::pow(f_b, b_heads);
}

Dataset gen_insufficient_learning(const ScenarioSpec& spec) {
  const auto m = static_cast<std::size_t>(
      override_or(spec, "m", 10.0, {"m", "theta"}));
  const double theta = override_or(spec, "theta", 0.5, {"m", "theta"});
  if (m < 1) throw std::invalid_argument("insufficient_learning: m must be >= 1");
  if (theta < 0.0 || theta > 1.0) {
    throw std::invalid_argument("insufficient_learning: theta must be in [0, 1]");
  }
  Dataset ds = new_dataset(spec, m);
  Rng rng(spec.seed);
  double response_sum = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    double heads = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double x = rng.bernoulli(theta) ? 1.0 : 0.0;
      ds.features.push_back(x);
      heads += x;
    }
    const double y = heads + rng.normal();
    ds.response.push_back(y);
    response_sum += y;
  }
  ds.info["response_mean"] = response_sum / static_cast<double>(spec.n);
  return ds;
}

Dataset gen_gemstones(const ScenarioSpec& spec) {
  override_or(spec, "", 0.0, {});  // no overrides supported
  Dataset ds = new_dataset(spec, 2);
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double blue = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double large = rng.bernoulli(0.5) ? 1.0 : 0.0;
    ds.features.push_back(blue);
    ds.features.push_back(large);
    ds.response.push_back(100.0 * (blue > 0.5 ? 2.0 : 1.0) * (large > 0.5 ? 3.0 : 1.0));
  }
  return ds;
}

Dataset gen_composite(const ScenarioSpec& spec) {
  override_or(spec, "", 0.0, {});
  return gen_composite_impl(spec, 4);
}

Dataset gen_composite_scaled(const ScenarioSpec& spec) {
  override_or(spec, "", 0.0, {});
  return gen_composite_impl(spec, 8);
}

Dataset gen_mixture(const ScenarioSpec& spec) {
  const double p_a = override_or(spec, "p_a", 0.25, {"p_a"});
  if (!(p_a > 0.0 && p_a < 1.0)) {
    throw std::invalid_argument("mixture: p_a must be in (0, 1)");
  }
  constexpr std::size_t m = 12;
  Dataset ds = new_dataset(spec, m);
  Rng rng(spec.seed);
  std::vector<double> x(m);
  std::size_t a_rows = 0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < m; ++j) x[j] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const bool population_a = rng.bernoulli(p_a);
    a_rows += population_a ? 1 : 0;
    const double lambda = mixture_true_rate(x, population_a);
    ds.features.insert(ds.features.end(), x.begin(), x.end());
    ds.response.push_back(static_cast<double>(rng.poisson(lambda)));
    ds.latent_class.push_back(population_a ? 1 : 0);
  }
  ds.info["population_a_fraction"] =
      static_cast<double>(a_rows) / static_cast<double>(spec.n);
  return ds;
}

Dataset gen_missing(const ScenarioSpec& spec) {
  const double flip_prob = override_or(spec, "flip_prob", 0.1, {"flip_prob"});
  if (flip_prob < 0.0 || flip_prob > 1.0) {
    throw std::invalid_argument("missing_features: flip_prob must be in [0, 1]");
  }
  constexpr std::size_t m = 6;
  constexpr std::size_t visible = 3;
  Dataset ds = new_dataset(spec, visible);
  Rng rng(spec.seed);
  double hidden_sum = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    double records[m];
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      records[j] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (rng.bernoulli(flip_prob)) records[j] = 1.0 - records[j];
      total += records[j];
    }
    for (std::size_t j = 0; j < visible; ++j) ds.features.push_back(records[j]);
    for (std::size_t j = visible; j < m; ++j) hidden_sum += records[j];
    ds.response.push_back(static_cast<double>(rng.poisson(std::exp2(total))));
  }
  ds.info["hidden_record_mean"] =
      hidden_sum / static_cast<double>(spec.n * (m - visible));
  return ds;
}

Dataset generate(const ScenarioSpec& spec) {
  switch (spec.scenario) {
    case Scenario::insufficient_learning: return gen_insufficient_learning(spec);
    case Scenario::gemstones: return gen_gemstones(spec);
    case Scenario::composite: return gen_composite(spec);
    case Scenario::composite_scaled: return gen_composite_scaled(spec);
    case Scenario::mixture: return gen_mixture(spec);
    case Scenario::missing_features: return gen_missing(spec);
    case Scenario::none: break;
  }
  throw std::invalid_argument("generate: no scenario selected");
}

}  // namespace treeglm
