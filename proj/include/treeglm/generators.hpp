#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "treeglm/dataset.hpp"

namespace treeglm {

/// Recipe for one synthetic dataset. `overrides` accepts only the keys
/// documented per scenario below; anything else is a usage error.
struct ScenarioSpec {
  Scenario scenario = Scenario::none;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::map<std::string, double> overrides;
};

/// Dispatch on spec.scenario. All generators draw row-major: every draw for
/// row j happens before any draw for row j+1, in the order documented on
/// each generator. Identical specs produce bit-identical datasets.
Dataset generate(const ScenarioSpec& spec);

/// m fair coins per row (overrides: m=10, theta=0.5); response is the head
/// count plus unit Gaussian noise. Per-row draw order: x_1..x_m, then noise.
Dataset gen_insufficient_learning(const ScenarioSpec& spec);

/// Two binary features (blue, large), each Bern(0.5), so the four cells are
/// uniform; price is exactly 100 * 2^blue * 3^large. Per-row draw order:
/// blue, large.
Dataset gen_gemstones(const ScenarioSpec& spec);

/// Four fair coins; three sub-rates, each doubling per matching coin and
/// halving per opposing coin (sign patterns A=(+,+,-,-), B=(+,-,+,-),
/// C=(+,-,-,+)); response is the sum of three independent Poisson draws.
/// Per-row draw order: x_1..x_4, then the A, B, C counts.
Dataset gen_composite(const ScenarioSpec& spec);

/// Eight-coin variant of the composite scenario. The four-coin sign patterns
/// are repeated verbatim on coins 5-8, so columns 1 and 5 act identically on
/// every sub-rate and the remaining six behave differently between
/// sub-responses. Per-row draw order: x_1..x_8, then the A, B, C counts.
Dataset gen_composite_scaled(const ScenarioSpec& spec);

/// Twelve fair coins plus a hidden population label k ~ Bern(p_a)
/// (override: p_a=0.25). Rate = 2^(x1+x2+x3) * 0.5^(x10+x11+x12)
/// * f_A^(x4+x5+x6) * f_B^(x7+x8+x9) with f_A = 2^(2k-1), f_B = 2 - 1.5k;
/// response ~ Poisson(rate). The label goes to latent_class, never into the
/// features. Per-row draw order: x_1..x_12, k, then the count.
Dataset gen_mixture(const ScenarioSpec& spec);

/// Six fair coins h_i recorded through a noisy channel: each record flips
/// with probability flip_prob (override, default 0.1). Rate = 2^(sum of all
/// six records); only the first three records are exposed as features.
/// Per-row draw order: h_1..h_6, d_1..d_6, then the count.
Dataset gen_missing(const ScenarioSpec& spec);

/// Sign patterns of the composite scenarios (m = 4 or 8): +1 doubles the
/// sub-rate on heads, -1 halves it. The four-coin patterns are repeated on
/// coins 5-8 for m = 8.
std::array<std::vector<int>, 3> composite_sign_patterns(std::size_t m);

/// Rate of one composite sub-response: 2^(matching coins) * 0.5^(opposing).
double composite_true_rate(std::span<const double> x, int pattern);

/// Rate of one mixture population at a twelve-coin row.
double mixture_true_rate(std::span<const double> x, bool population_a);

}  // namespace treeglm
