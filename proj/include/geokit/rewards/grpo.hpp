#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "geokit/detail/numeric.hpp"
#include "geokit/error.hpp"

namespace geokit::rewards {

inline constexpr double kDefaultAdvantageEpsilon = 1e-8;

struct AdvantageGroup {
  std::vector<double> rewards;
  std::vector<double> advantages;
  double epsilon = kDefaultAdvantageEpsilon;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

/// Group-normalized advantage (r_i - mean) / (population std + epsilon).
/// A constant group therefore maps to all zeros.
inline AdvantageGroup grpo_advantages(std::span<const double> rewards,
                                      double epsilon = kDefaultAdvantageEpsilon) {
  if (rewards.size() < 2) throw InvalidArgument("grpo_advantages: group size must be >= 2");
  if (!(epsilon > 0.0)) throw InvalidArgument("grpo_advantages: epsilon must be positive");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw InvalidArgument("grpo_advantages: non-finite reward");
  }

  const auto n = static_cast<double>(rewards.size());
  geokit::detail::CompensatedSum sum;
  for (double r : rewards) sum.add(r);
  // n * r / n can miss r by an ulp; pin the mean so a constant group is exactly zero
  const bool constant =
      std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards[0]; });
  const double mean = constant ? rewards[0] : sum.value() / n;

  geokit::detail::CompensatedSum sq;
  for (double r : rewards) sq.add((r - mean) * (r - mean));
  const double stddev = std::sqrt(sq.value() / n);

  AdvantageGroup g;
  g.rewards.assign(rewards.begin(), rewards.end());
  g.epsilon = epsilon;
  g.mean = mean;
  g.stddev = stddev;
  g.advantages.reserve(rewards.size());
  for (double r : rewards) g.advantages.push_back((r - mean) / (stddev + epsilon));
  return g;
}

}  // namespace geokit::rewards
