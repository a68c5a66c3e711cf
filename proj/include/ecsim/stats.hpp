#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ecsim::stats {

struct MeanCi {
  double mean = 0;
  double half_width = 0;  // 95% normal
  std::size_t count = 0;
};

inline constexpr double kZ95 = 1.959963984540054;

MeanCi mean_ci(std::span<const double> xs);

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Linear interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::span<const double> xs, double q);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Pearson chi-square statistic of observed counts against expected counts.
double chi_square(std::span<const double> observed, std::span<const double> expected);

/// Upper 95% point of chi-square with dof degrees of freedom (Wilson-Hilferty).
double chi_square_95(int dof);

/// Harmonic number H(k).
double harmonic(std::int64_t k);

/// splitmix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace ecsim::stats
