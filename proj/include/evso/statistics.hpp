#pragma once

#include <span>

namespace evso {

/// Sample Pearson correlation. Throws DegenerateInput when either series is
/// constant (the coefficient is undefined there); lengths must match and be >= 2.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Ordinary least-squares line y = intercept + slope * x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

// Published linear model of adjacent-frame SSIM as a function of M-Diff.
inline constexpr double kRegressionIntercept = 1.0063;
inline constexpr double kRegressionSlope = -1.5903e-5;

/// Unclamped SSIM estimate for an M-Diff value.
constexpr double regression_ssim_estimate(double d_mb) noexcept {
  return kRegressionIntercept + kRegressionSlope * d_mb;
}

}  // namespace evso
