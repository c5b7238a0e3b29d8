#include "evso/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "evso/error.hpp"

namespace evso {
namespace {

using ConstMap = Eigen::Map<const Eigen::ArrayXd>;

void require_paired(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::InvalidArgument, "series lengths differ: " + std::to_string(xs.size()) + " vs " +
                                                std::to_string(ys.size()));
  }
  if (xs.size() < 2) throw Error(ErrorCode::DegenerateInput, "need at least 2 samples");
}

ConstMap as_array(std::span<const double> v) { return ConstMap(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  require_paired(xs, ys);
  const Eigen::ArrayXd dx = as_array(xs) - as_array(xs).mean();
  const Eigen::ArrayXd dy = as_array(ys) - as_array(ys).mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateInput, "constant series has no correlation");
  const double r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  require_paired(xs, ys);
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd design(n, 2);
  design.col(0).setOnes();
  design.col(1) = as_array(xs).matrix();
  const Eigen::VectorXd y = as_array(ys).matrix();
  if ((design.col(1).array() == design(0, 1)).all()) {
    throw Error(ErrorCode::DegenerateInput, "constant regressor");
  }
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd residual = y - design * beta;
  const double ss_tot = (y.array() - y.mean()).square().sum();
  LinearFit fit;
  fit.intercept = beta[0];
  fit.slope = beta[1];
  fit.r_squared = ss_tot > 0.0 ? 1.0 - residual.squaredNorm() / ss_tot : 1.0;
  return fit;
}

}  // namespace evso
