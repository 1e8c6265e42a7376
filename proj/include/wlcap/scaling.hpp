#pragma once

#include <span>
#include <utility>
#include <vector>

namespace wlcap {

struct ScalingPoint {
  double x = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

/// Measurements over a sweep plus their least-squares fit in (ln x, ln y).
struct ScalingResult {
  std::vector<ScalingPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares on (ln x, ln y). Needs >= 3 points with x, y > 0
/// (InvalidParameter / InvalidData otherwise). A constant y gives slope 0 and r2 1.
ScalingResult fit_loglog(std::span<const std::pair<double, double>> xy);

/// Fits the means of already-aggregated points.
ScalingResult fit_points(std::vector<ScalingPoint> points);

/// Mean and standard error of a sample (stderr 0 for fewer than two values).
ScalingPoint summarize(double x, std::span<const double> values);

}  // namespace wlcap
