#include "wlcap/scaling.hpp"

#include <cmath>

#include "wlcap/errors.hpp"

namespace wlcap {

ScalingResult fit_loglog(std::span<const std::pair<double, double>> xy) {
  if (xy.size() < 3) throw InvalidParameter("fit_loglog: need at least 3 points");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : xy) {
    if (!(x > 0.0) || !(y > 0.0)) throw InvalidData("fit_loglog: values must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double k = static_cast<double>(xy.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : xy) {
    const double dx = std::log(x) - mx;
    const double dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw InvalidData("fit_loglog: x values must not all be equal");
  ScalingResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  // Relative tolerance so that rounding noise in a constant series still counts as a perfect fit.
  r.r2 = syy <= 1e-24 * k ? 1.0 : (sxy * sxy) / (sxx * syy);
  return r;
}

ScalingResult fit_points(std::vector<ScalingPoint> points) {
  std::vector<std::pair<double, double>> xy;
  xy.reserve(points.size());
  for (const auto& p : points) xy.emplace_back(p.x, p.mean);
  auto r = fit_loglog(xy);
  r.points = std::move(points);
  return r;
}

ScalingPoint summarize(double x, std::span<const double> values) {
  ScalingPoint p;
  p.x = x;
  p.samples = values.size();
  if (values.empty()) return p;
  double sum = 0;
  for (double v : values) sum += v;
  p.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - p.mean) * (v - p.mean);
    const double var = ss / static_cast<double>(values.size() - 1);
    p.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
  }
  return p;
}

}  // namespace wlcap
