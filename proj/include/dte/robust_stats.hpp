#pragma once

#include <span>
#include <vector>

#include "dte/so3.hpp"

namespace dte {

using PointCloud = std::vector<Vec3>;

/// Median with the midpoint convention for even sizes. Throws on empty input.
double median(std::span<const double> values);

/// Linearly interpolated empirical quantile at position q * (n - 1).
double quantile(std::span<const double> values, double q);

double mean(std::span<const double> values);
double rms(std::span<const double> values);

struct GeometricMedianOptions {
  /// Stop when the Weiszfeld displacement falls below this. A value <= 0
  /// selects 1e-10 times the median distance of the points to their
  /// coordinate-wise median (the bounding-box diagonal if that is zero), so a
  /// few distant outliers do not loosen it.
  double tol = 0.0;
  int max_iter = 10000;
};

struct GeometricMedianResult {
  Vec3 point = Vec3::Zero();
  int iterations = 0;
  bool converged = false;
};

/// Minimizer of sum_i |p_i - x| by Weiszfeld iteration with the Vardi-Zhang
/// modification for iterates landing on a data point. Starts at the
/// coordinate-wise median.
GeometricMedianResult geometric_median_ex(std::span<const Vec3> points,
                                          const GeometricMedianOptions& options = {});

Vec3 geometric_median(std::span<const Vec3> points, const GeometricMedianOptions& options = {});

/// Sum of Euclidean distances from x to every point.
double geometric_median_cost(std::span<const Vec3> points, const Vec3& x);

/// Median of |p_i - center|.
double mad_about_point(std::span<const Vec3> points, const Vec3& center);

}  // namespace dte
