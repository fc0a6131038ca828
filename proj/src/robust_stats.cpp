#include "dte/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dte/error.hpp"

namespace dte {

double median(std::span<const double> values) {
  if (values.empty()) throw_invalid("median of an empty list");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw_invalid("quantile of an empty list");
  if (!(q >= 0.0 && q <= 1.0)) throw_invalid("quantile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw_invalid("mean of an empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double rms(std::span<const double> values) {
  if (values.empty()) throw_invalid("rms of an empty list");
  double sq = 0.0;
  for (double x : values) sq += x * x;
  return std::sqrt(sq / static_cast<double>(values.size()));
}

double geometric_median_cost(std::span<const Vec3> points, const Vec3& x) {
  double cost = 0.0;
  for (const Vec3& p : points) cost += (p - x).norm();
  return cost;
}

GeometricMedianResult geometric_median_ex(std::span<const Vec3> points,
                                          const GeometricMedianOptions& options) {
  if (points.empty()) throw_invalid("geometric_median: empty point cloud");

  Vec3 lo = points.front();
  Vec3 hi = points.front();
  for (const Vec3& p : points) {
    if (!p.allFinite()) throw_invalid("geometric_median: non-finite point");
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }

  GeometricMedianResult result;
  const double diameter = (hi - lo).norm();
  if (points.size() == 1 || diameter == 0.0) {
    result.point = points.front();
    result.converged = true;
    return result;
  }

  Vec3 start;
  std::vector<double> coord(points.size());
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < points.size(); ++i) coord[i] = points[i][k];
    start[k] = median(coord);
  }
  double spread = mad_about_point(points, start);
  if (spread == 0.0) spread = diameter;
  const double tol = options.tol > 0.0 ? options.tol : 1e-10 * spread;
  const double coincide = 1e-12 * spread;

  Vec3 y = start;
  for (int it = 1; it <= options.max_iter; ++it) {
    Vec3 weighted_sum = Vec3::Zero();
    Vec3 residual = Vec3::Zero();  // sum_i (p_i - y) / |p_i - y|
    double weight_sum = 0.0;
    int coincident = 0;
    for (const Vec3& p : points) {
      const Vec3 diff = p - y;
      const double dist = diff.norm();
      if (dist <= coincide) {
        ++coincident;
        continue;
      }
      const double w = 1.0 / dist;
      weighted_sum += w * p;
      residual += w * diff;
      weight_sum += w;
    }

    Vec3 next;
    if (weight_sum == 0.0) {
      next = y;
    } else if (coincident == 0) {
      next = weighted_sum / weight_sum;
    } else {
      // Vardi-Zhang: y is optimal when the pull of the other points does not
      // exceed the multiplicity of the data point it sits on.
      const double r = residual.norm();
      if (r <= static_cast<double>(coincident)) {
        next = y;
      } else {
        const double gamma = static_cast<double>(coincident) / r;
        next = (1.0 - gamma) * (weighted_sum / weight_sum) + gamma * y;
      }
    }

    const double step = (next - y).norm();
    y = next;
    result.iterations = it;
    if (step <= tol) {
      result.converged = true;
      break;
    }
  }
  result.point = y;
  return result;
}

Vec3 geometric_median(std::span<const Vec3> points, const GeometricMedianOptions& options) {
  return geometric_median_ex(points, options).point;
}

double mad_about_point(std::span<const Vec3> points, const Vec3& center) {
  if (points.empty()) throw_invalid("mad_about_point: empty point cloud");
  std::vector<double> dist;
  dist.reserve(points.size());
  for (const Vec3& p : points) dist.push_back((p - center).norm());
  return median(dist);
}

}  // namespace dte
