#include "dte/rotation_averaging.hpp"

#include <algorithm>
#include <cmath>

#include "dte/error.hpp"

namespace dte {
namespace {

enum class Norm { kL1, kL2 };

// Tangent vectors Log(R_i R^T) and the objective at R.
double tangent_vectors(std::span<const RotationMatrix> samples, const RotationMatrix& R, Norm norm,
                       std::vector<Vec3>& out) {
  out.resize(samples.size());
  const Mat3 Rt = R.transpose();
  double cost = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[i] = log_map(samples[i] * Rt);
    const double d = out[i].norm();
    cost += norm == Norm::kL1 ? d : d * d;
  }
  return cost;
}

// sum_i |d_i - median(d)| <= min_X sum_i d(S_i, X)
double l1_lower_bound(const std::vector<Vec3>& tangents, std::vector<double>& scratch) {
  scratch.resize(tangents.size());
  for (std::size_t i = 0; i < tangents.size(); ++i) scratch[i] = tangents[i].norm();
  const auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(scratch.size() / 2);
  std::nth_element(scratch.begin(), mid, scratch.end());
  const double med = *mid;
  double bound = 0.0;
  for (double d : scratch) bound += std::abs(d - med);
  return bound;
}

AveragingResult average(std::span<const RotationMatrix> samples, const AveragingOptions& options,
                        const std::optional<RotationMatrix>& init, Norm norm) {
  if (samples.empty()) throw_invalid("rotation averaging: no samples");

  AveragingResult result;
  RotationMatrix R = init ? *init : chordal_initializer(samples);
  std::vector<Vec3> tangents;
  std::vector<Vec3> trial_tangents;
  double cost = tangent_vectors(samples, R, norm, tangents);
  const bool may_abort = norm == Norm::kL1 && options.abort_above < std::numeric_limits<double>::infinity();
  std::vector<double> scratch;

  for (int it = 1; it <= options.max_iter; ++it) {
    if (may_abort && l1_lower_bound(tangents, scratch) >= options.abort_above) {
      result.aborted = true;
      break;
    }
    Vec3 delta = Vec3::Zero();
    if (norm == Norm::kL1) {
      double weight_sum = 0.0;
      for (const Vec3& v : tangents) {
        const double w = 1.0 / std::max(v.norm(), options.epsilon);
        delta += w * v;
        weight_sum += w;
      }
      delta /= weight_sum;
    } else {
      for (const Vec3& v : tangents) delta += v;
      delta /= static_cast<double>(tangents.size());
    }
    result.iterations = it;

    bool accepted = false;
    while (delta.norm() > options.tol) {
      const RotationMatrix candidate = exp_map(delta) * R;
      const double candidate_cost = tangent_vectors(samples, candidate, norm, trial_tangents);
      if (candidate_cost <= cost) {
        R = candidate;
        cost = candidate_cost;
        tangents.swap(trial_tangents);
        accepted = true;
        break;
      }
      delta *= 0.5;
    }
    if (!accepted) {
      result.converged = true;
      break;
    }
    if (options.record_trace) result.cost_trace.push_back(cost);
  }

  result.rotation = R;
  result.cost = cost;
  return result;
}

}  // namespace

AveragingResult geodesic_l1_median(std::span<const RotationMatrix> samples,
                                   const AveragingOptions& options,
                                   const std::optional<RotationMatrix>& init) {
  return average(samples, options, init, Norm::kL1);
}

AveragingResult geodesic_l2_mean(std::span<const RotationMatrix> samples,
                                 const AveragingOptions& options,
                                 const std::optional<RotationMatrix>& init) {
  return average(samples, options, init, Norm::kL2);
}

RotationMatrix chordal_initializer(std::span<const RotationMatrix> samples) {
  if (samples.empty()) throw_invalid("chordal_initializer: no samples");
  Mat3 sum = Mat3::Zero();
  for (const RotationMatrix& R : samples) sum += R;
  try {
    return project_to_rotation(sum / static_cast<double>(samples.size()));
  } catch (const Error&) {
    return samples.front();
  }
}

double l1_rotation_cost(std::span<const RotationMatrix> samples, const RotationMatrix& R) {
  double cost = 0.0;
  for (const RotationMatrix& S : samples) cost += geodesic_distance(S, R);
  return cost;
}

double l2_rotation_cost(std::span<const RotationMatrix> samples, const RotationMatrix& R) {
  double cost = 0.0;
  for (const RotationMatrix& S : samples) {
    const double d = geodesic_distance(S, R);
    cost += d * d;
  }
  return cost;
}

}  // namespace dte
