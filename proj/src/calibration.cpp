#include "dte/calibration.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "dte/error.hpp"

namespace dte {
namespace {

void check_inputs(const std::vector<RotationMatrix>& markers, const std::vector<RotationMatrix>& est) {
  if (markers.empty() || markers.size() != est.size()) {
    throw_invalid("calibration: marker and estimate orientation lists must be nonempty and equal length");
  }
}

class Search {
 public:
  Search(const std::vector<RotationMatrix>& markers, const std::vector<RotationMatrix>& est,
         const CalibrationOptions& options)
      : markers_(markers), options_(options), samples_(markers.size()) {
    est_t_.reserve(est.size());
    for (const RotationMatrix& R : est) est_t_.push_back(R.transpose());
  }

  // Evaluates a candidate R_mc; returns the optimal R_align and its cost.
  // Candidates that provably cannot beat `incumbent` are abandoned early.
  AveragingResult evaluate(const RotationMatrix& r_mc, const std::optional<RotationMatrix>& init,
                           double incumbent = std::numeric_limits<double>::infinity()) {
    AveragingOptions averaging = options_.averaging;
    if (options_.prune) averaging.abort_above = incumbent;
    return evaluate(r_mc, init, averaging);
  }

  AveragingResult evaluate(const RotationMatrix& r_mc, const std::optional<RotationMatrix>& init,
                           const AveragingOptions& averaging) {
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] = markers_[i] * r_mc * est_t_[i];
    return geodesic_l1_median(samples_, averaging, init);
  }

  void run_round(double theta_max_rad, Rng& rng, CalibrationResult& state, double& best_cost) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < options_.samples_per_round; ++s) {
      const double theta = unit(rng) * theta_max_rad;
      const Vec3 axis = random_unit_vector(rng);
      const RotationMatrix candidate = exp_map(theta * axis) * state.r_mc;
      const AveragingResult fit = evaluate(
          candidate, options_.warm_start ? std::optional<RotationMatrix>(state.r_align) : std::nullopt, best_cost);
      if (!fit.aborted && fit.cost < best_cost) {
        best_cost = fit.cost;
        state.r_mc = candidate;
        state.r_align = fit.rotation;
      }
      if (options_.record_history) state.best_cost_history.push_back(best_cost);
    }
    state.schedule_trace.push_back(best_cost);
  }

 private:
  const std::vector<RotationMatrix>& markers_;
  const CalibrationOptions& options_;
  std::vector<RotationMatrix> est_t_;
  std::vector<RotationMatrix> samples_;
};

CalibrationResult run_search(const std::vector<RotationMatrix>& markers, const std::vector<RotationMatrix>& est,
                             const RotationMatrix& seed, Rng& rng, const CalibrationOptions& options) {
  check_inputs(markers, est);
  if (options.samples_per_round < 1 || options.schedule_deg.empty()) {
    throw_invalid("calibration: empty search schedule");
  }

  CalibrationResult result;
  result.marker_degeneracy = degeneracy_check(markers, options.degeneracy_tol_rad);
  result.estimate_degeneracy = degeneracy_check(est, options.degeneracy_tol_rad);

  Search search(markers, est, options);
  // The seed itself is the initial incumbent.
  const AveragingResult initial = search.evaluate(seed, std::nullopt, options.averaging);
  result.r_mc = seed;
  result.r_align = initial.rotation;
  double best_cost = initial.cost;

  for (double theta_max_deg : options.schedule_deg) {
    search.run_round(deg2rad(theta_max_deg), rng, result, best_cost);
  }
  // Polish R_align for the winner at full precision.
  const AveragingResult polished = search.evaluate(result.r_mc, result.r_align, options.final_averaging);
  if (polished.cost <= best_cost) result.r_align = polished.rotation;
  result.final_cost = calibration_cost(result.r_mc, result.r_align, markers, est);
  return result;
}

}  // namespace

double calibration_cost(const RotationMatrix& r_mc, const RotationMatrix& r_align,
                        const std::vector<RotationMatrix>& markers, const std::vector<RotationMatrix>& est) {
  check_inputs(markers, est);
  double cost = 0.0;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    cost += geodesic_distance(markers[i] * r_mc * est[i].transpose(), r_align);
  }
  return cost;
}

CalibrationResult calibrate_camera_to_marker(const std::vector<RotationMatrix>& markers,
                                             const std::vector<RotationMatrix>& est, Rng& rng,
                                             const CalibrationOptions& options) {
  return run_search(markers, est, RotationMatrix::Identity(), rng, options);
}

CalibrationResult calibrate_from_ground_truth_seed(const std::vector<RotationMatrix>& markers,
                                                   const std::vector<RotationMatrix>& est,
                                                   const RotationMatrix& true_r_mc, Rng& rng,
                                                   CalibrationOptions options) {
  options.schedule_deg = {1.0};
  return run_search(markers, est, true_r_mc, rng, options);
}

DegeneracyReport degeneracy_check(const std::vector<RotationMatrix>& orientations, double tol_rad) {
  if (orientations.empty()) throw_invalid("degeneracy_check: no orientations");
  const Mat3 first_t = orientations.front().transpose();

  std::vector<Vec3> axes;
  for (std::size_t i = 1; i < orientations.size(); ++i) {
    const AxisAngle v = log_map(orientations[i] * first_t);
    const double angle = v.norm();
    if (angle > tol_rad) axes.push_back(v / angle);
  }

  DegeneracyReport report;
  if (axes.empty()) {
    report.degenerate = true;
    report.common_axis = Vec3::UnitZ();
    return report;
  }

  Mat3 scatter = Mat3::Zero();
  for (const Vec3& a : axes) scatter += a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  Vec3 axis = eig.eigenvectors().col(2).normalized();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(axis[i]) > 1e-12) {
      if (axis[i] < 0.0) axis = -axis;
      break;
    }
  }

  double deviation = 0.0;
  for (const Vec3& a : axes) {
    const double c = std::min(1.0, std::abs(a.dot(axis)));
    deviation = std::max(deviation, std::acos(c));
  }
  report.max_axis_deviation = deviation;
  report.degenerate = deviation <= tol_rad;
  if (report.degenerate) report.common_axis = axis;
  return report;
}

std::pair<RotationMatrix, RotationMatrix> gauge_update_gt_axis(const RotationMatrix& r_mc,
                                                               const RotationMatrix& r_align,
                                                               const RotationMatrix& r_gm_1,
                                                               const Vec3& axis, double a) {
  const RotationMatrix turn = exp_map(a * axis.normalized());
  return {r_gm_1.transpose() * turn * r_gm_1 * r_mc, turn * r_align};
}

std::pair<RotationMatrix, RotationMatrix> gauge_update_est_axis(const RotationMatrix& r_mc,
                                                                const RotationMatrix& r_align,
                                                                const RotationMatrix& r_ec_1,
                                                                const Vec3& axis, double a) {
  const RotationMatrix turn = exp_map(a * axis.normalized());
  return {r_mc * turn, r_align * r_ec_1 * turn * r_ec_1.transpose()};
}

}  // namespace dte
