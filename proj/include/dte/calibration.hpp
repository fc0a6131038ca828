#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dte/rotation_averaging.hpp"

namespace dte {

struct DegeneracyReport {
  bool degenerate = false;
  /// Shared rotation axis of the relative rotations (sign-normalized). For the
  /// fixed-orientation case every axis is a gauge direction and +z is reported.
  std::optional<Vec3> common_axis;
  /// Largest angle between an individual relative-rotation axis and
  /// common_axis, folded to [0, pi/2] (radians).
  double max_axis_deviation = 0.0;
};

/// Degenerate iff the relative rotations R_i R_1^T with angle > tol all share
/// one axis (up to sign) within tol; vacuously degenerate when no relative
/// rotation exceeds tol.
DegeneracyReport degeneracy_check(const std::vector<RotationMatrix>& orientations,
                                  double tol_rad = deg2rad(0.5));

struct CalibrationOptions {
  /// Search-ball radii for the successive rounds (degrees).
  std::vector<double> schedule_deg = {360.0, 30.0, 10.0, 3.0, 1.0};
  int samples_per_round = 1000;
  /// Inner L1 averaging while comparing candidates.
  AveragingOptions averaging{.tol = 1e-6};
  /// Final R_align for the winning R_mc.
  AveragingOptions final_averaging;
  /// Start each inner L1 averaging from the incumbent R_align instead of the
  /// chordal mean of the candidate's samples.
  bool warm_start = true;
  /// Abandon a candidate once a lower bound on its cost reaches the incumbent
  /// cost. Never changes which candidates are accepted.
  bool prune = true;
  double degeneracy_tol_rad = deg2rad(0.5);
  bool record_history = true;
};

struct CalibrationResult {
  RotationMatrix r_mc = RotationMatrix::Identity();     // camera-to-marker rotation
  RotationMatrix r_align = RotationMatrix::Identity();  // estimate-to-gt world rotation
  double final_cost = 0.0;                               // sum of geodesic distances (rad)
  std::vector<double> schedule_trace;                    // best cost after each round
  std::vector<double> best_cost_history;                 // best cost after every sample
  DegeneracyReport marker_degeneracy;
  DegeneracyReport estimate_degeneracy;

  bool degenerate() const { return marker_degeneracy.degenerate || estimate_degeneracy.degenerate; }
};

/// sum_i d(R_gm,i R_mc R_ec,i^T, R_align)
double calibration_cost(const RotationMatrix& r_mc, const RotationMatrix& r_align,
                        const std::vector<RotationMatrix>& markers, const std::vector<RotationMatrix>& est);

/// Annealed random search over R_mc: each round draws `samples_per_round`
/// candidates Exp(k theta_max v) R_est around the incumbent, solves for R_align
/// by the geodesic L1 median, and keeps strict improvements.
CalibrationResult calibrate_camera_to_marker(const std::vector<RotationMatrix>& markers,
                                             const std::vector<RotationMatrix>& est, Rng& rng,
                                             const CalibrationOptions& options = {});

/// One 1-degree refinement round started at a known rotation.
CalibrationResult calibrate_from_ground_truth_seed(const std::vector<RotationMatrix>& markers,
                                                   const std::vector<RotationMatrix>& est,
                                                   const RotationMatrix& true_r_mc, Rng& rng,
                                                   CalibrationOptions options = {});

/// Gauge move for marker orientations related by rotations about `axis`:
///   R_mc <- R_gm1^T Exp(a axis) R_gm1 R_mc,   R_align <- Exp(a axis) R_align.
std::pair<RotationMatrix, RotationMatrix> gauge_update_gt_axis(const RotationMatrix& r_mc,
                                                               const RotationMatrix& r_align,
                                                               const RotationMatrix& r_gm_1,
                                                               const Vec3& axis, double a);

/// Gauge move for estimated orientations R_ec,i = R_ec1 Exp(theta_i axis):
///   R_mc <- R_mc Exp(a axis),   R_align <- R_align R_ec1 Exp(a axis) R_ec1^T.
std::pair<RotationMatrix, RotationMatrix> gauge_update_est_axis(const RotationMatrix& r_mc,
                                                                const RotationMatrix& r_align,
                                                                const RotationMatrix& r_ec_1,
                                                                const Vec3& axis, double a);

}  // namespace dte
