#pragma once

#include "dte/rotation_averaging.hpp"
#include "dte/trajectory.hpp"

namespace dte {

/// Closed-form least-squares SIM(3) (Horn / Arun) mapping est positions onto
/// gt positions. With `with_scale == false` the scale is fixed to 1.
/// Requires n >= 3 and both centered point sets of rank >= 2.
Sim3Transform align_horn_arun(const PoseSequence& gt, const PoseSequence& est, bool with_scale = true);

struct RobustAlignment {
  Sim3Transform transform;
  Vec3 gt_median = Vec3::Zero();   // geometric median of gt positions
  Vec3 est_median = Vec3::Zero();  // geometric median of est positions
  double gt_mad = 0.0;             // median distance of gt positions to gt_median
  double est_mad = 0.0;
  AveragingResult rotation;        // L1 median of R_gc,i R_ec,i^T
};

/// Median-based alignment: translation from geometric medians, rotation from
/// the geodesic L1 median of relative orientations, scale from the ratio of
/// MADs about the geometric medians. Orientations are required; positions
/// never influence the rotation.
RobustAlignment align_dte(const PoseSequence& gt, const PoseSequence& est, bool fix_scale = false,
                          const AveragingOptions& averaging = {});

/// Relative orientations R_gc,i R_ec,i^T.
std::vector<RotationMatrix> relative_orientations(const std::vector<RotationMatrix>& gt,
                                                  const std::vector<RotationMatrix>& est);

}  // namespace dte
