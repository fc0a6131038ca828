#pragma once

#include <optional>
#include <vector>

#include "dte/alignment.hpp"

namespace dte {

struct DteParams {
  double k = 5.0;      // winsorization threshold in units of the gt MAD
  double alpha = 0.5;  // weight of the RMS term; 1 - alpha goes to the mean

  void validate() const;
};

/// (1 - alpha) * mean_err + alpha * rms_err
double weighted_blend(double mean_err, double rms_err, double alpha);

struct AteResult {
  double ate = 0.0;
  Sim3Transform alignment;
  std::vector<double> distances;
};

/// Minimum RMS position error over SIM(3) (or SE(3) when !with_scale).
AteResult compute_ate_ex(const PoseSequence& gt, const PoseSequence& est, bool with_scale = true);
double compute_ate(const PoseSequence& gt, const PoseSequence& est, bool with_scale = true);

struct DteResult {
  double dte = 0.0;
  double dte_mean = 0.0;
  double dte_rms = 0.0;
  double threshold = 0.0;           // u = k * gt MAD
  RobustAlignment alignment;
  std::vector<double> distances;    // d_i after alignment
  std::vector<double> normalized;   // min(d_i, u) / u
};

/// Discernible trajectory error in [0, 1].
DteResult compute_dte_ex(const PoseSequence& gt, const PoseSequence& est, const DteParams& params = {},
                         bool fix_scale = false);
double compute_dte(const PoseSequence& gt, const PoseSequence& est, const DteParams& params = {});

/// Per-pose geodesic errors d(gt_i, R_align est_i), in degrees.
std::vector<double> aligned_rotation_errors_deg(const std::vector<RotationMatrix>& gt,
                                                const std::vector<RotationMatrix>& est,
                                                const RotationMatrix& align);

/// Discernible rotation error in degrees: blend of mean and RMS of the
/// per-pose errors after L1 geodesic-median alignment. No winsorization.
double compute_dre(const std::vector<RotationMatrix>& gt, const std::vector<RotationMatrix>& est,
                   double alpha = 0.5);

struct RotationErrorTable {
  double median1 = 0.0, mean1 = 0.0, rms1 = 0.0;  // after L1 alignment, degrees
  double median2 = 0.0, mean2 = 0.0, rms2 = 0.0;  // after L2 alignment, degrees

  bool operator==(const RotationErrorTable&) const = default;
};

RotationErrorTable rotation_error_table(const std::vector<RotationMatrix>& gt,
                                        const std::vector<RotationMatrix>& est);

/// Same table with a precomputed L1 alignment rotation.
RotationErrorTable rotation_error_table(const std::vector<RotationMatrix>& gt,
                                        const std::vector<RotationMatrix>& est,
                                        const RotationMatrix& l1_align);

struct PoseTrace {
  std::vector<double> ate_distances;
  std::vector<double> dte_distances;
  std::vector<double> dte_normalized;
  std::vector<double> rotation_errors_deg;

  bool operator==(const PoseTrace&) const = default;
};

struct MetricReport {
  std::size_t n_poses = 0;
  double ate = 0.0;
  double dte = 0.0;
  double dte_mean = 0.0;
  double dte_rms = 0.0;
  double dre_deg = 0.0;
  double k = 5.0;
  double alpha = 0.5;
  RotationErrorTable rotation_table;
  Sim3Transform ate_alignment;
  Sim3Transform dte_alignment;
  std::optional<PoseTrace> trace;

  bool operator==(const MetricReport&) const = default;
};

struct EvaluationOptions {
  DteParams params;
  bool with_scale = true;
  bool per_pose = false;
};

/// ATE, DTE, DRE and the rotation table for corresponding sequences.
MetricReport evaluate(const PoseSequence& gt, const PoseSequence& est, const EvaluationOptions& options = {});

}  // namespace dte
