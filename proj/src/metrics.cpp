#include "dte/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "dte/error.hpp"
#include "dte/robust_stats.hpp"

namespace dte {

void DteParams::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw_invalid("DTE parameter k must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw_invalid("DTE parameter alpha must lie in [0, 1]");
}

double weighted_blend(double mean_err, double rms_err, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw_invalid("blend weight alpha must lie in [0, 1]");
  return (1.0 - alpha) * mean_err + alpha * rms_err;
}

AteResult compute_ate_ex(const PoseSequence& gt, const PoseSequence& est, bool with_scale) {
  AteResult out;
  out.alignment = align_horn_arun(gt, est, with_scale);
  out.distances.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    out.distances.push_back((gt.positions[i] - out.alignment.apply(est.positions[i])).norm());
  }
  out.ate = rms(out.distances);
  return out;
}

double compute_ate(const PoseSequence& gt, const PoseSequence& est, bool with_scale) {
  return compute_ate_ex(gt, est, with_scale).ate;
}

DteResult compute_dte_ex(const PoseSequence& gt, const PoseSequence& est, const DteParams& params,
                         bool fix_scale) {
  params.validate();
  DteResult out;
  out.alignment = align_dte(gt, est, fix_scale);
  out.threshold = params.k * out.alignment.gt_mad;
  if (!(out.threshold > 0.0)) throw_degenerate("degenerate ground-truth scale");

  const Sim3Transform& T = out.alignment.transform;
  const std::size_t n = gt.size();
  out.distances.reserve(n);
  out.normalized.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (gt.positions[i] - T.apply(est.positions[i])).norm();
    out.distances.push_back(d);
    out.normalized.push_back(std::min(d, out.threshold) / out.threshold);
  }
  out.dte_mean = mean(out.normalized);
  out.dte_rms = rms(out.normalized);
  out.dte = weighted_blend(out.dte_mean, out.dte_rms, params.alpha);
  return out;
}

double compute_dte(const PoseSequence& gt, const PoseSequence& est, const DteParams& params) {
  return compute_dte_ex(gt, est, params).dte;
}

std::vector<double> aligned_rotation_errors_deg(const std::vector<RotationMatrix>& gt,
                                                const std::vector<RotationMatrix>& est,
                                                const RotationMatrix& align) {
  if (gt.empty() || gt.size() != est.size()) {
    throw_invalid("rotation errors: orientation lists must be nonempty and of equal length");
  }
  std::vector<double> errors;
  errors.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    errors.push_back(rad2deg(geodesic_distance(gt[i], align * est[i])));
  }
  return errors;
}

double compute_dre(const std::vector<RotationMatrix>& gt, const std::vector<RotationMatrix>& est,
                   double alpha) {
  if (gt.empty() || gt.size() != est.size()) {
    throw_invalid("compute_dre: orientation lists must be nonempty and of equal length");
  }
  const RotationMatrix align = geodesic_l1_median(relative_orientations(gt, est)).rotation;
  const std::vector<double> errors = aligned_rotation_errors_deg(gt, est, align);
  return weighted_blend(mean(errors), rms(errors), alpha);
}

RotationErrorTable rotation_error_table(const std::vector<RotationMatrix>& gt,
                                        const std::vector<RotationMatrix>& est,
                                        const RotationMatrix& l1_align) {
  const std::vector<RotationMatrix> rel = relative_orientations(gt, est);
  const RotationMatrix l2_align = geodesic_l2_mean(rel, {}, l1_align).rotation;

  RotationErrorTable table;
  const std::vector<double> e1 = aligned_rotation_errors_deg(gt, est, l1_align);
  table.median1 = median(e1);
  table.mean1 = mean(e1);
  table.rms1 = rms(e1);
  const std::vector<double> e2 = aligned_rotation_errors_deg(gt, est, l2_align);
  table.median2 = median(e2);
  table.mean2 = mean(e2);
  table.rms2 = rms(e2);
  return table;
}

RotationErrorTable rotation_error_table(const std::vector<RotationMatrix>& gt,
                                        const std::vector<RotationMatrix>& est) {
  if (gt.empty() || gt.size() != est.size()) {
    throw_invalid("rotation_error_table: orientation lists must be nonempty and of equal length");
  }
  return rotation_error_table(gt, est, geodesic_l1_median(relative_orientations(gt, est)).rotation);
}

MetricReport evaluate(const PoseSequence& gt, const PoseSequence& est, const EvaluationOptions& options) {
  options.params.validate();
  const AteResult ate = compute_ate_ex(gt, est, options.with_scale);
  const DteResult dte = compute_dte_ex(gt, est, options.params, !options.with_scale);
  const RotationMatrix& align = dte.alignment.transform.rotation;
  const std::vector<double> rot_errors = aligned_rotation_errors_deg(gt.orientations, est.orientations, align);

  MetricReport report;
  report.n_poses = gt.size();
  report.ate = ate.ate;
  report.dte = dte.dte;
  report.dte_mean = dte.dte_mean;
  report.dte_rms = dte.dte_rms;
  report.dre_deg = weighted_blend(mean(rot_errors), rms(rot_errors), options.params.alpha);
  report.k = options.params.k;
  report.alpha = options.params.alpha;
  report.rotation_table = rotation_error_table(gt.orientations, est.orientations, align);
  report.ate_alignment = ate.alignment;
  report.dte_alignment = dte.alignment.transform;
  if (options.per_pose) {
    report.trace = PoseTrace{ate.distances, dte.distances, dte.normalized, rot_errors};
  }
  return report;
}

}  // namespace dte
