#include "dte/alignment.hpp"

#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "dte/error.hpp"
#include "dte/robust_stats.hpp"

namespace dte {
namespace {

void check_pair(const PoseSequence& gt, const PoseSequence& est, const char* who) {
  gt.validate();
  est.validate();
  if (gt.size() != est.size()) {
    throw_invalid(std::string(who) + ": ground truth has " + std::to_string(gt.size()) +
                  " poses but estimate has " + std::to_string(est.size()));
  }
}

bool rank_deficient(const Eigen::Matrix3Xd& centered) {
  Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(centered);
  const Vec3 sv = svd.singularValues();
  return !(sv(0) > 0.0) || sv(1) <= 1e-12 * sv(0);
}

}  // namespace

Sim3Transform align_horn_arun(const PoseSequence& gt, const PoseSequence& est, bool with_scale) {
  check_pair(gt, est, "align_horn_arun");
  const std::size_t n = gt.size();
  if (n < 3) throw_invalid("align_horn_arun: at least 3 poses are required, got " + std::to_string(n));

  Vec3 gt_centroid = Vec3::Zero();
  Vec3 est_centroid = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    gt_centroid += gt.positions[i];
    est_centroid += est.positions[i];
  }
  gt_centroid /= static_cast<double>(n);
  est_centroid /= static_cast<double>(n);

  Eigen::Matrix3Xd G(3, n);
  Eigen::Matrix3Xd E(3, n);
  for (std::size_t i = 0; i < n; ++i) {
    G.col(static_cast<Eigen::Index>(i)) = gt.positions[i] - gt_centroid;
    E.col(static_cast<Eigen::Index>(i)) = est.positions[i] - est_centroid;
  }
  if (rank_deficient(E)) {
    throw_degenerate("align_horn_arun: degenerate estimate, positions are collinear or coincident (rank < 2)");
  }
  if (rank_deficient(G)) {
    throw_degenerate("align_horn_arun: degenerate ground truth, positions are collinear or coincident (rank < 2)");
  }

  Eigen::JacobiSVD<Mat3> svd(E * G.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  Mat3 D = Mat3::Identity();
  D(2, 2) = (V * U.transpose()).determinant() >= 0.0 ? 1.0 : -1.0;

  Sim3Transform T;
  T.rotation = V * D * U.transpose();
  if (with_scale) {
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < G.cols(); ++i) {
      num += G.col(i).dot(T.rotation * E.col(i));
      den += E.col(i).squaredNorm();
    }
    T.scale = num / den;
  }
  T.translation = gt_centroid - T.scale * (T.rotation * est_centroid);
  return T;
}

std::vector<RotationMatrix> relative_orientations(const std::vector<RotationMatrix>& gt,
                                                  const std::vector<RotationMatrix>& est) {
  if (gt.size() != est.size()) throw_invalid("relative_orientations: length mismatch");
  std::vector<RotationMatrix> rel;
  rel.reserve(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) rel.push_back(gt[i] * est[i].transpose());
  return rel;
}

RobustAlignment align_dte(const PoseSequence& gt, const PoseSequence& est, bool fix_scale,
                          const AveragingOptions& averaging) {
  check_pair(gt, est, "align_dte");
  if (!gt.has_orientations() || !est.has_orientations()) {
    throw_invalid("align_dte: orientations are required for both trajectories");
  }

  RobustAlignment out;
  out.gt_median = geometric_median(gt.positions);
  out.est_median = geometric_median(est.positions);
  out.gt_mad = mad_about_point(gt.positions, out.gt_median);
  out.est_mad = mad_about_point(est.positions, out.est_median);

  out.rotation = geodesic_l1_median(relative_orientations(gt.orientations, est.orientations), averaging);

  Sim3Transform& T = out.transform;
  T.rotation = out.rotation.rotation;
  if (!fix_scale) {
    if (!(out.est_mad > 0.0)) throw_degenerate("degenerate estimate scale");
    if (!(out.gt_mad > 0.0)) throw_degenerate("degenerate ground-truth scale");
    T.scale = out.gt_mad / out.est_mad;
  }
  T.translation = out.gt_median - T.scale * (T.rotation * out.est_median);
  return out;
}

}  // namespace dte
