#include "dte/so3.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "dte/error.hpp"

namespace dte {
namespace {

constexpr double kSmallAngle = 1e-7;
// Below this angle the antisymmetric part determines the axis; above it the
// symmetric part is better conditioned.
constexpr double kNearPi = kPi - 1e-3;

Vec3 vee_antisym(const Mat3& R) {
  return Vec3(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
}

}  // namespace

Mat3 hat(const Vec3& v) {
  Mat3 K;
  K << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return K;
}

RotationMatrix exp_map(const AxisAngle& v) {
  const double theta = v.norm();
  if (theta < kSmallAngle) {
    const Mat3 K = hat(v);
    return Mat3::Identity() + K + 0.5 * K * K;
  }
  const Mat3 K = hat(v / theta);
  return Mat3::Identity() + std::sin(theta) * K + (1.0 - std::cos(theta)) * K * K;
}

double rotation_angle(const RotationMatrix& R) {
  const double s = vee_antisym(R).norm();   // 2 sin(theta)
  const double c = R.trace() - 1.0;         // 2 cos(theta)
  return std::atan2(s, c);
}

AxisAngle log_map(const RotationMatrix& R) {
  const Vec3 w = vee_antisym(R);
  const double s = w.norm();
  const double c = R.trace() - 1.0;
  const double theta = std::atan2(s, c);

  if (theta < kSmallAngle) {
    return 0.5 * (1.0 + theta * theta / 6.0) * w;
  }
  if (theta < kNearPi) {
    return (theta / s) * w;
  }

  // (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) a a^T
  const Mat3 B = 0.5 * (R + R.transpose()) - 0.5 * c * Mat3::Identity();
  Eigen::Index j = 0;
  B.diagonal().maxCoeff(&j);
  Vec3 axis = B.col(j).normalized();
  if (s > 1e-10) {
    if (axis.dot(w) < 0.0) axis = -axis;
  } else {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis[i]) > 1e-12) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return theta * axis;
}

double geodesic_distance(const RotationMatrix& R1, const RotationMatrix& R2) {
  return rotation_angle(R1 * R2.transpose());
}

bool is_rotation(const Mat3& M, double tol) {
  if (!M.allFinite()) return false;
  const double ortho = (M * M.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(M.determinant() - 1.0) <= tol;
}

RotationMatrix random_uniform_rotation(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(normal(rng), normal(rng), normal(rng), normal(rng));
  } while (q.norm() < 1e-12);
  q.normalize();
  return q.toRotationMatrix();
}

Vec3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(normal(rng), normal(rng), normal(rng));
  } while (v.norm() < 1e-12);
  return v.normalized();
}

RotationMatrix perturb_rotation(const RotationMatrix& R, double sigma_deg, Rng& rng, RotationNoise model) {
  if (!(sigma_deg >= 0.0)) throw_invalid("perturb_rotation: sigma must be >= 0");
  // draws do not depend on sigma, so sigma = 0 consumes the same stream
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = deg2rad(sigma_deg);
  if (model == RotationNoise::kAxisAngle) {
    const double angle = sigma * normal(rng);
    return exp_map(angle * random_unit_vector(rng)) * R;
  }
  const double x = sigma * normal(rng);
  const double y = sigma * normal(rng);
  const double z = sigma * normal(rng);
  return exp_map(Vec3(x, y, z)) * R;
}

RotationMatrix project_to_rotation(const Mat3& M) {
  if (!M.allFinite()) throw_invalid("project_to_rotation: non-finite matrix");
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv(2) > 1e-12 * sv(0))) {
    throw_degenerate("project_to_rotation: matrix is singular");
  }
  const Mat3& U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  Mat3 D = Mat3::Identity();
  D(2, 2) = (U * V.transpose()).determinant() > 0.0 ? 1.0 : -1.0;
  return U * D * V.transpose();
}

RotationMatrix quaternion_to_rotation(double qx, double qy, double qz, double qw) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw_invalid("quaternion has zero or non-finite norm");
  q.coeffs() /= n;
  return q.toRotationMatrix();
}

Eigen::Vector4d rotation_to_quaternion(const RotationMatrix& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return Eigen::Vector4d(q.x(), q.y(), q.z(), q.w());
}

}  // namespace dte
