#pragma once

#include <random>

#include <Eigen/Core>

namespace dte {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// A 3x3 orthonormal matrix with determinant +1. Used both as a point
/// transform (x_i = R_ij x_j) and as the orientation of frame j seen from i.
using RotationMatrix = Eigen::Matrix3d;

/// Rotation vector theta * axis (radians).
using AxisAngle = Eigen::Vector3d;

using Rng = std::mt19937_64;

constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

Mat3 hat(const Vec3& v);

/// Rodrigues' formula.
RotationMatrix exp_map(const AxisAngle& v);

/// Inverse of exp_map with angle in [0, pi]. At exactly pi the axis sign is
/// chosen so that its first nonzero component is positive.
AxisAngle log_map(const RotationMatrix& R);

/// Rotation angle in [0, pi].
double rotation_angle(const RotationMatrix& R);

/// d(R1, R2) = angle(R1 * R2^T), radians.
double geodesic_distance(const RotationMatrix& R1, const RotationMatrix& R2);

bool is_rotation(const Mat3& M, double tol = 1e-9);

/// Haar-uniform sample (normalized 4D Gaussian quaternion).
RotationMatrix random_uniform_rotation(Rng& rng);

/// Uniform on the unit sphere.
Vec3 random_unit_vector(Rng& rng);

enum class RotationNoise {
  /// n = a * axis with a ~ N(0, sigma^2) and axis uniform on the sphere;
  /// the perturbation angle |a| has RMS sigma.
  kAxisAngle,
  /// n ~ N(0, sigma^2 I) componentwise; the angle has RMS sigma * sqrt(3).
  kTangentComponents,
};

/// Left perturbation Exp(n) * R, sigma in degrees.
RotationMatrix perturb_rotation(const RotationMatrix& R, double sigma_deg, Rng& rng,
                                RotationNoise model = RotationNoise::kAxisAngle);

/// Nearest rotation in Frobenius norm. Throws dte::Error (kDegenerate) when
/// M is singular.
RotationMatrix project_to_rotation(const Mat3& M);

/// Hamilton quaternion (x, y, z, w) <-> rotation matrix.
RotationMatrix quaternion_to_rotation(double qx, double qy, double qz, double qw);
Eigen::Vector4d rotation_to_quaternion(const RotationMatrix& R);

}  // namespace dte
