#pragma once

#include <optional>
#include <vector>

#include "dte/so3.hpp"

namespace dte {

/// Ordered, corresponding camera poses: positions t_c and orientations R_c in
/// some world frame. Orientations may be left empty for position-only data.
struct PoseSequence {
  std::vector<Vec3> positions;
  std::vector<RotationMatrix> orientations;
  std::optional<std::vector<double>> timestamps;

  std::size_t size() const { return positions.size(); }
  bool has_orientations() const { return !orientations.empty(); }

  /// Throws dte::Error when lengths disagree, timestamps are not strictly
  /// increasing, or a rotation is invalid.
  void validate() const;
};

/// Marker-body poses measured in the ground-truth world frame.
struct MarkerSequence {
  std::vector<Vec3> marker_positions;
  std::vector<RotationMatrix> marker_orientations;
  std::optional<std::vector<double>> timestamps;

  std::size_t size() const { return marker_positions.size(); }
  void validate() const;
};

/// Camera frame expressed in the marker frame (s_mc is fixed to 1).
struct MarkerExtrinsics {
  RotationMatrix rotation = RotationMatrix::Identity();
  Vec3 translation = Vec3::Zero();
};

/// x -> scale * rotation * x + translation
struct Sim3Transform {
  double scale = 1.0;
  RotationMatrix rotation = RotationMatrix::Identity();
  Vec3 translation = Vec3::Zero();

  static Sim3Transform identity() { return {}; }

  Vec3 apply(const Vec3& x) const { return scale * (rotation * x) + translation; }
  Sim3Transform inverse() const;

  void validate() const;

  bool operator==(const Sim3Transform&) const = default;
};

/// outer ∘ inner: `inner` is applied first.
Sim3Transform compose(const Sim3Transform& outer, const Sim3Transform& inner);

/// Positions s R t + t0, orientations R R_i. Timestamps copied.
PoseSequence apply_sim3(const Sim3Transform& T, const PoseSequence& seq);

/// t_gc = R_gm t_mc + t_gm and R_gc = R_gm R_mc per pose.
PoseSequence markers_to_camera_ground_truth(const MarkerSequence& markers,
                                            const MarkerExtrinsics& extrinsics);

/// Selects the given indices (in order) from every channel of seq.
PoseSequence subset(const PoseSequence& seq, const std::vector<std::size_t>& indices);

}  // namespace dte
