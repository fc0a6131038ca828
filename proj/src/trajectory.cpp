#include "dte/trajectory.hpp"

#include <cmath>
#include <string>

#include "dte/error.hpp"

namespace dte {
namespace {

void check_timestamps(const std::optional<std::vector<double>>& timestamps, std::size_t n,
                      const char* what) {
  if (!timestamps) return;
  if (timestamps->size() != n) {
    throw_invalid(std::string(what) + ": timestamp count does not match pose count");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!((*timestamps)[i] > (*timestamps)[i - 1])) {
      throw_invalid(std::string(what) + ": timestamps must be strictly increasing (index " +
                    std::to_string(i) + ")");
    }
  }
}

}  // namespace

void PoseSequence::validate() const {
  if (positions.empty()) throw_invalid("pose sequence is empty");
  if (!orientations.empty() && orientations.size() != positions.size()) {
    throw_invalid("pose sequence: " + std::to_string(positions.size()) + " positions but " +
                  std::to_string(orientations.size()) + " orientations");
  }
  for (const Vec3& p : positions) {
    if (!p.allFinite()) throw_invalid("pose sequence: non-finite position");
  }
  for (const RotationMatrix& R : orientations) {
    if (!is_rotation(R, 1e-6)) throw_invalid("pose sequence: invalid rotation matrix");
  }
  check_timestamps(timestamps, positions.size(), "pose sequence");
}

void MarkerSequence::validate() const {
  if (marker_positions.empty()) throw_invalid("marker sequence is empty");
  if (marker_orientations.size() != marker_positions.size()) {
    throw_invalid("marker sequence: positions and orientations differ in length");
  }
  for (const RotationMatrix& R : marker_orientations) {
    if (!is_rotation(R, 1e-6)) throw_invalid("marker sequence: invalid rotation matrix");
  }
  check_timestamps(timestamps, marker_positions.size(), "marker sequence");
}

Sim3Transform Sim3Transform::inverse() const {
  Sim3Transform inv;
  inv.scale = 1.0 / scale;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.scale * (inv.rotation * translation));
  return inv;
}

void Sim3Transform::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw_invalid("sim3: scale must be positive and finite");
  if (!is_rotation(rotation, 1e-6)) throw_invalid("sim3: invalid rotation");
  if (!translation.allFinite()) throw_invalid("sim3: non-finite translation");
}

Sim3Transform compose(const Sim3Transform& outer, const Sim3Transform& inner) {
  Sim3Transform out;
  out.scale = outer.scale * inner.scale;
  out.rotation = outer.rotation * inner.rotation;
  out.translation = outer.scale * (outer.rotation * inner.translation) + outer.translation;
  return out;
}

PoseSequence apply_sim3(const Sim3Transform& T, const PoseSequence& seq) {
  PoseSequence out;
  out.positions.reserve(seq.positions.size());
  for (const Vec3& p : seq.positions) out.positions.push_back(T.apply(p));
  out.orientations.reserve(seq.orientations.size());
  for (const RotationMatrix& R : seq.orientations) out.orientations.push_back(T.rotation * R);
  out.timestamps = seq.timestamps;
  return out;
}

PoseSequence markers_to_camera_ground_truth(const MarkerSequence& markers,
                                            const MarkerExtrinsics& extrinsics) {
  markers.validate();
  PoseSequence out;
  const std::size_t n = markers.size();
  out.positions.reserve(n);
  out.orientations.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RotationMatrix& R_gm = markers.marker_orientations[i];
    out.positions.push_back(R_gm * extrinsics.translation + markers.marker_positions[i]);
    out.orientations.push_back(R_gm * extrinsics.rotation);
  }
  out.timestamps = markers.timestamps;
  return out;
}

PoseSequence subset(const PoseSequence& seq, const std::vector<std::size_t>& indices) {
  for (std::size_t i : indices) {
    if (i >= seq.size()) throw_invalid("subset: index " + std::to_string(i) + " out of range");
  }
  PoseSequence out;
  out.positions.reserve(indices.size());
  for (std::size_t i : indices) out.positions.push_back(seq.positions[i]);
  if (seq.has_orientations()) {
    for (std::size_t i : indices) out.orientations.push_back(seq.orientations.at(i));
  }
  if (seq.timestamps) {
    std::vector<double> ts;
    ts.reserve(indices.size());
    for (std::size_t i : indices) ts.push_back(seq.timestamps->at(i));
    out.timestamps = std::move(ts);
  }
  return out;
}

}  // namespace dte
