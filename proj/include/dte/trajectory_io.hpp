#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dte/metrics.hpp"
#include "dte/simulation.hpp"

namespace dte {

/// One line of a pose file: "timestamp tx ty tz qx qy qz qw".
struct PoseRecord {
  double timestamp = 0.0;
  Vec3 position = Vec3::Zero();
  Eigen::Vector4d quaternion{0.0, 0.0, 0.0, 1.0};  // qx qy qz qw, renormalized
};

/// Parses whitespace-separated 8-column pose lines; '#' starts a comment line.
/// Output is sorted by timestamp. Quaternions off unit norm by more than 1e-3
/// are renormalized and reported through `warnings`.
PoseSequence parse_pose_file(std::istream& in, std::vector<std::string>* warnings = nullptr);

/// Opens and parses `path`; an unreadable path throws kIo naming it.
PoseSequence read_pose_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// Writes at 17 significant digits. Timestamps default to the pose index.
void write_pose_file(std::ostream& out, const PoseSequence& seq);

struct AssociationPolicy {
  double max_time_diff = 0.02;  // seconds
};

/// Greedy one-to-one matching by nearest timestamp within max_time_diff,
/// smallest differences first. Output pairs are ordered by gt time.
std::pair<PoseSequence, PoseSequence> associate(const PoseSequence& gt, const PoseSequence& est,
                                                const AssociationPolicy& policy = {});

/// Rows: outlier counts, columns: noise levels.
void write_matrix_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels, const std::string& corner = "");
void write_grid_csv(std::ostream& out, const GridResult& result, const std::string& metric,
                    bool normalized = true);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::string& axis_name);

void write_report_json(std::ostream& out, const MetricReport& report);
MetricReport read_report_json(std::istream& in);

/// One <rect class="cell"> per matrix entry, viridis colour map, min and max
/// annotated below the grid.
void write_heatmap_svg(std::ostream& out, const Matrix& m, const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels, const std::string& title);

std::vector<std::string> grid_row_labels(const GridResult& result);
std::vector<std::string> grid_col_labels(const GridResult& result);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace dte
