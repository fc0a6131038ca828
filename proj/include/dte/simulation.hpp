#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dte/calibration.hpp"
#include "dte/metrics.hpp"

namespace dte {

/// n poses with positions uniform in the centered cube of the given side and
/// Haar-uniform orientations.
PoseSequence generate_ground_truth(std::size_t n, double cube_side, Rng& rng);

/// Haar rotation, log-uniform scale in [0.5, 2], translation uniform in [-5, 5]^3.
Sim3Transform random_sim3(Rng& rng);

struct CorruptionConfig {
  double sigma_pos = 0.0;            // scene units, per component
  double sigma_rot_deg = 0.0;
  std::size_t n_outliers = 0;
  double outlier_cube_side = 10.0;
  bool apply_random_sim3 = false;
  std::uint64_t seed = 0;            // used by the overload without an Rng

  void validate(std::size_t n) const;
};

struct Corruption {
  PoseSequence estimate;
  std::vector<std::size_t> outlier_indices;  // sorted
  std::optional<Sim3Transform> sim3;         // the applied global transform
};

/// Gaussian position and rotation noise on every pose, then exactly
/// n_outliers distinct poses replaced by random ones, then (optionally) one
/// random SIM(3) applied to the whole sequence.
Corruption corrupt_trajectory(const PoseSequence& gt, const CorruptionConfig& cfg, Rng& rng);
Corruption corrupt_trajectory(const PoseSequence& gt, const CorruptionConfig& cfg);

using Matrix = Eigen::MatrixXd;

struct GridSpec {
  std::vector<double> noise_levels;        // translation grid: scene units; rotation grid: degrees
  std::vector<std::size_t> outlier_counts;
  std::size_t runs = 100;
  std::size_t n_poses = 100;
  std::vector<std::string> metric_set;     // empty selects every metric of the runner
  std::uint64_t seed = 0;                  // one stream per (run, outlier row), shared along the noise axis
  double rotation_noise_deg = 5.0;         // translation grid only
  double cube_side = 1.0;
  double outlier_cube_side = 10.0;
  DteParams params;
  /// Replaces the random ground truth of every run (real-trajectory variant).
  std::optional<PoseSequence> base_ground_truth;
  bool keep_raw = false;
  std::size_t threads = 0;

  /// sigma in {0, 0.01, ..., 0.1}, outliers in {0, ..., 10}.
  static GridSpec translation_defaults();
  /// sigma in {0, 1, ..., 10} degrees, outliers in {0, ..., 10}.
  static GridSpec rotation_defaults();

  void validate() const;
};

struct GridResult {
  GridSpec spec;
  std::vector<std::string> metrics;                // in output order
  std::map<std::string, Matrix> normalized;        // mean over runs of per-run max-normalized values
  std::map<std::string, Matrix> raw_mean;          // mean over runs of raw values
  std::map<std::string, std::vector<Matrix>> raw;  // per run, only with keep_raw
};

/// ATE / DTE / DTE-mean / DTE-rms over (outliers x position noise).
GridResult run_translation_grid(const GridSpec& spec);

/// Median-1/Mean-1/RMS-1, Median-2/Mean-2/RMS-2 and DRE over
/// (outliers x rotation noise) for an orientation-only pipeline.
GridResult run_rotation_grid(const GridSpec& spec);

const std::vector<std::string>& translation_grid_metrics();
const std::vector<std::string>& rotation_grid_metrics();

/// Largest value still treated as an exact zero error (round-off of a
/// noise-free alignment).
constexpr double kNumericalZero = 1e-9;

/// Divides every entry by the matrix maximum; a matrix whose maximum does not
/// exceed kNumericalZero maps to all zeros.
Matrix normalize_by_max(const Matrix& m);

enum class SweepAxis { kNoise, kOutliers };

struct SweepSpec {
  SweepAxis axis = SweepAxis::kNoise;
  std::vector<double> values;          // noise (deg) or outlier counts
  double fixed_noise_deg = 5.0;        // used on the outlier axis
  std::size_t fixed_outliers = 5;      // used on the noise axis
  std::size_t trials = 100;
  std::size_t n_poses = 100;
  std::uint64_t seed = 0;
  bool with_gt_seed = false;
  CalibrationOptions calibration;
  std::size_t threads = 0;

  void validate() const;
};

struct SweepRow {
  double value = 0.0;
  std::vector<double> errors_deg;        // d(estimated R_mc, true R_mc) per trial
  double median = 0.0, q1 = 0.0, q3 = 0.0, max = 0.0;
  std::vector<double> gt_seed_diff_deg;  // d(random-init, gt-init) per trial
  double gt_seed_median = 0.0, gt_seed_max = 0.0;
};

struct CalibrationDataset {
  std::vector<RotationMatrix> markers;   // R_gm,i
  std::vector<RotationMatrix> estimate;  // R_ec,i
  RotationMatrix true_r_mc;
  RotationMatrix true_r_align;
  std::vector<std::size_t> outlier_indices;
};

/// R_ec,i = R_align^T R_gm,i R_mc, perturbed by Exp(n) and with outliers
/// replaced by Haar-random orientations.
CalibrationDataset make_calibration_dataset(std::size_t n, double noise_deg, std::size_t n_outliers, Rng& rng);

std::vector<SweepRow> run_calibration_sweep(const SweepSpec& spec);

/// Greedy time downsampling (first pose kept, then each pose at least
/// `interval` seconds after the last kept one) followed by an isotropic
/// scale and shift that maps the position bounding box into the centered
/// unit cube with its largest extent equal to 1.
PoseSequence load_and_prepare_real_gt(const PoseSequence& seq, double interval);

}  // namespace dte
