#include "dte/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dte/error.hpp"
#include "dte/parallel.hpp"
#include "dte/robust_stats.hpp"

namespace dte {
namespace {

constexpr std::uint64_t kGroundTruthStream = std::numeric_limits<std::uint64_t>::max();

Vec3 uniform_in_cube(double side, Rng& rng) {
  std::uniform_real_distribution<double> u(-0.5 * side, 0.5 * side);
  const double x = u(rng);
  const double y = u(rng);
  const double z = u(rng);
  return Vec3(x, y, z);
}

// k distinct indices from [0, n), uniformly, returned sorted.
std::vector<std::size_t> choose_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::string> select_metrics(const std::vector<std::string>& available,
                                        const std::vector<std::string>& requested) {
  if (requested.empty()) return available;
  for (const std::string& m : requested) {
    if (std::find(available.begin(), available.end(), m) == available.end()) {
      throw_invalid("unknown metric '" + m + "' for this grid");
    }
  }
  std::vector<std::string> out;
  for (const std::string& m : available) {
    if (std::find(requested.begin(), requested.end(), m) != requested.end()) out.push_back(m);
  }
  return out;
}

using RunMatrices = std::map<std::string, Matrix>;

template <typename CellFn>
GridResult run_grid(const GridSpec& spec, const std::vector<std::string>& available, CellFn&& cell_fn) {
  spec.validate();
  GridResult result;
  result.spec = spec;
  result.metrics = select_metrics(available, spec.metric_set);

  const auto rows = static_cast<Eigen::Index>(spec.outlier_counts.size());
  const auto cols = static_cast<Eigen::Index>(spec.noise_levels.size());
  std::vector<RunMatrices> per_run(spec.runs);

  parallel_for(
      spec.runs,
      [&](std::size_t run) {
        RunMatrices mats;
        for (const std::string& m : result.metrics) mats[m] = Matrix::Zero(rows, cols);
        cell_fn(run, mats);
        per_run[run] = std::move(mats);
      },
      spec.threads);

  for (const std::string& m : result.metrics) {
    Matrix norm_sum = Matrix::Zero(rows, cols);
    Matrix raw_sum = Matrix::Zero(rows, cols);
    for (std::size_t run = 0; run < spec.runs; ++run) {
      const Matrix& raw = per_run[run].at(m);
      norm_sum += normalize_by_max(raw);
      raw_sum += raw;
      if (spec.keep_raw) result.raw[m].push_back(raw);
    }
    result.normalized[m] = norm_sum / static_cast<double>(spec.runs);
    result.raw_mean[m] = raw_sum / static_cast<double>(spec.runs);
  }
  return result;
}

std::string cell_context(std::size_t run, std::size_t outliers, double noise) {
  return "run " + std::to_string(run) + ", " + std::to_string(outliers) + " outliers, noise " +
         std::to_string(noise);
}

}  // namespace

PoseSequence generate_ground_truth(std::size_t n, double cube_side, Rng& rng) {
  if (n == 0) throw_invalid("generate_ground_truth: n must be >= 1");
  PoseSequence seq;
  seq.positions.reserve(n);
  seq.orientations.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    seq.positions.push_back(uniform_in_cube(cube_side, rng));
    seq.orientations.push_back(random_uniform_rotation(rng));
  }
  return seq;
}

Sim3Transform random_sim3(Rng& rng) {
  std::uniform_real_distribution<double> log_scale(std::log(0.5), std::log(2.0));
  Sim3Transform T;
  T.rotation = random_uniform_rotation(rng);
  T.scale = std::exp(log_scale(rng));
  T.translation = uniform_in_cube(10.0, rng);
  return T;
}

void CorruptionConfig::validate(std::size_t n) const {
  if (!(sigma_pos >= 0.0)) throw_invalid("corruption: sigma_pos must be >= 0");
  if (!(sigma_rot_deg >= 0.0)) throw_invalid("corruption: sigma_rot_deg must be >= 0");
  if (n_outliers > n) {
    throw_invalid("corruption: " + std::to_string(n_outliers) + " outliers requested for " +
                  std::to_string(n) + " poses");
  }
  if (!(outlier_cube_side > 0.0)) throw_invalid("corruption: outlier cube side must be positive");
}

Corruption corrupt_trajectory(const PoseSequence& gt, const CorruptionConfig& cfg, Rng& rng) {
  gt.validate();
  cfg.validate(gt.size());

  Corruption out;
  PoseSequence& est = out.estimate;
  est = gt;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Vec3& p : est.positions) {
    const double x = normal(rng);
    const double y = normal(rng);
    const double z = normal(rng);
    p += cfg.sigma_pos * Vec3(x, y, z);
  }
  for (RotationMatrix& R : est.orientations) R = perturb_rotation(R, cfg.sigma_rot_deg, rng);

  out.outlier_indices = choose_indices(gt.size(), cfg.n_outliers, rng);
  for (std::size_t i : out.outlier_indices) {
    est.positions[i] = uniform_in_cube(cfg.outlier_cube_side, rng);
    if (est.has_orientations()) est.orientations[i] = random_uniform_rotation(rng);
  }

  if (cfg.apply_random_sim3) {
    out.sim3 = random_sim3(rng);
    est = apply_sim3(*out.sim3, est);
  }
  return out;
}

Corruption corrupt_trajectory(const PoseSequence& gt, const CorruptionConfig& cfg) {
  Rng rng(cfg.seed);
  return corrupt_trajectory(gt, cfg, rng);
}

GridSpec GridSpec::translation_defaults() {
  GridSpec spec;
  for (int i = 0; i <= 10; ++i) spec.noise_levels.push_back(0.01 * i);
  for (std::size_t i = 0; i <= 10; ++i) spec.outlier_counts.push_back(i);
  return spec;
}

GridSpec GridSpec::rotation_defaults() {
  GridSpec spec;
  for (int i = 0; i <= 10; ++i) spec.noise_levels.push_back(static_cast<double>(i));
  for (std::size_t i = 0; i <= 10; ++i) spec.outlier_counts.push_back(i);
  return spec;
}

void GridSpec::validate() const {
  if (noise_levels.empty() || outlier_counts.empty()) throw_invalid("grid: axes must be nonempty");
  if (runs < 1) throw_invalid("grid: runs must be >= 1");
  const std::size_t n = base_ground_truth ? base_ground_truth->size() : n_poses;
  if (n < 3) throw_invalid("grid: at least 3 poses are required");
  for (double s : noise_levels) {
    if (!(s >= 0.0)) throw_invalid("grid: noise levels must be >= 0");
  }
  for (std::size_t o : outlier_counts) {
    if (o > n) throw_invalid("grid: outlier count exceeds pose count");
  }
  params.validate();
  if (base_ground_truth) base_ground_truth->validate();
}

const std::vector<std::string>& translation_grid_metrics() {
  static const std::vector<std::string> names = {"ATE", "DTE", "DTE-mean", "DTE-rms"};
  return names;
}

const std::vector<std::string>& rotation_grid_metrics() {
  static const std::vector<std::string> names = {"Median-1", "Mean-1", "RMS-1", "Median-2",
                                                 "Mean-2",   "RMS-2",  "DRE"};
  return names;
}

Matrix normalize_by_max(const Matrix& m) {
  const double top = m.maxCoeff();
  if (!(top > kNumericalZero)) return Matrix::Zero(m.rows(), m.cols());
  return m / top;
}

GridResult run_translation_grid(const GridSpec& spec) {
  return run_grid(spec, translation_grid_metrics(), [&](std::size_t run, RunMatrices& mats) {
    Rng gt_rng = make_stream(spec.seed, run, kGroundTruthStream);
    const PoseSequence gt =
        spec.base_ground_truth ? *spec.base_ground_truth : generate_ground_truth(spec.n_poses, spec.cube_side, gt_rng);
    const bool need_ate = mats.count("ATE") > 0;
    const bool need_dte = mats.size() > (need_ate ? 1u : 0u);

    for (std::size_t o = 0; o < spec.outlier_counts.size(); ++o) {
      for (std::size_t s = 0; s < spec.noise_levels.size(); ++s) {
        // one stream per outlier row: every noise level sees the same draws
        Rng rng = make_stream(spec.seed, run, o);
        CorruptionConfig cfg;
        cfg.sigma_pos = spec.noise_levels[s];
        cfg.sigma_rot_deg = spec.rotation_noise_deg;
        cfg.n_outliers = spec.outlier_counts[o];
        cfg.outlier_cube_side = spec.outlier_cube_side;
        cfg.apply_random_sim3 = true;
        try {
          const PoseSequence est = corrupt_trajectory(gt, cfg, rng).estimate;
          const auto r = static_cast<Eigen::Index>(o);
          const auto c = static_cast<Eigen::Index>(s);
          if (need_ate) mats["ATE"](r, c) = compute_ate(gt, est, true);
          if (need_dte) {
            const DteResult dte = compute_dte_ex(gt, est, spec.params);
            if (mats.count("DTE")) mats["DTE"](r, c) = dte.dte;
            if (mats.count("DTE-mean")) mats["DTE-mean"](r, c) = dte.dte_mean;
            if (mats.count("DTE-rms")) mats["DTE-rms"](r, c) = dte.dte_rms;
          }
        } catch (const Error& e) {
          throw Error(e.kind(), cell_context(run, cfg.n_outliers, cfg.sigma_pos) + ": " + e.what());
        }
      }
    }
  });
}

GridResult run_rotation_grid(const GridSpec& spec) {
  return run_grid(spec, rotation_grid_metrics(), [&](std::size_t run, RunMatrices& mats) {
    Rng gt_rng = make_stream(spec.seed, run, kGroundTruthStream);
    std::vector<RotationMatrix> gt;
    if (spec.base_ground_truth) {
      if (!spec.base_ground_truth->has_orientations()) throw_invalid("rotation grid: base trajectory has no orientations");
      gt = spec.base_ground_truth->orientations;
    } else {
      gt.reserve(spec.n_poses);
      for (std::size_t i = 0; i < spec.n_poses; ++i) gt.push_back(random_uniform_rotation(gt_rng));
    }

    for (std::size_t o = 0; o < spec.outlier_counts.size(); ++o) {
      for (std::size_t s = 0; s < spec.noise_levels.size(); ++s) {
        // one stream per outlier row: every noise level sees the same draws
        Rng rng = make_stream(spec.seed, run, o);
        const RotationMatrix offset = random_uniform_rotation(rng);
        std::vector<RotationMatrix> est;
        est.reserve(gt.size());
        for (const RotationMatrix& R : gt) est.push_back(perturb_rotation(offset * R, spec.noise_levels[s], rng));
        for (std::size_t i : choose_indices(gt.size(), spec.outlier_counts[o], rng)) {
          est[i] = random_uniform_rotation(rng);
        }

        try {
          const RotationMatrix l1 = geodesic_l1_median(relative_orientations(gt, est)).rotation;
          const RotationErrorTable t = rotation_error_table(gt, est, l1);
          const auto r = static_cast<Eigen::Index>(o);
          const auto c = static_cast<Eigen::Index>(s);
          const std::map<std::string, double> values = {
              {"Median-1", t.median1}, {"Mean-1", t.mean1}, {"RMS-1", t.rms1},
              {"Median-2", t.median2}, {"Mean-2", t.mean2}, {"RMS-2", t.rms2},
              {"DRE", weighted_blend(t.mean1, t.rms1, spec.params.alpha)}};
          for (auto& [name, m] : mats) m(r, c) = values.at(name);
        } catch (const Error& e) {
          throw Error(e.kind(), cell_context(run, spec.outlier_counts[o], spec.noise_levels[s]) + ": " + e.what());
        }
      }
    }
  });
}

void SweepSpec::validate() const {
  if (values.empty()) throw_invalid("sweep: no axis values");
  if (trials < 1) throw_invalid("sweep: trials must be >= 1");
  if (n_poses < 1) throw_invalid("sweep: n_poses must be >= 1");
  for (double v : values) {
    if (!(v >= 0.0)) throw_invalid("sweep: axis values must be >= 0");
    if (axis == SweepAxis::kOutliers && (v > static_cast<double>(n_poses) || v != std::floor(v))) {
      throw_invalid("sweep: outlier counts must be integers not exceeding n_poses");
    }
  }
  if (axis == SweepAxis::kNoise && fixed_outliers > n_poses) throw_invalid("sweep: too many outliers");
}

CalibrationDataset make_calibration_dataset(std::size_t n, double noise_deg, std::size_t n_outliers, Rng& rng) {
  if (n_outliers > n) throw_invalid("calibration dataset: more outliers than poses");
  CalibrationDataset data;
  data.markers.reserve(n);
  for (std::size_t i = 0; i < n; ++i) data.markers.push_back(random_uniform_rotation(rng));
  data.true_r_align = random_uniform_rotation(rng);
  data.true_r_mc = random_uniform_rotation(rng);
  data.estimate.reserve(n);
  for (const RotationMatrix& R_gm : data.markers) {
    data.estimate.push_back(perturb_rotation(data.true_r_align.transpose() * R_gm * data.true_r_mc, noise_deg, rng));
  }
  data.outlier_indices = choose_indices(n, n_outliers, rng);
  for (std::size_t i : data.outlier_indices) data.estimate[i] = random_uniform_rotation(rng);
  return data;
}

std::vector<SweepRow> run_calibration_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t settings = spec.values.size();
  std::vector<double> errors(settings * spec.trials, 0.0);
  std::vector<double> gt_diffs(settings * spec.trials, 0.0);

  parallel_for(
      settings * spec.trials,
      [&](std::size_t job) {
        const std::size_t s = job / spec.trials;
        const std::size_t t = job % spec.trials;
        const double noise = spec.axis == SweepAxis::kNoise ? spec.values[s] : spec.fixed_noise_deg;
        const std::size_t outliers =
            spec.axis == SweepAxis::kOutliers ? static_cast<std::size_t>(spec.values[s]) : spec.fixed_outliers;
        Rng rng = make_stream(spec.seed, s, t);
        const CalibrationDataset data = make_calibration_dataset(spec.n_poses, noise, outliers, rng);
        const CalibrationResult fit = calibrate_camera_to_marker(data.markers, data.estimate, rng, spec.calibration);
        errors[job] = rad2deg(geodesic_distance(fit.r_mc, data.true_r_mc));
        if (spec.with_gt_seed) {
          const CalibrationResult seeded =
              calibrate_from_ground_truth_seed(data.markers, data.estimate, data.true_r_mc, rng, spec.calibration);
          gt_diffs[job] = rad2deg(geodesic_distance(fit.r_mc, seeded.r_mc));
        }
      },
      spec.threads);

  std::vector<SweepRow> rows;
  rows.reserve(settings);
  for (std::size_t s = 0; s < settings; ++s) {
    SweepRow row;
    row.value = spec.values[s];
    const auto first = static_cast<std::ptrdiff_t>(s * spec.trials);
    const auto last = first + static_cast<std::ptrdiff_t>(spec.trials);
    row.errors_deg.assign(errors.begin() + first, errors.begin() + last);
    row.median = median(row.errors_deg);
    row.q1 = quantile(row.errors_deg, 0.25);
    row.q3 = quantile(row.errors_deg, 0.75);
    row.max = *std::max_element(row.errors_deg.begin(), row.errors_deg.end());
    if (spec.with_gt_seed) {
      row.gt_seed_diff_deg.assign(gt_diffs.begin() + first, gt_diffs.begin() + last);
      row.gt_seed_median = median(row.gt_seed_diff_deg);
      row.gt_seed_max = *std::max_element(row.gt_seed_diff_deg.begin(), row.gt_seed_diff_deg.end());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

PoseSequence load_and_prepare_real_gt(const PoseSequence& seq, double interval) {
  seq.validate();
  if (!seq.timestamps) throw_invalid("load_and_prepare_real_gt: timestamps are required");
  if (!(interval >= 0.0)) throw_invalid("load_and_prepare_real_gt: interval must be >= 0");

  const std::vector<double>& ts = *seq.timestamps;
  std::vector<std::size_t> keep = {0};
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts[i] - ts[keep.back()] >= interval) keep.push_back(i);
  }
  PoseSequence out = subset(seq, keep);

  Vec3 lo = out.positions.front();
  Vec3 hi = out.positions.front();
  for (const Vec3& p : out.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 center = 0.5 * (lo + hi);
  const double extent = (hi - lo).maxCoeff();
  const double scale = extent > 0.0 ? 1.0 / extent : 1.0;
  for (Vec3& p : out.positions) p = scale * (p - center);
  return out;
}

}  // namespace dte
