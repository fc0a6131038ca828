#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "dte/calibration.hpp"
#include "dte/error.hpp"
#include "dte/metrics.hpp"
#include "dte/robust_stats.hpp"
#include "dte/simulation.hpp"
#include "dte/trajectory_io.hpp"

namespace dte::cli {
namespace {

std::vector<double> parse_numbers(const std::string& text, std::size_t expected, const std::string& what) {
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<double> values;
  for (std::string tok; in >> tok;) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, what + ": invalid number '" + tok + "'");
    }
  }
  if (values.size() != expected) {
    throw Error(ErrorKind::kParse, what + ": expected " + std::to_string(expected) + " numbers, got " +
                                       std::to_string(values.size()));
  }
  return values;
}

// Inline "qx,qy,qz,qw" or a file holding those four numbers.
RotationMatrix parse_quaternion_arg(const std::string& arg, const std::string& what) {
  std::string text = arg;
  if (std::filesystem::is_regular_file(arg)) {
    std::ifstream in(arg);
    text.clear();
    for (std::string line; std::getline(in, line);) {
      text += line.substr(0, line.find('#'));
      text += ' ';
    }
  }
  const std::vector<double> q = parse_numbers(text, 4, what);
  return quaternion_to_rotation(q[0], q[1], q[2], q[3]);
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

void print_table(std::ostream& out, const MetricReport& r) {
  out << std::left;
  out << std::setw(14) << "poses" << r.n_poses << '\n';
  out << std::setw(14) << "ATE" << fmt(r.ate) << '\n';
  out << std::setw(14) << "DTE" << fmt(r.dte) << "  (mean " << fmt(r.dte_mean) << ", rms " << fmt(r.dte_rms)
      << ", k=" << fmt(r.k) << ", alpha=" << fmt(r.alpha) << ")\n";
  out << std::setw(14) << "DRE [deg]" << fmt(r.dre_deg) << '\n';
  const RotationErrorTable& t = r.rotation_table;
  out << "rotation errors [deg]   median        mean          rms\n";
  out << std::setw(24) << "  L1 alignment" << std::setw(14) << fmt(t.median1) << std::setw(14) << fmt(t.mean1)
      << fmt(t.rms1) << '\n';
  out << std::setw(24) << "  L2 alignment" << std::setw(14) << fmt(t.median2) << std::setw(14) << fmt(t.mean2)
      << fmt(t.rms2) << '\n';
  if (r.trace) {
    out << "\nindex  ate_dist  dte_dist  dte_eps  rot_err_deg\n";
    for (std::size_t i = 0; i < r.trace->dte_distances.size(); ++i) {
      out << std::setw(7) << i << std::setw(10) << fmt(r.trace->ate_distances[i], 4) << std::setw(10)
          << fmt(r.trace->dte_distances[i], 4) << std::setw(9) << fmt(r.trace->dte_normalized[i], 4)
          << fmt(r.trace->rotation_errors_deg[i], 4) << '\n';
    }
  }
}

void print_csv(std::ostream& out, const MetricReport& r) {
  const RotationErrorTable& t = r.rotation_table;
  out << "metric,value\r\n"
      << "n_poses," << r.n_poses << "\r\n"
      << "ate," << format_double(r.ate) << "\r\n"
      << "dte," << format_double(r.dte) << "\r\n"
      << "dte_mean," << format_double(r.dte_mean) << "\r\n"
      << "dte_rms," << format_double(r.dte_rms) << "\r\n"
      << "dre_deg," << format_double(r.dre_deg) << "\r\n"
      << "median1_deg," << format_double(t.median1) << "\r\n"
      << "mean1_deg," << format_double(t.mean1) << "\r\n"
      << "rms1_deg," << format_double(t.rms1) << "\r\n"
      << "median2_deg," << format_double(t.median2) << "\r\n"
      << "mean2_deg," << format_double(t.mean2) << "\r\n"
      << "rms2_deg," << format_double(t.rms2) << "\r\n";
}

struct EvaluateArgs {
  std::string gt_file, est_file;
  double k = 5.0;
  double alpha = 0.5;
  bool no_scale = false;
  double max_time_diff = 0.02;
  std::string marker_rotation;
  std::string marker_translation;
  bool per_pose = false;
  bool json = false;
  bool csv = false;
};

int do_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> warnings;
  PoseSequence gt = read_pose_file(a.gt_file, &warnings);
  PoseSequence est = read_pose_file(a.est_file, &warnings);

  if (a.marker_translation.empty()) {
    err << "warning: --marker-translation not given; assuming the marker-to-camera offset is zero. "
           "A large offset (e.g. camera on a rod swung around the marker) makes this assumption "
           "hide real camera motion.\n";
  }
  if (!a.marker_rotation.empty() || !a.marker_translation.empty()) {
    MarkerExtrinsics ext;
    if (!a.marker_rotation.empty()) ext.rotation = parse_quaternion_arg(a.marker_rotation, "--marker-rotation");
    if (!a.marker_translation.empty()) {
      const std::vector<double> t = parse_numbers(a.marker_translation, 3, "--marker-translation");
      ext.translation = Vec3(t[0], t[1], t[2]);
    }
    MarkerSequence markers{gt.positions, gt.orientations, gt.timestamps};
    gt = markers_to_camera_ground_truth(markers, ext);
  }

  const auto [gt_pairs, est_pairs] = associate(gt, est, AssociationPolicy{a.max_time_diff});
  for (const std::string& w : warnings) err << "warning: " << w << '\n';

  EvaluationOptions opts;
  opts.params = DteParams{a.k, a.alpha};
  opts.with_scale = !a.no_scale;
  opts.per_pose = a.per_pose;
  const MetricReport report = evaluate(gt_pairs, est_pairs, opts);

  if (a.json) {
    write_report_json(out, report);
  } else if (a.csv) {
    print_csv(out, report);
  } else {
    print_table(out, report);
  }
  return kSuccess;
}

struct CalibrateArgs {
  std::string markers_file, est_file;
  std::uint64_t seed = 0;
  std::string gt_seed_rotation;
  bool report_degeneracy = false;
  double max_time_diff = 0.02;
};

void print_degeneracy(std::ostream& os, const char* label, const DegeneracyReport& d) {
  os << label << ": " << (d.degenerate ? "degenerate" : "ok") << ", max axis deviation "
     << fmt(rad2deg(d.max_axis_deviation)) << " deg";
  if (d.common_axis) {
    os << ", common axis (" << fmt(d.common_axis->x()) << ", " << fmt(d.common_axis->y()) << ", "
       << fmt(d.common_axis->z()) << ")";
  }
  os << '\n';
}

int do_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
  const PoseSequence markers = read_pose_file(a.markers_file);
  const PoseSequence est = read_pose_file(a.est_file);
  const auto [m, e] = associate(markers, est, AssociationPolicy{a.max_time_diff});

  Rng rng(a.seed);
  const CalibrationResult result =
      a.gt_seed_rotation.empty()
          ? calibrate_camera_to_marker(m.orientations, e.orientations, rng)
          : calibrate_from_ground_truth_seed(m.orientations, e.orientations,
                                             parse_quaternion_arg(a.gt_seed_rotation, "--gt-seed-rotation"), rng);

  if (result.degenerate()) {
    err << "warning: degenerate orientation configuration (all relative rotations share one axis); "
           "the camera-to-marker rotation is not unique\n";
  }
  const Eigen::Vector4d q = rotation_to_quaternion(result.r_mc);
  const Eigen::Vector4d qa = rotation_to_quaternion(result.r_align);
  out << "r_mc (qx qy qz qw)     " << format_double(q[0]) << ' ' << format_double(q[1]) << ' '
      << format_double(q[2]) << ' ' << format_double(q[3]) << '\n';
  out << "r_align (qx qy qz qw)  " << format_double(qa[0]) << ' ' << format_double(qa[1]) << ' '
      << format_double(qa[2]) << ' ' << format_double(qa[3]) << '\n';
  out << "final cost [rad]       " << format_double(result.final_cost) << '\n';
  out << "mean residual [deg]    " << fmt(rad2deg(result.final_cost / static_cast<double>(m.size()))) << '\n';
  out << "poses                  " << m.size() << '\n';
  if (a.report_degeneracy) {
    print_degeneracy(out, "marker orientations", result.marker_degeneracy);
    print_degeneracy(out, "estimated orientations", result.estimate_degeneracy);
  }
  return kSuccess;
}

struct SimulateArgs {
  std::string kind;
  std::size_t runs = 100;
  std::size_t poses = 100;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::size_t threads = 0;
  std::string gt_file;
  double interval = 0.5;
  std::size_t trials = 100;
  std::string axis = "noise";
  bool gt_seed = false;
};

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  writer(f);
}

void summarize_grid(std::ostream& out, const GridResult& result) {
  out << std::left << std::setw(10) << "metric" << std::setw(12) << "min" << std::setw(12) << "max"
      << std::setw(16) << "mean row-range" << "mean col-range\n";
  for (const std::string& name : result.metrics) {
    const Matrix& m = result.normalized.at(name);
    const double row_range = (m.rowwise().maxCoeff() - m.rowwise().minCoeff()).mean();
    const double col_range = (m.colwise().maxCoeff() - m.colwise().minCoeff()).mean();
    out << std::setw(10) << name << std::setw(12) << fmt(m.minCoeff(), 4) << std::setw(12) << fmt(m.maxCoeff(), 4)
        << std::setw(16) << fmt(row_range, 4) << fmt(col_range, 4) << '\n';
  }
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const std::filesystem::path dir(a.out_dir);
  std::filesystem::create_directories(dir);

  if (a.kind == "calibration-sweep") {
    SweepSpec spec;
    if (a.axis == "noise") {
      spec.axis = SweepAxis::kNoise;
      for (int s = 0; s <= 10; ++s) spec.values.push_back(s);
    } else if (a.axis == "outliers") {
      spec.axis = SweepAxis::kOutliers;
      for (int o = 0; o <= 20; o += 2) spec.values.push_back(o);
    } else {
      throw Error(ErrorKind::kInvalidInput, "--axis must be 'noise' or 'outliers'");
    }
    spec.trials = a.trials;
    spec.n_poses = a.poses;
    spec.seed = a.seed;
    spec.with_gt_seed = a.gt_seed;
    spec.threads = a.threads;
    const std::vector<SweepRow> rows = run_calibration_sweep(spec);
    const std::string axis_name = a.axis == "noise" ? "noise_deg" : "outliers";
    write_file(dir / ("calibration_" + a.axis + ".csv"), [&](std::ostream& f) { write_sweep_csv(f, rows, axis_name); });
    write_sweep_csv(out, rows, axis_name);
    return kSuccess;
  }

  GridSpec spec = a.kind == "translation-grid" ? GridSpec::translation_defaults() : GridSpec::rotation_defaults();
  spec.runs = a.runs;
  spec.n_poses = a.poses;
  spec.seed = a.seed;
  spec.threads = a.threads;
  if (!a.gt_file.empty()) spec.base_ground_truth = load_and_prepare_real_gt(read_pose_file(a.gt_file), a.interval);
  const GridResult result = a.kind == "translation-grid" ? run_translation_grid(spec) : run_rotation_grid(spec);

  const std::vector<std::string> rows = grid_row_labels(result);
  const std::vector<std::string> cols = grid_col_labels(result);
  for (const std::string& name : result.metrics) {
    write_file(dir / (name + ".csv"), [&](std::ostream& f) { write_grid_csv(f, result, name, true); });
    write_file(dir / (name + "_raw.csv"), [&](std::ostream& f) { write_grid_csv(f, result, name, false); });
    write_file(dir / (name + ".svg"), [&](std::ostream& f) {
      write_heatmap_svg(f, result.normalized.at(name), rows, cols, name + " (normalized, rows: outliers, cols: noise)");
    });
  }
  out << a.kind << ": " << result.spec.runs << " runs, "
      << (spec.base_ground_truth ? spec.base_ground_truth->size() : spec.n_poses) << " poses, seed " << spec.seed
      << '\n';
  summarize_grid(out, result);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trajectory accuracy metrics (ATE, DTE, DRE), camera-to-marker calibration and simulations"};
  app.name(args.empty() ? "dte" : args.front());
  app.require_subcommand(1);

  EvaluateArgs ev;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Compare an estimated trajectory with ground truth");
  evaluate_cmd->add_option("gt_file", ev.gt_file, "Ground-truth pose file (camera or marker poses)")->required();
  evaluate_cmd->add_option("est_file", ev.est_file, "Estimated pose file")->required();
  evaluate_cmd->add_option("--k", ev.k, "Winsorization threshold in ground-truth MADs")->capture_default_str();
  evaluate_cmd->add_option("--alpha", ev.alpha, "Weight of the RMS term")->capture_default_str();
  evaluate_cmd->add_flag("--no-scale", ev.no_scale, "Fix the alignment scale to 1");
  evaluate_cmd->add_option("--max-time-diff", ev.max_time_diff, "Association tolerance [s]")->capture_default_str();
  evaluate_cmd->add_option("--marker-rotation", ev.marker_rotation,
                           "Camera-to-marker rotation: file or inline qx,qy,qz,qw");
  evaluate_cmd->add_option("--marker-translation", ev.marker_translation,
                           "Camera position in the marker frame: x,y,z");
  evaluate_cmd->add_flag("--per-pose", ev.per_pose, "Include per-pose errors");
  auto* json_flag = evaluate_cmd->add_flag("--json", ev.json, "JSON output");
  auto* csv_flag = evaluate_cmd->add_flag("--csv", ev.csv, "CSV output");
  json_flag->excludes(csv_flag);

  CalibrateArgs cal;
  CLI::App* calibrate_cmd = app.add_subcommand("calibrate", "Estimate the camera-to-marker rotation");
  calibrate_cmd->add_option("markers_file", cal.markers_file, "Marker pose file")->required();
  calibrate_cmd->add_option("est_file", cal.est_file, "Estimated camera pose file")->required();
  calibrate_cmd->add_option("--seed", cal.seed, "Random seed")->capture_default_str();
  calibrate_cmd->add_option("--gt-seed-rotation", cal.gt_seed_rotation,
                            "Refine from this rotation (file or qx,qy,qz,qw) with a single 1-degree round");
  calibrate_cmd->add_flag("--report-degeneracy", cal.report_degeneracy, "Print the degeneracy analysis");
  calibrate_cmd->add_option("--max-time-diff", cal.max_time_diff, "Association tolerance [s]")->capture_default_str();

  SimulateArgs sim;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Run a seeded simulation experiment");
  simulate_cmd->add_option("kind", sim.kind, "translation-grid | rotation-grid | calibration-sweep")
      ->required()
      ->check(CLI::IsMember({"translation-grid", "rotation-grid", "calibration-sweep"}));
  simulate_cmd->add_option("--runs", sim.runs, "Runs per grid")->capture_default_str()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--poses", sim.poses, "Poses per trajectory")->capture_default_str()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();
  simulate_cmd->add_option("--threads", sim.threads, "Worker threads (0: DTE_THREADS or all cores)");
  simulate_cmd->add_option("--gt-file", sim.gt_file, "Use this pose file as ground truth for every run");
  simulate_cmd->add_option("--interval", sim.interval, "Downsampling interval for --gt-file [s]")->capture_default_str();
  simulate_cmd->add_option("--trials", sim.trials, "Calibration trials per setting")->capture_default_str();
  simulate_cmd->add_option("--axis", sim.axis, "Calibration sweep axis: noise | outliers")->capture_default_str();
  simulate_cmd->add_flag("--gt-seed", sim.gt_seed, "Also compare against ground-truth-seeded calibration");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (evaluate_cmd->parsed()) return do_evaluate(ev, out, err);
    if (calibrate_cmd->parsed()) return do_calibrate(cal, out, err);
    if (simulate_cmd->parsed()) return do_simulate(sim, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kDegenerate ? kDegenerate : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace dte::cli
