#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dte/error.hpp"
#include "dte/parallel.hpp"
#include "dte/simulation.hpp"

using namespace dte;

namespace {

GridSpec small_grid(GridSpec spec, std::size_t runs = 3) {
  spec.runs = runs;
  spec.n_poses = 40;
  spec.noise_levels.resize(4);
  spec.outlier_counts.resize(3);
  spec.seed = 11;
  spec.keep_raw = true;
  return spec;
}

}  // namespace

TEST_CASE("generate_ground_truth") {
  Rng a(1), b(1);
  const PoseSequence g = generate_ground_truth(100, 1.0, a);
  const PoseSequence h = generate_ground_truth(100, 1.0, b);
  CHECK(g.positions == h.positions);
  CHECK(g.orientations == h.orientations);
  for (const Vec3& p : g.positions) CHECK(p.cwiseAbs().maxCoeff() <= 0.5);
  for (const RotationMatrix& R : g.orientations) CHECK(is_rotation(R));
  CHECK_THROWS_AS(generate_ground_truth(0, 1.0, a), Error);
}

TEST_CASE("ground truth coordinates are uniform") {
  // chi-square over 20 bins per axis; 1% critical value for 19 dof is 36.19
  Rng rng(2);
  const int bins = 20;
  const PoseSequence g = generate_ground_truth(100000, 1.0, rng);
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<int> count(bins, 0);
    for (const Vec3& p : g.positions) count[std::min(bins - 1, static_cast<int>((p(axis) + 0.5) * bins))]++;
    const double expected = 100000.0 / bins;
    double chi2 = 0.0;
    for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 36.19);
  }
}

TEST_CASE("random_sim3 ranges") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Sim3Transform T = random_sim3(rng);
    CHECK(T.scale >= 0.5);
    CHECK(T.scale <= 2.0);
    CHECK(T.translation.cwiseAbs().maxCoeff() <= 5.0);
    CHECK(is_rotation(T.rotation));
  }
}

TEST_CASE("corrupt_trajectory") {
  Rng rng(4);
  const PoseSequence gt = generate_ground_truth(100, 1.0, rng);

  const Corruption none = corrupt_trajectory(gt, CorruptionConfig{}, rng);
  CHECK(none.estimate.positions == gt.positions);
  CHECK(none.estimate.orientations == gt.orientations);
  CHECK(none.outlier_indices.empty());
  CHECK_FALSE(none.sim3.has_value());

  const Corruption ten = corrupt_trajectory(gt, CorruptionConfig{.n_outliers = 10}, rng);
  REQUIRE(ten.outlier_indices.size() == 10);
  CHECK(std::is_sorted(ten.outlier_indices.begin(), ten.outlier_indices.end()));
  CHECK(std::adjacent_find(ten.outlier_indices.begin(), ten.outlier_indices.end()) == ten.outlier_indices.end());
  const Sim3Transform T = align_dte(gt, ten.estimate).transform;
  int gross = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool listed = std::binary_search(ten.outlier_indices.begin(), ten.outlier_indices.end(), i);
    if (listed) {
      if ((gt.positions[i] - T.apply(ten.estimate.positions[i])).norm() > 1.0) ++gross;
    } else {
      // non-outliers untouched bit for bit
      CHECK(ten.estimate.positions[i] == gt.positions[i]);
      CHECK(ten.estimate.orientations[i] == gt.orientations[i]);
    }
  }
  // a random point in the 10-cube lands within 1 of its gt position rarely
  CHECK(gross >= 9);

  const Corruption moved = corrupt_trajectory(gt, CorruptionConfig{.apply_random_sim3 = true}, rng);
  REQUIRE(moved.sim3.has_value());
  CHECK(compute_ate(gt, moved.estimate) < 1e-9);

  CHECK_THROWS_AS(corrupt_trajectory(gt, CorruptionConfig{.n_outliers = 101}, rng), Error);
  CHECK_THROWS_AS(corrupt_trajectory(gt, CorruptionConfig{.sigma_pos = -1}, rng), Error);

  const CorruptionConfig seeded{.sigma_pos = 0.1, .sigma_rot_deg = 5, .n_outliers = 3, .seed = 77};
  CHECK(corrupt_trajectory(gt, seeded).estimate.positions == corrupt_trajectory(gt, seeded).estimate.positions);
}

TEST_CASE("normalize_by_max") {
  Matrix m(2, 2);
  m << 1, 2, 4, 0;
  const Matrix n = normalize_by_max(m);
  CHECK(n(1, 0) == 1.0);
  CHECK(n(0, 0) == 0.25);
  CHECK(normalize_by_max(Matrix::Zero(3, 3)).isZero());
}

TEST_CASE("translation grid on a single clean cell") {
  GridSpec spec;
  spec.noise_levels = {0.0};
  spec.outlier_counts = {0};
  spec.runs = 1;
  spec.rotation_noise_deg = 0.0;
  const GridResult r = run_translation_grid(spec);
  for (const std::string& m : translation_grid_metrics()) {
    CHECK(r.normalized.at(m)(0, 0) == 0.0);
    CHECK(r.raw_mean.at(m)(0, 0) < 1e-6);
  }
}

TEST_CASE("translation grid structure and determinism") {
  const GridSpec spec = small_grid(GridSpec::translation_defaults());
  const GridResult a = run_translation_grid(spec);
  CHECK(a.metrics == translation_grid_metrics());
  for (const std::string& m : a.metrics) {
    const Matrix& n = a.normalized.at(m);
    CHECK(n.rows() == 3);
    CHECK(n.cols() == 4);
    CHECK(n.minCoeff() >= 0.0);
    CHECK(n.maxCoeff() <= 1.0);
    REQUIRE(a.raw.at(m).size() == 3);
    Matrix avg = Matrix::Zero(3, 4);
    for (const Matrix& run : a.raw.at(m)) {
      const Matrix nr = normalize_by_max(run);
      CHECK(nr.maxCoeff() == 1.0);
      avg += nr;
    }
    CHECK((avg / 3.0 - n).cwiseAbs().maxCoeff() < 1e-14);
  }
  // thread count never changes the bits
  GridSpec one = spec, many = spec;
  one.threads = 1;
  many.threads = 4;
  const GridResult b = run_translation_grid(one);
  const GridResult c = run_translation_grid(many);
  for (const std::string& m : a.metrics) {
    CHECK(b.normalized.at(m) == a.normalized.at(m));
    CHECK(c.normalized.at(m) == a.normalized.at(m));
  }
  GridSpec subset = spec;
  subset.metric_set = {"DTE"};
  const GridResult d = run_translation_grid(subset);
  CHECK(d.metrics == std::vector<std::string>{"DTE"});
  CHECK(d.normalized.at("DTE") == a.normalized.at("DTE"));
}

TEST_CASE("rotation grid") {
  GridSpec clean;
  clean.noise_levels = {0.0};
  clean.outlier_counts = {0};
  clean.runs = 2;
  const GridResult z = run_rotation_grid(clean);
  for (const std::string& m : rotation_grid_metrics()) CHECK(z.raw_mean.at(m)(0, 0) < 1e-6);

  const GridSpec spec = small_grid(GridSpec::rotation_defaults());
  const GridResult r = run_rotation_grid(spec);
  CHECK(r.metrics == rotation_grid_metrics());
  for (std::size_t run = 0; run < spec.runs; ++run) {
    const Matrix expected = 0.5 * (r.raw.at("Mean-1")[run] + r.raw.at("RMS-1")[run]);
    CHECK((r.raw.at("DRE")[run] - expected).cwiseAbs().maxCoeff() <= 1e-9);
  }
  CHECK(run_rotation_grid(spec).normalized.at("DRE") == r.normalized.at("DRE"));
}

TEST_CASE("grid validation") {
  GridSpec spec = GridSpec::translation_defaults();
  spec.noise_levels.clear();
  CHECK_THROWS_AS(run_translation_grid(spec), Error);
  spec = GridSpec::translation_defaults();
  spec.n_poses = 5;
  CHECK_THROWS_AS(run_translation_grid(spec), Error);
  spec = GridSpec::translation_defaults();
  spec.metric_set = {"nope"};
  CHECK_THROWS_AS(run_translation_grid(spec), Error);
}

TEST_CASE("defaults match the published axes") {
  const GridSpec t = GridSpec::translation_defaults();
  REQUIRE(t.noise_levels.size() == 11);
  CHECK(t.noise_levels.back() == doctest::Approx(0.1));
  CHECK(t.noise_levels[3] == doctest::Approx(0.03));
  CHECK(t.outlier_counts.size() == 11);
  CHECK(t.outlier_counts.back() == 10);
  CHECK(t.runs == 100);
  CHECK(t.n_poses == 100);
  const GridSpec r = GridSpec::rotation_defaults();
  CHECK(r.noise_levels.back() == 10.0);
}

TEST_CASE("calibration sweep") {
  SweepSpec spec;
  spec.values = {0.0, 5.0};
  spec.fixed_outliers = 0;
  spec.trials = 3;
  spec.n_poses = 30;
  spec.calibration.samples_per_round = 150;
  spec.with_gt_seed = true;
  const std::vector<SweepRow> rows = run_calibration_sweep(spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].median < 0.05);
  CHECK(rows[0].errors_deg.size() == 3);
  CHECK(rows[0].q1 <= rows[0].median);
  CHECK(rows[0].median <= rows[0].q3);
  CHECK(rows[0].q3 <= rows[0].max);
  CHECK(rows[1].gt_seed_diff_deg.size() == 3);
  SweepSpec threaded = spec;
  threaded.threads = 3;
  const std::vector<SweepRow> again = run_calibration_sweep(threaded);
  CHECK(again[1].errors_deg == rows[1].errors_deg);

  SweepSpec bad = spec;
  bad.axis = SweepAxis::kOutliers;
  bad.values = {2.5};
  CHECK_THROWS_AS(run_calibration_sweep(bad), Error);
}

TEST_CASE("load_and_prepare_real_gt") {
  Rng rng(5);
  PoseSequence seq = generate_ground_truth(50, 3.0, rng);
  std::vector<double> ts;
  for (int i = 0; i < 50; ++i) ts.push_back(0.1 * i + 0.013 * (i % 3));
  seq.timestamps = ts;
  for (Vec3& p : seq.positions) p = 4.0 * p + Vec3(10, -3, 2);

  const PoseSequence all = load_and_prepare_real_gt(seq, 0.0);
  CHECK(all.size() == 50);
  Vec3 lo = all.positions[0], hi = all.positions[0];
  for (const Vec3& p : all.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  CHECK(std::abs((hi - lo).maxCoeff() - 1.0) < 1e-9);
  CHECK((lo + hi).norm() < 1e-9);

  const PoseSequence half = load_and_prepare_real_gt(seq, 0.5);
  const std::vector<double>& kept = *half.timestamps;
  CHECK(kept.front() == ts.front());
  for (std::size_t i = 1; i < kept.size(); ++i) CHECK(kept[i] - kept[i - 1] >= 0.5);
  // greedy: every dropped pose is within 0.5 s of the last kept one
  std::size_t k = 0;
  for (double t : ts) {
    if (k + 1 < kept.size() && t == kept[k + 1]) ++k;
    else if (t != kept[k]) CHECK(t - kept[k] < 0.5);
  }

  PoseSequence bare = seq;
  bare.timestamps.reset();
  CHECK_THROWS_AS(load_and_prepare_real_gt(bare, 0.5), Error);
}

TEST_CASE("parallel helpers") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; }, 4);
  CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  try {
    parallel_for(100, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error("fail " + std::to_string(i));
    }, 3);
    FAIL("expected throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 17");
  }
  Rng a = make_stream(1, 2, 3), b = make_stream(1, 2, 3), c = make_stream(1, 3, 2);
  CHECK(a() == b());
  CHECK(make_stream(1, 2, 3)() != c());
  CHECK(default_thread_count() >= 1);
}
