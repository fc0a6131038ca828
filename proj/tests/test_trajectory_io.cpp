#include <doctest.h>

#include <sstream>

#include "dte/error.hpp"
#include "dte/simulation.hpp"
#include "dte/trajectory_io.hpp"

using namespace dte;

namespace {

PoseSequence stamped(std::size_t n, std::uint64_t seed, double t0 = 0.0, double dt = 0.1) {
  Rng rng(seed);
  PoseSequence s = generate_ground_truth(n, 2.0, rng);
  std::vector<double> ts;
  for (std::size_t i = 0; i < n; ++i) ts.push_back(t0 + dt * i);
  s.timestamps = ts;
  return s;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t c = 0;
  for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++c;
  return c;
}

}  // namespace

TEST_CASE("parse a single identity pose") {
  std::istringstream in("0 0 0 0 0 0 0 1\n");
  const PoseSequence s = parse_pose_file(in);
  REQUIRE(s.size() == 1);
  CHECK(s.positions[0] == Vec3::Zero());
  CHECK((s.orientations[0] - Mat3::Identity()).norm() == 0.0);
  CHECK((*s.timestamps)[0] == 0.0);
}

TEST_CASE("comments, blank lines, ordering") {
  std::istringstream in(
      "# timestamp tx ty tz qx qy qz qw\n"
      "\n"
      "2.0 1 2 3 0 0 0 1\r\n"
      "   # indented comment\n"
      "1.0\t4 5 6 0 0 0 1\n");
  const PoseSequence s = parse_pose_file(in);
  REQUIRE(s.size() == 2);
  CHECK((*s.timestamps)[0] == 1.0);
  CHECK(s.positions[0] == Vec3(4, 5, 6));
  CHECK(s.positions[1] == Vec3(1, 2, 3));
}

TEST_CASE("parse errors cite the line") {
  std::istringstream seven("0 0 0 0 0 0 0 1\n# c\n1 0 0 0 0 0 1\n");
  try {
    parse_pose_file(seven);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream junk("0 0 0 x 0 0 0 1\n");
  CHECK_THROWS_AS(parse_pose_file(junk), Error);
  std::istringstream empty("# nothing\n\n");
  CHECK_THROWS_AS(parse_pose_file(empty), Error);
  std::istringstream zero_q("0 0 0 0 0 0 0 0\n");
  CHECK_THROWS_AS(parse_pose_file(zero_q), Error);
  std::istringstream dup("1 0 0 0 0 0 0 1\n1 1 1 1 0 0 0 1\n");
  CHECK_THROWS_AS(parse_pose_file(dup), Error);
  std::istringstream nine("0 0 0 0 0 0 0 1 5\n");
  CHECK_THROWS_AS(parse_pose_file(nine), Error);
}

TEST_CASE("non-unit quaternions are renormalized with a warning") {
  std::istringstream in("0 0 0 0 0 0 0 2\n1 0 0 0 0 0 0 1.0000001\n");
  std::vector<std::string> warnings;
  const PoseSequence s = parse_pose_file(in, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(warnings[0].find("line 1") != std::string::npos);
  CHECK((s.orientations[0] - Mat3::Identity()).norm() < 1e-15);
  CHECK(is_rotation(s.orientations[1]));
}

TEST_CASE("write then parse round trip") {
  const PoseSequence s = stamped(50, 1, 1300000000.123456, 0.0333);
  std::stringstream io;
  write_pose_file(io, s);
  const PoseSequence back = parse_pose_file(io);
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK((*back.timestamps)[i] == (*s.timestamps)[i]);
    CHECK(back.positions[i] == s.positions[i]);
    CHECK((back.orientations[i] - s.orientations[i]).cwiseAbs().maxCoeff() <= 1e-12);
  }
  // a second pass keeps positions and stamps exact
  std::stringstream io2;
  write_pose_file(io2, back);
  const PoseSequence again = parse_pose_file(io2);
  CHECK(again.positions == back.positions);
  CHECK(*again.timestamps == *back.timestamps);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK((again.orientations[i] - back.orientations[i]).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("read_pose_file names a missing path") {
  try {
    read_pose_file("/nonexistent/dir/poses.txt");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
    CHECK(std::string(e.what()).find("/nonexistent/dir/poses.txt") != std::string::npos);
  }
}

TEST_CASE("association") {
  const PoseSequence gt = stamped(30, 2);
  const auto [g0, e0] = associate(gt, gt);
  CHECK(g0.size() == 30);
  CHECK(g0.positions == e0.positions);

  PoseSequence shifted = gt;
  for (double& t : *shifted.timestamps) t += 0.01;
  const auto [g1, e1] = associate(gt, shifted, AssociationPolicy{0.02});
  CHECK(g1.size() == 30);
  CHECK(e1.positions == gt.positions);

  for (double& t : *shifted.timestamps) t += 0.04;
  CHECK_THROWS_AS(associate(gt, shifted, AssociationPolicy{0.02}), Error);

  // partial overlap and cardinality symmetry
  const PoseSequence est = stamped(40, 3, 0.505, 0.05);
  const AssociationPolicy p{0.02};
  const auto [ga, ea] = associate(gt, est, p);
  const auto [gb, eb] = associate(est, gt, p);
  CHECK(ga.size() == gb.size());
  CHECK(ga.size() > 0);
  for (std::size_t i = 0; i < ga.size(); ++i) {
    CHECK(std::abs((*ga.timestamps)[i] - (*ea.timestamps)[i]) <= 0.02);
    if (i) CHECK((*ga.timestamps)[i] > (*ga.timestamps)[i - 1]);
  }
  PoseSequence bare = gt;
  bare.timestamps.reset();
  CHECK_THROWS_AS(associate(bare, gt), Error);
  CHECK_THROWS_AS(associate(gt, gt, AssociationPolicy{0.0}), Error);
}

TEST_CASE("association is one-to-one") {
  // two est stamps compete for one gt stamp; the closer wins
  PoseSequence gt = stamped(1, 4, 1.0);
  PoseSequence est = stamped(2, 5, 0.995, 0.01);
  const auto [g, e] = associate(gt, est, AssociationPolicy{0.02});
  REQUIRE(g.size() == 1);
  CHECK((*e.timestamps)[0] == doctest::Approx(1.005));
}

TEST_CASE("matrix and grid CSV") {
  Matrix one(1, 1);
  one << 0.5;
  std::ostringstream out;
  write_matrix_csv(out, one, {"0"}, {"0"});
  CHECK(out.str() == ",0\r\n0,0.5\r\n");

  std::ostringstream quoted;
  write_matrix_csv(quoted, one, {"a,b"}, {"say \"hi\""}, "corner");
  CHECK(quoted.str() == "corner,\"say \"\"hi\"\"\"\r\n\"a,b\",0.5\r\n");

  GridSpec spec;
  spec.noise_levels = {0.0, 0.05};
  spec.outlier_counts = {0, 2};
  spec.runs = 2;
  spec.n_poses = 20;
  const GridResult r = run_translation_grid(spec);
  std::ostringstream grid;
  write_grid_csv(grid, r, "DTE");
  const std::string text = grid.str();
  CHECK(text.rfind("outliers\\noise,0,0.05\r\n", 0) == 0);
  CHECK(count(text, "\r\n") == 3);
  CHECK_THROWS_AS(write_grid_csv(grid, r, "nope"), Error);
}

TEST_CASE("format_double is lossless") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("report JSON round trip") {
  Rng rng(6);
  const PoseSequence gt = generate_ground_truth(30, 1.0, rng);
  const PoseSequence est =
      corrupt_trajectory(gt, CorruptionConfig{.sigma_pos = 0.05, .sigma_rot_deg = 4, .n_outliers = 2}, rng).estimate;
  for (bool per_pose : {false, true}) {
    const MetricReport r = evaluate(gt, est, EvaluationOptions{.per_pose = per_pose});
    std::stringstream io;
    write_report_json(io, r);
    const std::string text = io.str();
    for (const char* key : {"\"ate\"", "\"dte\"", "\"dte_mean\"", "\"dte_rms\"", "\"dre_deg\"", "\"n_poses\"",
                            "\"rotation_table_deg\"", "\"alignments\""}) {
      CHECK(text.find(key) != std::string::npos);
    }
    CHECK(read_report_json(io) == r);
  }
  std::istringstream bad("{\"ate\": 1}");
  CHECK_THROWS_AS(read_report_json(bad), Error);
}

TEST_CASE("heatmap SVG") {
  Matrix m(11, 11);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) m(i, j) = i * 0.1 + j * 0.01;
  std::vector<std::string> labels;
  for (int i = 0; i < 11; ++i) labels.push_back(std::to_string(i));
  std::ostringstream out;
  write_heatmap_svg(out, m, labels, labels, "DTE <normalized>");
  const std::string svg = out.str();
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "class=\"cell\"") == 121);
  CHECK(svg.find("DTE &lt;normalized&gt;") != std::string::npos);
  CHECK(svg.find("min") != std::string::npos);
  CHECK(svg.find("max") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  // constant matrix still renders
  std::ostringstream flat;
  write_heatmap_svg(flat, Matrix::Zero(2, 3), {"a", "b"}, {"x", "y", "z"}, "flat");
  CHECK(count(flat.str(), "class=\"cell\"") == 6);
}

TEST_CASE("sweep CSV") {
  SweepRow row;
  row.value = 5;
  row.errors_deg = {0.1, 0.2, 0.3};
  row.median = 0.2;
  row.q1 = 0.15;
  row.q3 = 0.25;
  row.max = 0.3;
  std::ostringstream out;
  write_sweep_csv(out, {row}, "noise_deg");
  CHECK(out.str().rfind("noise_deg,", 0) == 0);
  CHECK(count(out.str(), "\r\n") == 2);
}
