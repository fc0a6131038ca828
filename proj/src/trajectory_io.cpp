#include "dte/trajectory_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "dte/error.hpp"

namespace dte {
namespace {

using nlohmann::json;

bool parse_number(const std::string& token, double& value) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && std::isfinite(value);
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": " + what);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Viridis anchors at t = 0, 0.25, 0.5, 0.75, 1.
std::string viridis(double t) {
  static const double anchors[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double pos = t * 4.0;
  const int i = std::min(3, static_cast<int>(pos));
  const double f = pos - i;
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c])));
  }
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

json transform_to_json(const Sim3Transform& T) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(T.rotation(r, c));
  }
  return {{"scale", T.scale},
          {"rotation", rot},
          {"translation", {T.translation.x(), T.translation.y(), T.translation.z()}}};
}

Sim3Transform transform_from_json(const json& j) {
  Sim3Transform T;
  T.scale = j.at("scale").get<double>();
  const auto& rot = j.at("rotation");
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) T.rotation(r, c) = rot.at(static_cast<std::size_t>(3 * r + c)).get<double>();
  }
  const auto& t = j.at("translation");
  T.translation = Vec3(t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>());
  return T;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

PoseSequence parse_pose_file(std::istream& in, std::vector<std::string>* warnings) {
  std::vector<PoseRecord> records;
  std::vector<std::size_t> record_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;

    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.size() != 8) {
      parse_error(line_no, "expected 8 fields (timestamp tx ty tz qx qy qz qw), got " +
                               std::to_string(tokens.size()));
    }
    double v[8];
    for (int i = 0; i < 8; ++i) {
      if (!parse_number(tokens[static_cast<std::size_t>(i)], v[i])) {
        parse_error(line_no, "invalid number '" + tokens[static_cast<std::size_t>(i)] + "'");
      }
    }
    PoseRecord rec;
    rec.timestamp = v[0];
    rec.position = Vec3(v[1], v[2], v[3]);
    rec.quaternion = Eigen::Vector4d(v[4], v[5], v[6], v[7]);
    const double qn = rec.quaternion.norm();
    if (!(qn > 0.0)) parse_error(line_no, "zero quaternion");
    if (std::abs(qn - 1.0) > 1e-3 && warnings) {
      warnings->push_back("line " + std::to_string(line_no) + ": quaternion norm " + format_double(qn) +
                          " renormalized");
    }
    rec.quaternion /= qn;
    records.push_back(rec);
    record_lines.push_back(line_no);
  }
  if (records.empty()) throw Error(ErrorKind::kParse, "pose file contains no poses");

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return records[a].timestamp < records[b].timestamp; });

  PoseSequence seq;
  std::vector<double> ts;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const PoseRecord& rec = records[order[k]];
    if (k > 0 && rec.timestamp == ts.back()) {
      parse_error(record_lines[order[k]], "duplicate timestamp " + format_double(rec.timestamp));
    }
    ts.push_back(rec.timestamp);
    seq.positions.push_back(rec.position);
    seq.orientations.push_back(
        quaternion_to_rotation(rec.quaternion[0], rec.quaternion[1], rec.quaternion[2], rec.quaternion[3]));
  }
  seq.timestamps = std::move(ts);
  return seq;
}

PoseSequence read_pose_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  try {
    return parse_pose_file(in, warnings);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_pose_file(std::ostream& out, const PoseSequence& seq) {
  seq.validate();
  out << "# timestamp tx ty tz qx qy qz qw\n";
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const double t = seq.timestamps ? (*seq.timestamps)[i] : static_cast<double>(i);
    const Eigen::Vector4d q = seq.has_orientations() ? rotation_to_quaternion(seq.orientations[i])
                                                     : Eigen::Vector4d(0.0, 0.0, 0.0, 1.0);
    const Vec3& p = seq.positions[i];
    out << format_double(t) << ' ' << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z()) << ' ' << format_double(q[0]) << ' ' << format_double(q[1]) << ' '
        << format_double(q[2]) << ' ' << format_double(q[3]) << '\n';
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing pose file");
}

std::pair<PoseSequence, PoseSequence> associate(const PoseSequence& gt, const PoseSequence& est,
                                                const AssociationPolicy& policy) {
  if (!(policy.max_time_diff > 0.0)) throw_invalid("association: max_time_diff must be positive");
  if (!gt.timestamps || !est.timestamps) throw_invalid("association: both sequences need timestamps");
  gt.validate();
  est.validate();
  const std::vector<double>& tg = *gt.timestamps;
  const std::vector<double>& te = *est.timestamps;

  struct Candidate {
    double diff;
    std::size_t gi;
    std::size_t ei;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < tg.size(); ++i) {
    auto it = std::lower_bound(te.begin(), te.end(), tg[i] - policy.max_time_diff);
    for (; it != te.end() && *it <= tg[i] + policy.max_time_diff; ++it) {
      candidates.push_back({std::abs(*it - tg[i]), i, static_cast<std::size_t>(it - te.begin())});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.diff, a.gi, a.ei) < std::tie(b.diff, b.gi, b.ei);
  });

  std::vector<bool> gt_used(tg.size(), false);
  std::vector<bool> est_used(te.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const Candidate& c : candidates) {
    if (gt_used[c.gi] || est_used[c.ei]) continue;
    gt_used[c.gi] = est_used[c.ei] = true;
    pairs.emplace_back(c.gi, c.ei);
  }
  if (pairs.empty()) {
    throw_invalid("association: no timestamp pairs within " + format_double(policy.max_time_diff) + " s");
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<std::size_t> gi, ei;
  for (const auto& [g, e] : pairs) {
    gi.push_back(g);
    ei.push_back(e);
  }
  return {subset(gt, gi), subset(est, ei)};
}

void write_matrix_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels, const std::string& corner) {
  if (static_cast<Eigen::Index>(row_labels.size()) != m.rows() ||
      static_cast<Eigen::Index>(col_labels.size()) != m.cols()) {
    throw_invalid("write_matrix_csv: label count does not match matrix shape");
  }
  out << csv_field(corner);
  for (const std::string& c : col_labels) out << ',' << csv_field(c);
  out << "\r\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << csv_field(row_labels[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << format_double(m(r, c));
    out << "\r\n";
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing CSV");
}

std::vector<std::string> grid_row_labels(const GridResult& result) {
  std::vector<std::string> labels;
  for (std::size_t o : result.spec.outlier_counts) labels.push_back(std::to_string(o));
  return labels;
}

std::vector<std::string> grid_col_labels(const GridResult& result) {
  std::vector<std::string> labels;
  for (double s : result.spec.noise_levels) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", s);
    labels.push_back(buf);
  }
  return labels;
}

void write_grid_csv(std::ostream& out, const GridResult& result, const std::string& metric, bool normalized) {
  const auto& table = normalized ? result.normalized : result.raw_mean;
  const auto it = table.find(metric);
  if (it == table.end()) throw_invalid("write_grid_csv: metric '" + metric + "' not in result");
  write_matrix_csv(out, it->second, grid_row_labels(result), grid_col_labels(result), "outliers\\noise");
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::string& axis_name) {
  const bool gt_seed = !rows.empty() && !rows.front().gt_seed_diff_deg.empty();
  out << csv_field(axis_name) << ",median_deg,q1_deg,q3_deg,max_deg";
  if (gt_seed) out << ",gt_seed_median_deg,gt_seed_max_deg";
  out << "\r\n";
  for (const SweepRow& row : rows) {
    out << format_double(row.value) << ',' << format_double(row.median) << ',' << format_double(row.q1) << ','
        << format_double(row.q3) << ',' << format_double(row.max);
    if (gt_seed) out << ',' << format_double(row.gt_seed_median) << ',' << format_double(row.gt_seed_max);
    out << "\r\n";
  }
  if (!out) throw Error(ErrorKind::kIo, "failed writing CSV");
}

void write_report_json(std::ostream& out, const MetricReport& report) {
  const RotationErrorTable& t = report.rotation_table;
  json j = {
      {"n_poses", report.n_poses},
      {"ate", report.ate},
      {"dte", report.dte},
      {"dte_mean", report.dte_mean},
      {"dte_rms", report.dte_rms},
      {"dre_deg", report.dre_deg},
      {"params", {{"k", report.k}, {"alpha", report.alpha}}},
      {"rotation_table_deg",
       {{"median1", t.median1}, {"mean1", t.mean1}, {"rms1", t.rms1},
        {"median2", t.median2}, {"mean2", t.mean2}, {"rms2", t.rms2}}},
      {"alignments", {{"ate", transform_to_json(report.ate_alignment)},
                      {"dte", transform_to_json(report.dte_alignment)}}},
  };
  if (report.trace) {
    j["per_pose"] = {{"ate_distances", report.trace->ate_distances},
                     {"dte_distances", report.trace->dte_distances},
                     {"dte_normalized", report.trace->dte_normalized},
                     {"rotation_errors_deg", report.trace->rotation_errors_deg}};
  }
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "failed writing JSON");
}

MetricReport read_report_json(std::istream& in) {
  try {
    const json j = json::parse(in);
    MetricReport r;
    r.n_poses = j.at("n_poses").get<std::size_t>();
    r.ate = j.at("ate").get<double>();
    r.dte = j.at("dte").get<double>();
    r.dte_mean = j.at("dte_mean").get<double>();
    r.dte_rms = j.at("dte_rms").get<double>();
    r.dre_deg = j.at("dre_deg").get<double>();
    r.k = j.at("params").at("k").get<double>();
    r.alpha = j.at("params").at("alpha").get<double>();
    const json& t = j.at("rotation_table_deg");
    r.rotation_table = {t.at("median1").get<double>(), t.at("mean1").get<double>(), t.at("rms1").get<double>(),
                        t.at("median2").get<double>(), t.at("mean2").get<double>(), t.at("rms2").get<double>()};
    r.ate_alignment = transform_from_json(j.at("alignments").at("ate"));
    r.dte_alignment = transform_from_json(j.at("alignments").at("dte"));
    if (j.contains("per_pose")) {
      const json& p = j.at("per_pose");
      PoseTrace& trace = r.trace.emplace();
      p.at("ate_distances").get_to(trace.ate_distances);
      p.at("dte_distances").get_to(trace.dte_distances);
      p.at("dte_normalized").get_to(trace.dte_normalized);
      p.at("rotation_errors_deg").get_to(trace.rotation_errors_deg);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("report JSON: ") + e.what());
  }
}

void write_heatmap_svg(std::ostream& out, const Matrix& m, const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels, const std::string& title) {
  if (static_cast<Eigen::Index>(row_labels.size()) != m.rows() ||
      static_cast<Eigen::Index>(col_labels.size()) != m.cols()) {
    throw_invalid("write_heatmap_svg: label count does not match matrix shape");
  }
  constexpr int kCell = 32;
  constexpr int kLeft = 60;
  constexpr int kTop = 40;
  const int width = kLeft + static_cast<int>(m.cols()) * kCell + 20;
  const int height = kTop + static_cast<int>(m.rows()) * kCell + 60;
  const double lo = m.size() ? m.minCoeff() : 0.0;
  const double hi = m.size() ? m.maxCoeff() : 0.0;
  const double span = hi - lo;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
      << "\">\n"
      << "<text x=\"" << kLeft << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(title)
      << "</text>\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const int y = kTop + static_cast<int>(r) * kCell;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + kCell / 2 + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << xml_escape(row_labels[static_cast<std::size_t>(r)]) << "</text>\n";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double t = span > 0.0 ? (m(r, c) - lo) / span : 0.0;
      out << "<rect class=\"cell\" x=\"" << kLeft + static_cast<int>(c) * kCell << "\" y=\"" << y
          << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\"" << viridis(t) << "\"><title>"
          << format_double(m(r, c)) << "</title></rect>\n";
    }
  }
  const int label_y = kTop + static_cast<int>(m.rows()) * kCell + 14;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out << "<text x=\"" << kLeft + static_cast<int>(c) * kCell + kCell / 2 << "\" y=\"" << label_y
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
        << xml_escape(col_labels[static_cast<std::size_t>(c)]) << "</text>\n";
  }
  out << "<text x=\"" << kLeft << "\" y=\"" << label_y + 24
      << "\" font-family=\"sans-serif\" font-size=\"11\">min " << format_double(lo) << "  max "
      << format_double(hi) << "</text>\n"
      << "</svg>\n";
  if (!out) throw Error(ErrorKind::kIo, "failed writing SVG");
}

}  // namespace dte
