#include "mlog/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mlog {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

} // namespace

std::string line_stream_record(const FrameInput& frame) {
  nlohmann::ordered_json j;
  j["frame"] = frame.frame_index;
  auto lines = nlohmann::ordered_json::array();
  for (const auto& l : frame.lines) lines.push_back({l.rho, l.theta});
  j["lines"] = std::move(lines);
  if (frame.timestamp) j["t"] = *frame.timestamp;
  return j.dump();
}

void write_line_stream(const std::vector<FrameInput>& frames, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& f : frames) out << line_stream_record(f) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<FrameInput> read_line_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<FrameInput> frames;
  std::string line;
  std::size_t line_no = 0;
  std::int64_t prev_frame = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      line_error(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("frame") || !j.contains("lines"))
      line_error(line_no, "record must have 'frame' and 'lines'");
    FrameInput f;
    if (!j["frame"].is_number_integer()) line_error(line_no, "'frame' must be an integer");
    f.frame_index = j["frame"].get<std::int64_t>();
    if (f.frame_index <= prev_frame)
      line_error(line_no, "frame indices must be strictly increasing");
    prev_frame = f.frame_index;
    if (!j["lines"].is_array()) line_error(line_no, "'lines' must be an array");
    for (const auto& e : j["lines"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        line_error(line_no, "each line must be a [rho, theta] pair");
      const double rho = e[0].get<double>();
      const double theta = e[1].get<double>();
      if (rho < 0.0) line_error(line_no, "rho must be >= 0");
      if (theta < -kPi || theta >= kPi)
        line_error(line_no, "theta must be in [-pi, pi)");
      f.lines.push_back({rho, theta});
    }
    if (j.contains("t") && j["t"].is_number()) f.timestamp = j["t"].get<double>();
    frames.push_back(std::move(f));
  }
  return frames;
}

void write_trajectory_csv(const std::vector<TrajectoryRecord>& rows,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << kTrajectoryHeader << "\n";
  for (const auto& r : rows) {
    out << r.frame << "," << fmt(r.x) << "," << fmt(r.y) << "," << fmt(r.z) << ","
        << fmt(r.roll_deg) << "," << fmt(r.pitch_deg) << "," << r.status << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader)
    throw std::runtime_error(path + ": unexpected header '" + line + "'");
  std::vector<TrajectoryRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) line_error(line_no, "expected 7 fields");
    try {
      TrajectoryRecord r;
      r.frame = std::stoll(fields[0]);
      r.x = std::stod(fields[1]);
      r.y = std::stod(fields[2]);
      r.z = std::stod(fields[3]);
      r.roll_deg = std::stod(fields[4]);
      r.pitch_deg = std::stod(fields[5]);
      r.status = fields[6];
      rows.push_back(std::move(r));
    } catch (const std::exception&) {
      line_error(line_no, "unparseable numeric field");
    }
  }
  return rows;
}

std::string report_to_json(const ErrorReport& report) {
  nlohmann::ordered_json j;
  j["n_frames"] = report.n_frames;
  j["state_order"] = kStateNames;
  nlohmann::ordered_json states;
  for (std::size_t s = 0; s < 5; ++s) {
    nlohmann::ordered_json st;
    st["mean"] = report.mean[s];
    st["rmse"] = report.rmse[s];
    st["sd"] = report.sd[s];
    st["zero_variance"] = report.zero_variance[s];
    states[kStateNames[s]] = std::move(st);
  }
  j["states"] = std::move(states);
  auto corr = nlohmann::ordered_json::array();
  for (std::size_t a = 0; a < 5; ++a) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t b = 0; b < 5; ++b) row.push_back(report.correlation[a][b]);
    corr.push_back(std::move(row));
  }
  j["correlation"] = std::move(corr);
  return j.dump(2);
}

void write_aligned_csv(const std::vector<TrajectoryRecord>& estimate,
                       const std::vector<TrajectoryRecord>& truth,
                       const std::string& path) {
  if (estimate.size() != truth.size())
    throw std::runtime_error("aligned csv: row count mismatch (" +
                             std::to_string(estimate.size()) + " vs " +
                             std::to_string(truth.size()) + ")");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "frame,truth_x,truth_y,truth_z,truth_roll_deg,truth_pitch_deg,"
         "est_x,est_y,est_z,est_roll_deg,est_pitch_deg,status\n";
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& t = truth[i];
    const auto& e = estimate[i];
    if (t.frame != e.frame)
      throw std::runtime_error("aligned csv: frame mismatch at row " + std::to_string(i));
    out << t.frame << "," << fmt(t.x) << "," << fmt(t.y) << "," << fmt(t.z) << ","
        << fmt(t.roll_deg) << "," << fmt(t.pitch_deg) << "," << fmt(e.x) << ","
        << fmt(e.y) << "," << fmt(e.z) << "," << fmt(e.roll_deg) << ","
        << fmt(e.pitch_deg) << "," << e.status << "\n";
  }
}

std::vector<PoseSample> to_pose_samples(const std::vector<TrajectoryRecord>& rows) {
  std::vector<PoseSample> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r.x, r.y, r.z, r.pitch_deg, r.roll_deg});
  return out;
}

} // namespace mlog
