#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlog/metrics.hpp"
#include "mlog/pipeline.hpp"
#include "mlog/types.hpp"

// File formats shared by the CLI and tests: JSONL line streams, CSV
// trajectories, JSON error reports. All writers are deterministic for
// identical inputs.

namespace mlog {

/// One trajectory row; the CSV header is exactly
/// `frame,x,y,z,roll_deg,pitch_deg,status`.
struct TrajectoryRecord {
  std::int64_t frame = 0;
  double x = 0.0, y = 0.0, z = 0.0;
  double roll_deg = 0.0, pitch_deg = 0.0;
  std::string status;
};

inline constexpr const char* kTrajectoryHeader = "frame,x,y,z,roll_deg,pitch_deg,status";

/// Serializes one frame of lines as a single JSON object per text line:
/// {"frame": k, "lines": [[rho, theta], ...]}.
std::string line_stream_record(const FrameInput& frame);

/// Writes a whole stream, one record per line.
void write_line_stream(const std::vector<FrameInput>& frames, const std::string& path);

/// Parses a JSONL line stream. Validates rho >= 0 and -pi <= theta < pi and
/// strictly increasing frame indices; throws std::runtime_error naming the
/// offending line number otherwise.
std::vector<FrameInput> read_line_stream(const std::string& path);

void write_trajectory_csv(const std::vector<TrajectoryRecord>& rows,
                          const std::string& path);
std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path);

/// ErrorReport as pretty JSON (stable key order).
std::string report_to_json(const ErrorReport& report);

/// Side-by-side truth/estimate CSV for path plots.
void write_aligned_csv(const std::vector<TrajectoryRecord>& estimate,
                       const std::vector<TrajectoryRecord>& truth,
                       const std::string& path);

std::vector<PoseSample> to_pose_samples(const std::vector<TrajectoryRecord>& rows);

} // namespace mlog
