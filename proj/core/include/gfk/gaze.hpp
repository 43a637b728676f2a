#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gfk/volume.hpp"

namespace gfk {

struct GazeSample {
  double t = 0.0;   // seconds since session start
  double sx = 0.0;  // absolute screen pixels
  double sy = 0.0;
};

struct ScreenRect {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  // half-open: the right and bottom edges are outside
  bool contains(double sx, double sy) const {
    return sx >= left && sy >= top && sx < left + width && sy < top + height;
  }
};

/// Axial view configuration in effect from `t` until the next state.
struct ViewportState {
  double t = 0.0;
  int z = 0;
  double zoom = 1.0;   // screen pixels per scan voxel
  double pan_x = 0.0;  // scan voxel shown at the window's top-left corner
  double pan_y = 0.0;
  ScreenRect win;
  double px_pitch = 0.25;  // monitor mm per screen pixel
  bool annotating = false;
};

struct GazeSession {
  std::vector<GazeSample> samples;     // sorted by t, dropouts removed
  std::vector<ViewportState> states;   // sorted by t
  double f = 0.0;                      // estimated sampling frequency (Hz)
  std::optional<double> f_nominal;     // declared in the log header, if any
  std::size_t dropouts = 0;            // samples without coordinates
  std::vector<std::string> warnings;

  double start_time() const { return samples.empty() ? 0.0 : samples.front().t; }
  /// Last minus first sample time.
  double reading_time() const { return samples.empty() ? 0.0 : samples.back().t - samples.front().t; }
};

/// Reads JSON-Lines gaze and viewport logs.
GazeSession parse_session(const std::filesystem::path& gaze_log, const std::filesystem::path& viewport_log);
GazeSession parse_session(std::istream& gaze_log, std::istream& viewport_log);

/// Median of the reciprocal positive inter-sample intervals; nullopt with < 2 distinct times.
std::optional<double> estimate_frequency(const std::vector<GazeSample>& sorted_samples);

struct VoxelGazePoint {
  double t = 0.0;
  int x = 0;
  int y = 0;
  int z = 0;
  std::size_t state = 0;  // index into GazeSession::states
};

/// Screen pixel -> scan voxel under one viewport state (floor, no filtering).
Index3 screen_to_voxel(const ViewportState& state, double sx, double sy);

/// Step-aligns samples to viewport states and keeps in-window, non-annotation,
/// in-mask points.
std::vector<VoxelGazePoint> map_to_voxels(const GazeSession& session, const LungMask& mask);

/// Log writers used by the simulator and for tests. A sample with NaN coordinates is
/// written as a dropout (null coordinates).
void write_gaze_log(std::ostream& out, const std::vector<GazeSample>& samples, std::optional<double> f_nominal);
void write_viewport_log(std::ostream& out, const std::vector<ViewportState>& states);

}  // namespace gfk
