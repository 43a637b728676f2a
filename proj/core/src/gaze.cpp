#include "gfk/gaze.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <string>

#include "gfk/error.hpp"
#include "gfk/log.hpp"

namespace gfk {
namespace {

using nlohmann::json;

double number_field(const json& obj, const char* key, const char* log_name, std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number())
    fail(Errc::parse, fmt::format("{} line {}: missing or non-numeric \"{}\"", log_name, line_no, key));
  return it->get<double>();
}

template <typename Fn>
void for_each_record(std::istream& in, const char* log_name, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(Errc::parse, fmt::format("{} line {}: {}", log_name, line_no, e.what()));
    }
    if (!obj.is_object()) fail(Errc::parse, fmt::format("{} line {}: expected a JSON object", log_name, line_no));
    fn(obj, line_no);
  }
}

template <typename T>
bool sort_by_time(std::vector<T>& v) {
  const auto by_t = [](const T& a, const T& b) { return a.t < b.t; };
  if (std::is_sorted(v.begin(), v.end(), by_t)) return false;
  std::stable_sort(v.begin(), v.end(), by_t);
  return true;
}

}  // namespace

std::optional<double> estimate_frequency(const std::vector<GazeSample>& samples) {
  std::vector<double> rates;
  rates.reserve(samples.size());
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dt = samples[i].t - samples[i - 1].t;
    if (dt > 0.0) rates.push_back(1.0 / dt);
  }
  if (rates.empty()) return std::nullopt;
  const std::size_t mid = rates.size() / 2;
  std::nth_element(rates.begin(), rates.begin() + static_cast<std::ptrdiff_t>(mid), rates.end());
  if (rates.size() % 2 == 1) return rates[mid];
  const double upper = rates[mid];
  const double lower = *std::max_element(rates.begin(), rates.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

GazeSession parse_session(std::istream& gaze_log, std::istream& viewport_log) {
  GazeSession s;
  bool first = true;
  for_each_record(gaze_log, "gaze log", [&](const json& obj, std::size_t line_no) {
    const bool header = first && obj.contains("f_nominal") && !obj.contains("t");
    first = false;
    if (header) {
      s.f_nominal = number_field(obj, "f_nominal", "gaze log", line_no);
      if (!(*s.f_nominal > 0.0)) fail(Errc::parse, fmt::format("gaze log line {}: f_nominal must be positive", line_no));
      return;
    }
    const double t = number_field(obj, "t", "gaze log", line_no);
    const auto sx = obj.find("sx");
    const auto sy = obj.find("sy");
    if (sx == obj.end() || sy == obj.end() || sx->is_null() || sy->is_null()) {
      ++s.dropouts;
      return;
    }
    if (!sx->is_number() || !sy->is_number())
      fail(Errc::parse, fmt::format("gaze log line {}: sx/sy must be numbers", line_no));
    s.samples.push_back({t, sx->get<double>(), sy->get<double>()});
  });

  first = true;
  for_each_record(viewport_log, "viewport log", [&](const json& obj, std::size_t line_no) {
    const bool header = first && !obj.contains("t");
    first = false;
    if (header) {
      if (obj.contains("f_nominal") && !s.f_nominal) s.f_nominal = number_field(obj, "f_nominal", "viewport log", line_no);
      return;
    }
    ViewportState v;
    v.t = number_field(obj, "t", "viewport log", line_no);
    const auto z = obj.find("z");
    if (z == obj.end() || !z->is_number_integer())
      fail(Errc::parse, fmt::format("viewport log line {}: missing or non-integer \"z\"", line_no));
    v.z = z->get<int>();
    v.zoom = number_field(obj, "zoom", "viewport log", line_no);
    v.px_pitch = number_field(obj, "px_pitch", "viewport log", line_no);
    const auto pan = obj.find("pan");
    const auto win = obj.find("win");
    if (pan == obj.end() || !pan->is_array() || pan->size() != 2)
      fail(Errc::parse, fmt::format("viewport log line {}: \"pan\" must be [px, py]", line_no));
    if (win == obj.end() || !win->is_array() || win->size() != 4)
      fail(Errc::parse, fmt::format("viewport log line {}: \"win\" must be [left, top, width, height]", line_no));
    try {
      v.pan_x = (*pan)[0].get<double>();
      v.pan_y = (*pan)[1].get<double>();
      v.win = {(*win)[0].get<double>(), (*win)[1].get<double>(), (*win)[2].get<double>(), (*win)[3].get<double>()};
    } catch (const json::exception& e) {
      fail(Errc::parse, fmt::format("viewport log line {}: {}", line_no, e.what()));
    }
    if (const auto a = obj.find("annotating"); a != obj.end()) {
      if (!a->is_boolean()) fail(Errc::parse, fmt::format("viewport log line {}: \"annotating\" must be boolean", line_no));
      v.annotating = a->get<bool>();
    }
    if (!(v.zoom > 0.0) || !(v.px_pitch > 0.0) || !(v.win.width > 0.0) || !(v.win.height > 0.0))
      fail(Errc::parse, fmt::format("viewport log line {}: zoom, px_pitch and window size must be positive", line_no));
    s.states.push_back(v);
  });

  if (s.samples.empty()) fail(Errc::empty_session, "gaze log contains no samples");
  if (sort_by_time(s.samples)) {
    s.warnings.push_back("gaze samples were out of order and have been sorted");
  }
  if (sort_by_time(s.states)) {
    s.warnings.push_back("viewport states were out of order and have been sorted");
  }

  if (auto f = estimate_frequency(s.samples)) {
    s.f = *f;
  } else if (s.f_nominal) {
    s.f = *s.f_nominal;
  } else {
    fail(Errc::parse, "cannot estimate sampling frequency: fewer than two distinct timestamps and no f_nominal header");
  }
  for (const auto& w : s.warnings) log::warn(w);
  return s;
}

GazeSession parse_session(const std::filesystem::path& gaze_log, const std::filesystem::path& viewport_log) {
  std::ifstream g(gaze_log);
  if (!g) fail(Errc::io, fmt::format("cannot open gaze log {}", gaze_log.string()));
  std::ifstream v(viewport_log);
  if (!v) fail(Errc::io, fmt::format("cannot open viewport log {}", viewport_log.string()));
  return parse_session(g, v);
}

Index3 screen_to_voxel(const ViewportState& state, double sx, double sy) {
  return {static_cast<int>(std::floor((sx - state.win.left) / state.zoom + state.pan_x)),
          static_cast<int>(std::floor((sy - state.win.top) / state.zoom + state.pan_y)), state.z};
}

std::vector<VoxelGazePoint> map_to_voxels(const GazeSession& session, const LungMask& mask) {
  std::vector<VoxelGazePoint> out;
  if (session.samples.empty()) return out;
  if (session.states.empty() || session.states.front().t > session.samples.front().t)
    fail(Errc::session_alignment, fmt::format("no viewport state precedes the first gaze sample at t={}",
                                              session.samples.front().t));
  out.reserve(session.samples.size());
  std::size_t k = 0;
  for (const GazeSample& g : session.samples) {
    while (k + 1 < session.states.size() && session.states[k + 1].t <= g.t) ++k;
    const ViewportState& st = session.states[k];
    if (st.annotating || !st.win.contains(g.sx, g.sy)) continue;
    const Index3 v = screen_to_voxel(st, g.sx, g.sy);
    if (!mask.contains(v)) continue;
    out.push_back({g.t, v.x, v.y, v.z, k});
  }
  return out;
}

void write_gaze_log(std::ostream& out, const std::vector<GazeSample>& samples, std::optional<double> f_nominal) {
  if (f_nominal) out << json{{"f_nominal", *f_nominal}}.dump() << '\n';
  for (const auto& g : samples) {
    nlohmann::ordered_json rec;
    rec["t"] = g.t;
    if (std::isnan(g.sx) || std::isnan(g.sy)) {
      rec["sx"] = nullptr;
      rec["sy"] = nullptr;
    } else {
      rec["sx"] = g.sx;
      rec["sy"] = g.sy;
    }
    out << rec.dump() << '\n';
  }
}

void write_viewport_log(std::ostream& out, const std::vector<ViewportState>& states) {
  for (const auto& v : states) {
    nlohmann::ordered_json rec;
    rec["t"] = v.t;
    rec["z"] = v.z;
    rec["zoom"] = v.zoom;
    rec["pan"] = {v.pan_x, v.pan_y};
    rec["win"] = {v.win.left, v.win.top, v.win.width, v.win.height};
    rec["px_pitch"] = v.px_pitch;
    rec["annotating"] = v.annotating;
    out << rec.dump() << '\n';
  }
}

}  // namespace gfk
