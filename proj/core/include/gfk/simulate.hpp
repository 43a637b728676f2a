#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gfk/gaze.hpp"
#include "gfk/model.hpp"
#include "gfk/phantom.hpp"
#include "gfk/volume.hpp"

namespace gfk {

struct DisplayConfig {
  double zoom = 0.0;  // screen px per voxel; 0 fits the slice to the window
  double px_pitch = 0.248;
  ScreenRect window{100.0, 50.0, 800.0, 800.0};
};

struct SimConfig {
  std::uint64_t seed = 1;
  int n_scans = 20;
  int n_annotators = 4;
  PhantomOptions phantom;
  double noise_hu = 15.0;

  int nodules_min = 1;
  int nodules_max = 3;
  double nodule_radius_min_mm = kNoduleMinRadiusMm;
  double nodule_radius_max_mm = 4.5;
  double non_nodules_per_scan = 0.3;
  int raters = 4;

  double reading_time_mean = 181.0;
  double reading_time_sd = 84.0;
  double reading_time_min = 40.0;
  double right_first_fraction = 0.95;
  double right_left_time_ratio = 1.2;

  // P(detect) = clamp(base + slope * planned normalized dwell time)
  double human_sensitivity_base = 0.09;
  double attention_sensitivity_slope = 5.0;
  double nodule_dwell_max = 0.25;
  double fp_dwell_min = 0.01;
  double fp_dwell_max = 0.08;
  double annotation_fraction = 0.015;  // of T per annotation
  double human_fp_rate = 0.34;
  double non_nodule_mark_probability = 0.5;

  double cade_sensitivity = 0.69;  // at human_fp_rate false candidates per scan
  double cade_fp_per_scan = 3.0;
  double cade_fp_score_max = 0.8;
  double cade_tp_score_min = 0.6;
  double cade_duplicate_probability = 0.3;
  double cade_outside_per_scan = 0.5;
  double cade_non_nodule_probability = 0.3;

  double f = 90.0;
  double dropout_rate = 0.01;
  double fixation_s = 0.25;
  DisplayConfig display;

  /// Throws Errc::configuration for out-of-range or infeasible settings.
  void validate() const;
  double zoom() const;
  /// Score threshold at which false candidates per scan equal human_fp_rate.
  double cade_reference_threshold() const;
  /// Per-nodule detection probability giving cade_sensitivity at that threshold.
  double cade_detect_probability() const;
  double detection_probability(double dwell_fraction) const;
};

std::string sim_scan_id(int index);
std::string sim_annotator_id(int index);

/// One generator per (scan, annotator) session; annotator -1 for scan-level draws.
std::mt19937_64 sim_rng(const SimConfig& cfg, int scan_index, int annotator_index, std::uint64_t stream);

struct ScanPlan {
  std::string scan_id;
  int index = 0;
  Phantom phantom;
  std::vector<NoduleTruth> nodules;
  std::vector<NonNodule> non_nodules;
};

/// Shared anatomy; lesions and vessels are drawn per scan.
Phantom sim_anatomy(const SimConfig& cfg);
ScanPlan plan_scan(const SimConfig& cfg, const Phantom& anatomy, int index);

/// Raw CADe output for one scan (before lung filtering and merging).
std::vector<Candidate> simulate_cade(const SimConfig& cfg, const ScanPlan& scan);

enum class DwellKind { nodule, false_positive, non_nodule };

struct Dwell {
  DwellKind kind = DwellKind::nodule;
  std::string finding_id;
  Vec3 center_mm;
  LungSide side = LungSide::Right;
  double fraction = 0.0;  // of the reading time
  bool annotate = false;
};

struct ReaderPlan {
  std::string scan_id;
  std::string annotator;
  double reading_time = 0.0;
  bool right_first = true;
  std::vector<Dwell> dwells;
  std::vector<Mark> marks;
};

ReaderPlan simulate_reader(const SimConfig& cfg, const ScanPlan& scan, int annotator_index, std::mt19937_64& rng);

struct SessionLogs {
  std::vector<GazeSample> samples;  // dropouts carry NaN coordinates
  std::vector<ViewportState> states;
};

/// Drilling search: the first side scrolled down, the other side down and back up,
/// then the first side back up, with dwells inserted when a finding's slice is reached.
SessionLogs synthesize_gaze(const SimConfig& cfg, const ScanPlan& scan, const LungMask& mask, const ReaderPlan& plan,
                            std::mt19937_64& rng);

/// Parses logs as a reader would see them (dropouts removed).
GazeSession to_session(const SessionLogs& logs, double f_nominal);

struct SimSession {
  ReaderPlan plan;
  SessionLogs logs;
};

struct SimStudy {
  SimConfig cfg;
  Phantom anatomy;
  std::vector<ScanPlan> scans;
  GroundTruth truth;
  std::vector<Mark> marks;
  std::vector<Candidate> candidates;
  std::vector<SimSession> sessions;  // scan-major, annotator-minor

  std::vector<std::string> scan_ids() const;
};

/// Full study. Gaze logs are synthesized only when `with_gaze` is set.
SimStudy simulate_study(const SimConfig& cfg, bool with_gaze, const LungMask* mask = nullptr);

}  // namespace gfk
