#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gfk/simulate.hpp"
#include "gfk/volume.hpp"

namespace gfk {

/// File layout of a study directory.
///
///   scans/<scan>.mhd                    CT volumes
///   truth.json                          ground truth
///   marks/<annotator>.json              radiologist marks
///   candidates.json                     raw CADe candidates
///   sessions/<annotator>/<scan>.gaze.jsonl, .viewport.jsonl
///   masks/<scan>.mhd                    derived outputs below
///   attention/<annotator>/<scan>.mhd
///   combined/<a>+<b>.json
///   fused/<label>/<annotator>.json
///   eval/<label>.json, eval/<label>.csv
///   analytics/, stats/, report.html
struct StudyLayout {
  std::filesystem::path root;

  std::filesystem::path scans_dir() const { return root / "scans"; }
  std::filesystem::path scan_path(const std::string& scan) const { return scans_dir() / (scan + ".mhd"); }
  std::filesystem::path truth_path() const { return root / "truth.json"; }
  std::filesystem::path marks_dir() const { return root / "marks"; }
  std::filesystem::path marks_path(const std::string& annotator) const { return marks_dir() / (annotator + ".json"); }
  std::filesystem::path candidates_path() const { return root / "candidates.json"; }
  std::filesystem::path sessions_dir() const { return root / "sessions"; }
  std::filesystem::path gaze_path(const std::string& annotator, const std::string& scan) const {
    return sessions_dir() / annotator / (scan + ".gaze.jsonl");
  }
  std::filesystem::path viewport_path(const std::string& annotator, const std::string& scan) const {
    return sessions_dir() / annotator / (scan + ".viewport.jsonl");
  }
  std::filesystem::path masks_dir() const { return root / "masks"; }
  std::filesystem::path mask_path(const std::string& scan) const { return masks_dir() / (scan + ".mhd"); }
  std::filesystem::path attention_dir() const { return root / "attention"; }
  std::filesystem::path attention_path(const std::string& annotator, const std::string& scan) const {
    return attention_dir() / annotator / (scan + ".mhd");
  }
  std::filesystem::path combined_dir() const { return root / "combined"; }
  std::filesystem::path fused_dir() const { return root / "fused"; }
  std::filesystem::path eval_dir() const { return root / "eval"; }
  std::filesystem::path analytics_dir() const { return root / "analytics"; }
  std::filesystem::path stats_dir() const { return root / "stats"; }
  std::filesystem::path report_path() const { return root / "report.html"; }

  /// Stems of scans/*.mhd, sorted.
  std::vector<std::string> scan_ids() const;
  /// Stems of marks/*.json, sorted.
  std::vector<std::string> mark_annotators() const;
  /// Sub-directories of sessions/, sorted.
  std::vector<std::string> session_annotators() const;
};

/// Sorted stems of files in `dir` ending with `suffix`; empty when `dir` is missing.
std::vector<std::string> list_stems(const std::filesystem::path& dir, const std::string& suffix);

LungMask load_mask(const std::filesystem::path& path, bool flip_lr = false);
void save_mask(const std::filesystem::path& path, const LungMask& mask);

/// Writes scans, truth, marks, candidates and gaze/viewport logs of a simulated study.
void write_sim_study(const SimStudy& study, const StudyLayout& layout);

}  // namespace gfk
