#include "gfk/study_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>

#include "gfk/error.hpp"
#include "gfk/metaimage.hpp"
#include "json.hpp"

namespace gfk {

namespace fs = std::filesystem;

std::vector<std::string> list_stems(const fs::path& dir, const std::string& suffix) {
  std::vector<std::string> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) out.push_back(name.substr(0, name.size() - suffix.size()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> StudyLayout::scan_ids() const { return list_stems(scans_dir(), ".mhd"); }

std::vector<std::string> StudyLayout::mark_annotators() const { return list_stems(marks_dir(), ".json"); }

std::vector<std::string> StudyLayout::session_annotators() const {
  std::vector<std::string> out;
  std::error_code ec;
  if (!fs::is_directory(sessions_dir(), ec)) return out;
  for (const auto& e : fs::directory_iterator(sessions_dir()))
    if (e.is_directory()) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

LungMask load_mask(const fs::path& path, bool flip_lr) {
  ByteImage img = read_metaimage_uchar(path);
  return LungMask(img.grid, std::move(img.values), flip_lr);
}

void save_mask(const fs::path& path, const LungMask& mask) { write_metaimage(path, mask.grid(), mask.bits()); }

void write_sim_study(const SimStudy& study, const StudyLayout& layout) {
  const SimConfig& cfg = study.cfg;
  fs::create_directories(layout.scans_dir());
  for (const auto& scan : study.scans) {
    auto rng = sim_rng(cfg, scan.index, -1, 4);
    write_metaimage(layout.scan_path(scan.scan_id), render_phantom(scan.phantom, cfg.noise_hu, rng));
  }
  save_truth(layout.truth_path(), study.truth);
  std::map<std::string, std::vector<Mark>> by_annotator;
  for (int a = 0; a < cfg.n_annotators; ++a) by_annotator[sim_annotator_id(a)];
  for (const auto& m : study.marks) by_annotator[m.annotator].push_back(m);
  for (const auto& [annotator, marks] : by_annotator) save_marks(layout.marks_path(annotator), marks);
  save_candidates(layout.candidates_path(), study.candidates);
  for (const auto& s : study.sessions) {
    if (s.logs.samples.empty()) continue;
    fs::create_directories(layout.gaze_path(s.plan.annotator, s.plan.scan_id).parent_path());
    std::ofstream gaze(layout.gaze_path(s.plan.annotator, s.plan.scan_id));
    std::ofstream view(layout.viewport_path(s.plan.annotator, s.plan.scan_id));
    if (!gaze || !view) fail(Errc::io, fmt::format("cannot write session logs under {}", layout.sessions_dir().string()));
    write_gaze_log(gaze, s.logs.samples, cfg.f);
    write_viewport_log(view, s.logs.states);
    if (!gaze || !view) fail(Errc::io, "failed writing session logs");
  }
  nlohmann::ordered_json manifest;
  manifest["generator"] = "gfk simulate";
  manifest["seed"] = cfg.seed;
  manifest["scans"] = cfg.n_scans;
  manifest["annotators"] = cfg.n_annotators;
  manifest["f"] = cfg.f;
  write_text_file(layout.root / "study.json", manifest.dump(2) + "\n");
}

}  // namespace gfk
