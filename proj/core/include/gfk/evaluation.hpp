#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gfk/model.hpp"

namespace gfk {

/// A mark hits a finding when the centroid distance is strictly below the finding's
/// diameter (or its radius with `use_radius`).
struct MatchRule {
  bool use_radius = false;

  double hit_distance(double equivalent_radius_mm) const {
    return use_radius ? equivalent_radius_mm : 2.0 * equivalent_radius_mm;
  }
};

struct MatchOutcome {
  std::vector<std::pair<std::string, std::string>> tp;  // (truth id, mark id), truth input order
  std::vector<std::string> fp;                          // mark ids
  std::vector<std::string> fn;                          // truth ids
  std::vector<std::string> ignored;                     // duplicate hits and non-nodule hits
};

/// Closest (truth, mark) pair first; distance ties go to the lower mark id, then the
/// lower truth id. One mark per truth.
MatchOutcome match(std::span<const NoduleTruth> truths, std::span<const Mark> marks,
                   std::span<const NonNodule> non_nodules, MatchRule rule = {});

/// Union of two mark sets; a mark of `b` is dropped when it repeats a mark of `a`
/// (same annotator and id) or lies within `dedup_mm` of an `a` mark from another annotator.
std::vector<Mark> combine(std::span<const Mark> a, std::span<const Mark> b, double dedup_mm = 1.0);

struct ScanOutcome {
  std::string scan_id;
  std::size_t truths = 0;
  MatchOutcome outcome;
};

struct EvalReport {
  double sensitivity = 0.0;
  double fp_per_scan = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t ignored = 0;
  std::vector<ScanOutcome> per_scan;  // ascending scan id

  std::size_t scans() const { return per_scan.size(); }
};

/// Pools all scans in `scan_ids` (or, when empty, every scan named by truth or marks).
/// Throws Errc::undefined_metric when no ground-truth nodule exists.
EvalReport evaluate(const GroundTruth& truth, std::span<const Mark> marks, std::vector<std::string> scan_ids = {},
                    MatchRule rule = {});

std::string eval_report_json(const EvalReport& report, const std::string& label);
std::string eval_report_csv(const EvalReport& report);
/// Reads back the JSON written by eval_report_json.
EvalReport parse_eval_report(std::string_view json_text, std::string* label = nullptr);

/// Subsets by scan or annotator.
template <typename T>
std::vector<T> for_scan(std::span<const T> items, const std::string& scan_id) {
  std::vector<T> out;
  for (const auto& it : items)
    if (it.scan_id == scan_id) out.push_back(it);
  return out;
}
std::vector<Mark> by_annotator(std::span<const Mark> marks, const std::string& annotator);
std::vector<std::string> annotators_of(std::span<const Mark> marks);

}  // namespace gfk
