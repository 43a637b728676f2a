#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gfk/attention.hpp"
#include "gfk/evaluation.hpp"
#include "gfk/model.hpp"
#include "gfk/volume.hpp"

namespace gfk {

enum class FusionMode { all, low_attention };
const char* to_string(FusionMode mode);
FusionMode parse_fusion_mode(std::string_view text);  // "all", "low_attention" or "low-attention"

struct FusionPolicy {
  FusionMode mode = FusionMode::all;
  double attention_threshold = 0.10;  // normalized attention time
  double score_threshold = 0.0;       // candidates below are never added
  double fp_budget_per_scan = std::numeric_limits<double>::infinity();

  void validate() const;
  std::string label() const;
};

/// Drops candidates whose centroid voxel is outside the mask, then merges.
std::vector<Candidate> postprocess_candidates(std::span<const Candidate> cands, const LungMask& mask);

/// Repeatedly merges the closest pair (same scan) whose distance is below half the
/// mean of their bbox max dimensions, until no pair qualifies. A merged candidate takes
/// the mean centroid of its members, the highest score (and that member's id) and the
/// element-wise largest bbox.
std::vector<Candidate> merge_candidates(std::span<const Candidate> cands);

/// Smallest score threshold (keep score >= threshold) whose false positives per scan
/// stay within `target_fp_per_scan` over `n_scans` scans.
double calibrate_operating_point(const GroundTruth& truth, std::span<const Candidate> cands, std::size_t n_scans,
                                 double target_fp_per_scan, MatchRule rule = {});

/// Candidates at or above `score_threshold` as cade-sourced marks.
std::vector<Mark> candidates_to_marks(std::span<const Candidate> cands, double score_threshold = 0.0);

/// Marks of one session fused with the candidates of the same scan. `att` may be null
/// in mode all. Candidates within `dedup_mm` of an existing mark are not added.
std::vector<Mark> fuse(std::span<const Mark> marks, std::span<const Candidate> cands, const AttentionVolume* att,
                       double reading_time, const FusionPolicy& policy, double dedup_mm = 1.0);

}  // namespace gfk
