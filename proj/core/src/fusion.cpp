#include "gfk/fusion.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "gfk/analytics.hpp"
#include "gfk/error.hpp"

namespace gfk {

const char* to_string(FusionMode mode) { return mode == FusionMode::all ? "all" : "low_attention"; }

FusionMode parse_fusion_mode(std::string_view text) {
  if (text == "all") return FusionMode::all;
  if (text == "low_attention" || text == "low-attention") return FusionMode::low_attention;
  fail(Errc::parameter, fmt::format("unknown fusion mode '{}'", text));
}

void FusionPolicy::validate() const {
  if (!(attention_threshold >= 0.0 && attention_threshold <= 1.0))
    fail(Errc::parameter, fmt::format("attention threshold {} outside [0, 1]", attention_threshold));
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0))
    fail(Errc::parameter, fmt::format("score threshold {} outside [0, 1]", score_threshold));
  if (!(fp_budget_per_scan >= 0.0)) fail(Errc::parameter, "fp budget must be non-negative");
}

std::string FusionPolicy::label() const {
  if (mode == FusionMode::all) return "fusion all";
  return fmt::format("fusion low_attention threshold {:.2f}", attention_threshold);
}

namespace {

std::vector<Candidate> merge_scan(std::span<const Candidate> cands) {
  struct Cluster {
    Candidate rep;
    Vec3 sum;
    std::size_t members = 1;
    bool alive = true;
  };
  std::vector<Cluster> cl;
  for (const auto& c : cands) cl.push_back({c, c.centroid_mm, 1, true});

  auto mergeable = [&](std::size_t i, std::size_t j, double& d) {
    d = distance(cl[i].rep.centroid_mm, cl[j].rep.centroid_mm);
    return d < 0.25 * (cl[i].rep.max_dim_mm() + cl[j].rep.max_dim_mm());
  };
  for (;;) {
    double best = 0.0;
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < cl.size(); ++i) {
      if (!cl[i].alive) continue;
      for (std::size_t j = i + 1; j < cl.size(); ++j) {
        double d = 0.0;
        if (!cl[j].alive || !mergeable(i, j, d)) continue;
        // ties: lowest index pair, so the result is fixed by the input order
        if (!found || d < best) {
          best = d;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found) break;
    Cluster& a = cl[bi];
    Cluster& b = cl[bj];
    a.sum = a.sum + b.sum;
    a.members += b.members;
    if (b.rep.score > a.rep.score) {
      a.rep.id = b.rep.id;
      a.rep.score = b.rep.score;
    }
    a.rep.bbox_w_mm = std::max(a.rep.bbox_w_mm, b.rep.bbox_w_mm);
    a.rep.bbox_h_mm = std::max(a.rep.bbox_h_mm, b.rep.bbox_h_mm);
    a.rep.centroid_mm = a.sum * (1.0 / double(a.members));
    b.alive = false;
  }
  std::vector<Candidate> out;
  for (const auto& c : cl)
    if (c.alive) out.push_back(c.rep);
  return out;
}

}  // namespace

std::vector<Candidate> merge_candidates(std::span<const Candidate> cands) {
  // scans in order of first appearance
  std::vector<std::string> order;
  std::map<std::string, std::vector<Candidate>> groups;
  for (const auto& c : cands) {
    auto [it, inserted] = groups.try_emplace(c.scan_id);
    if (inserted) order.push_back(c.scan_id);
    it->second.push_back(c);
  }
  std::vector<Candidate> out;
  for (const auto& scan : order) {
    auto merged = merge_scan(groups[scan]);
    out.insert(out.end(), merged.begin(), merged.end());
  }
  return out;
}

std::vector<Candidate> postprocess_candidates(std::span<const Candidate> cands, const LungMask& mask) {
  std::vector<Candidate> inside;
  for (const auto& c : cands)
    if (mask.contains(mask.grid().nearest_voxel(c.centroid_mm))) inside.push_back(c);
  return merge_candidates(inside);
}

double calibrate_operating_point(const GroundTruth& truth, std::span<const Candidate> cands, std::size_t n_scans,
                                 double target_fp_per_scan, MatchRule rule) {
  if (std::isnan(target_fp_per_scan) || target_fp_per_scan < 0.0)
    fail(Errc::parameter, "target FP per scan must be non-negative");
  if (n_scans == 0) fail(Errc::parameter, "calibration needs at least one scan");
  if (std::isinf(target_fp_per_scan)) return 0.0;

  // A candidate is a false positive exactly when it hits no nodule and no non-nodule,
  // independent of the other candidates, so the FP count falls monotonically with the threshold.
  std::multimap<std::string, const NoduleTruth*> nodules;
  for (const auto& n : truth.nodules) nodules.emplace(n.scan_id, &n);
  std::multimap<std::string, const NonNodule*> non;
  for (const auto& n : truth.non_nodules) non.emplace(n.scan_id, &n);
  std::vector<double> fp_scores;
  for (const auto& c : cands) {
    bool hit = false;
    for (auto [it, end] = nodules.equal_range(c.scan_id); it != end && !hit; ++it)
      hit = distance(it->second->centroid_mm, c.centroid_mm) < rule.hit_distance(it->second->equivalent_radius_mm);
    for (auto [it, end] = non.equal_range(c.scan_id); it != end && !hit; ++it)
      hit = distance(it->second->centroid_mm, c.centroid_mm) < rule.hit_distance(it->second->equivalent_radius_mm);
    if (!hit) fp_scores.push_back(c.score);
  }
  std::sort(fp_scores.begin(), fp_scores.end(), std::greater<>());
  const double allowed_real = target_fp_per_scan * double(n_scans);
  const auto allowed = static_cast<std::size_t>(std::floor(allowed_real * (1.0 + 1e-12)));
  if (allowed >= fp_scores.size()) return 0.0;
  const double cut = fp_scores[allowed];  // the first FP score that must be excluded
  if (cut >= 1.0)
    fail(Errc::calibration, fmt::format("target {} FP/scan is unattainable even at threshold 1.0", target_fp_per_scan));
  return std::nextafter(cut, 2.0);
}

std::vector<Mark> candidates_to_marks(std::span<const Candidate> cands, double score_threshold) {
  std::vector<Mark> out;
  for (const auto& c : cands) {
    if (c.score < score_threshold) continue;
    Mark m;
    m.id = "cade-" + c.id;
    m.scan_id = c.scan_id;
    m.annotator = "cade";
    m.centroid_mm = c.centroid_mm;
    m.equivalent_diameter_mm = c.max_dim_mm();
    m.source = MarkSource::cade;
    m.score = c.score;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Mark> fuse(std::span<const Mark> marks, std::span<const Candidate> cands, const AttentionVolume* att,
                       double reading_time, const FusionPolicy& policy, double dedup_mm) {
  policy.validate();
  if (policy.mode == FusionMode::low_attention) {
    if (att == nullptr) fail(Errc::configuration, "low_attention fusion needs an attention volume");
    if (!(reading_time > 0.0)) fail(Errc::configuration, "low_attention fusion needs a positive reading time");
  }
  std::vector<Mark> out(marks.begin(), marks.end());
  for (const auto& c : cands) {
    if (c.score < policy.score_threshold) continue;
    const bool duplicate = std::any_of(marks.begin(), marks.end(), [&](const Mark& m) {
      return m.scan_id == c.scan_id && distance(m.centroid_mm, c.centroid_mm) <= dedup_mm;
    });
    if (duplicate) continue;
    if (policy.mode == FusionMode::low_attention) {
      const double height = c.max_dim_mm() > 0.0 ? c.max_dim_mm() : kDefaultMarkDiameterMm;
      const AttentionStat s = attention_time(*att, c.centroid_mm, height, reading_time);
      if (!(s.t_norm < policy.attention_threshold) && policy.attention_threshold < 1.0) continue;
    }
    auto m = candidates_to_marks(std::span<const Candidate>(&c, 1));
    out.push_back(std::move(m.front()));
  }
  return out;
}

}  // namespace gfk
