#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfk/attention.hpp"
#include "gfk/evaluation.hpp"
#include "gfk/gaze.hpp"
#include "gfk/model.hpp"
#include "gfk/volume.hpp"

namespace gfk {

inline constexpr int kCurveBins = 100;

/// In-lung gaze of one session on normalized time, t_norm = (t - start) / T.
struct LungTimeline {
  std::string scan_id;
  std::string annotator;
  std::vector<double> t_norm;
  std::vector<LungSide> side;
};

LungTimeline make_timeline(std::span<const VoxelGazePoint> points, const LungMask& mask, double start_time,
                           double reading_time, std::string scan_id = {}, std::string annotator = {});

struct RightLungCurve {
  std::array<double, kCurveBins> p{};  // NaN where no session contributes
  std::array<double, kCurveBins> ci_lo{};
  std::array<double, kCurveBins> ci_hi{};
  std::array<int, kCurveBins> sessions{};  // contributing sessions per bin
  std::size_t used_sessions = 0;
  std::vector<std::string> warnings;
};

/// Per bin: mean over contributing sessions of the fraction of points on the right
/// lung, with a normal-approximation 95% interval across sessions clamped to [0, 1].
RightLungCurve right_lung_curve(std::span<const LungTimeline> timelines);

/// Per-bin right fraction of one timeline (NaN for empty bins).
std::array<double, kCurveBins> bin_right_fraction(const LungTimeline& timeline);

struct SessionSummary {
  std::string scan_id;
  std::string annotator;
  double reading_time = 0.0;  // last - first sample
  double right_time = 0.0;    // in-lung points on the side / f
  double left_time = 0.0;
};

SessionSummary summarize_session(const GazeSession& session, std::span<const VoxelGazePoint> points,
                                 const LungMask& mask, std::string scan_id = {}, std::string annotator = {});

struct ReadingTimeRow {
  std::string annotator;  // "ALL" for the pooled row
  std::size_t sessions = 0;
  double mean_time = 0.0;
  double sd_time = 0.0;  // sample sd; NaN with one session
  double mean_right = 0.0;
  double mean_left = 0.0;
  double right_left_ratio = 0.0;  // summed right time over summed left time
};

/// One row per annotator (sorted) followed by the pooled row.
std::vector<ReadingTimeRow> reading_time_stats(std::span<const SessionSummary> sessions);

enum class FindingOutcome { TP, FP, FN };
const char* to_string(FindingOutcome o);

struct AttentionStat {
  std::string finding_id;
  std::string scan_id;
  std::string annotator;
  FindingOutcome outcome = FindingOutcome::TP;
  double t_attention = 0.0;  // seconds
  double t_norm = 0.0;       // t_attention / T, at most 1
  bool outside_volume = false;
};

/// Attention summed over the axial cylinder of the foveal diameter and height
/// `diameter_mm` centered on the finding.
AttentionStat attention_time(const AttentionVolume& att, Vec3 centroid_mm, double diameter_mm, double reading_time);

/// Marks without an equivalent diameter use this height.
inline constexpr double kDefaultMarkDiameterMm = 5.0;

/// Attention of every TP/FN nodule and FP mark of one session.
std::vector<AttentionStat> finding_attention(const AttentionVolume& att, double reading_time,
                                             const MatchOutcome& outcome, std::span<const NoduleTruth> truths,
                                             std::span<const Mark> marks, const std::string& scan_id,
                                             const std::string& annotator);

struct AttentionSummaryRow {
  std::string annotator;  // "ALL" for the pooled rows
  FindingOutcome outcome = FindingOutcome::TP;
  std::size_t n = 0;
  double mean = 0.0;     // percent of T
  double ci_half = 0.0;  // t-distribution 95% half width; NaN for n < 2
};

std::vector<AttentionSummaryRow> summarize_attention(std::span<const AttentionStat> stats);

struct AgreementRow {
  std::string name;
  std::vector<double> percent;  // per annotator column
  double mean = 0.0;
  double sd = 0.0;  // sample sd across annotators; NaN for one column
};

struct AgreementTable {
  std::vector<std::string> annotators;
  std::vector<std::size_t> matched;  // matched nodules per annotator
  std::vector<AgreementRow> rows;    // 7 characteristics then aggregates
  std::vector<std::string> warnings;
};

/// Aggregate thresholds over the 7 ordinal characteristics: all, >=3/4, >=1/2, >=1/4
/// (ceiling, i.e. 6, 4, 2) and at least one.
inline constexpr std::array<int, 5> kAgreementThresholds{7, 6, 4, 2, 1};
inline constexpr std::array<const char*, 5> kAgreementRowNames{"All", ">=3/4", ">=1/2", ">=1/4", "At least one"};

/// True when `score` falls outside mean +- sample sd of the rater scores.
bool outside_rater_range(std::span<const int> rater_scores, int score);

AgreementTable characterization_agreement(const GroundTruth& truth, std::span<const Mark> marks, MatchRule rule = {});

std::string curve_csv(const RightLungCurve& curve);
std::string curve_svg(const RightLungCurve& curve);
std::string reading_time_csv(std::span<const ReadingTimeRow> rows);
std::string attention_stats_csv(std::span<const AttentionStat> stats);
std::string attention_summary_csv(std::span<const AttentionSummaryRow> rows);
std::string agreement_csv(const AgreementTable& table);

}  // namespace gfk
