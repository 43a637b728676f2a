#include "gfk/analytics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "gfk/error.hpp"
#include "gfk/log.hpp"
#include "gfk/special_functions.hpp"
#include "gfk/svg.hpp"

namespace gfk {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> v) {
  return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return kNaN;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / double(v.size() - 1));
}

std::string num(double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string(std::isnan(v) ? "" : "inf"); }

int bin_of(double t, double start, double reading_time) {
  // scaled before dividing so exact fractions of T land on their bin edge
  const double b = std::floor((t - start) * kCurveBins / reading_time);
  return std::clamp(static_cast<int>(b), 0, kCurveBins - 1);
}

}  // namespace

LungTimeline make_timeline(std::span<const VoxelGazePoint> points, const LungMask& mask, double start_time,
                           double reading_time, std::string scan_id, std::string annotator) {
  if (!(reading_time > 0.0)) fail(Errc::parameter, "timeline needs a positive reading time");
  LungTimeline tl{std::move(scan_id), std::move(annotator), {}, {}};
  tl.t_norm.reserve(points.size());
  tl.side.reserve(points.size());
  for (const auto& p : points) {
    tl.t_norm.push_back(std::clamp((p.t - start_time) / reading_time, 0.0, 1.0));
    tl.side.push_back(side_of(mask, {p.x, p.y, p.z}));
  }
  return tl;
}

std::array<double, kCurveBins> bin_right_fraction(const LungTimeline& timeline) {
  std::array<int, kCurveBins> right{}, total{};
  for (std::size_t i = 0; i < timeline.t_norm.size(); ++i) {
    const int b = bin_of(timeline.t_norm[i], 0.0, 1.0);
    ++total[b];
    if (timeline.side[i] == LungSide::Right) ++right[b];
  }
  std::array<double, kCurveBins> out{};
  for (int b = 0; b < kCurveBins; ++b) out[b] = total[b] ? double(right[b]) / double(total[b]) : kNaN;
  return out;
}

RightLungCurve right_lung_curve(std::span<const LungTimeline> timelines) {
  RightLungCurve curve;
  std::array<std::vector<double>, kCurveBins> per_bin;
  for (const auto& tl : timelines) {
    if (tl.t_norm.empty()) {
      curve.warnings.push_back(
          fmt::format("session {}/{} has no in-lung gaze points; excluded", tl.annotator, tl.scan_id));
      log::warn(curve.warnings.back());
      continue;
    }
    ++curve.used_sessions;
    const auto frac = bin_right_fraction(tl);
    for (int b = 0; b < kCurveBins; ++b)
      if (!std::isnan(frac[b])) per_bin[b].push_back(frac[b]);
  }
  for (int b = 0; b < kCurveBins; ++b) {
    const auto& v = per_bin[b];
    curve.sessions[b] = static_cast<int>(v.size());
    if (v.empty()) {
      curve.p[b] = curve.ci_lo[b] = curve.ci_hi[b] = kNaN;
      continue;
    }
    const double m = mean_of(v);
    const double half = v.size() < 2 ? 0.0 : special::kNormal975 * sample_sd(v) / std::sqrt(double(v.size()));
    curve.p[b] = m;
    curve.ci_lo[b] = std::clamp(m - half, 0.0, 1.0);
    curve.ci_hi[b] = std::clamp(m + half, 0.0, 1.0);
  }
  return curve;
}

SessionSummary summarize_session(const GazeSession& session, std::span<const VoxelGazePoint> points,
                                 const LungMask& mask, std::string scan_id, std::string annotator) {
  if (!(session.f > 0.0)) fail(Errc::parameter, "session frequency must be positive");
  SessionSummary s{std::move(scan_id), std::move(annotator), session.reading_time(), 0.0, 0.0};
  std::size_t right = 0;
  for (const auto& p : points)
    if (side_of(mask, {p.x, p.y, p.z}) == LungSide::Right) ++right;
  s.right_time = double(right) / session.f;
  s.left_time = double(points.size() - right) / session.f;
  return s;
}

std::vector<ReadingTimeRow> reading_time_stats(std::span<const SessionSummary> sessions) {
  std::map<std::string, std::vector<const SessionSummary*>> groups;
  for (const auto& s : sessions) groups[s.annotator].push_back(&s);
  auto row_of = [](std::string name, const std::vector<const SessionSummary*>& g) {
    ReadingTimeRow r;
    r.annotator = std::move(name);
    r.sessions = g.size();
    std::vector<double> times;
    double right = 0.0, left = 0.0;
    for (const auto* s : g) {
      times.push_back(s->reading_time);
      right += s->right_time;
      left += s->left_time;
    }
    r.mean_time = mean_of(times);
    r.sd_time = sample_sd(times);
    r.mean_right = g.empty() ? kNaN : right / double(g.size());
    r.mean_left = g.empty() ? kNaN : left / double(g.size());
    r.right_left_ratio = left > 0.0 ? right / left : std::numeric_limits<double>::infinity();
    return r;
  };
  std::vector<ReadingTimeRow> rows;
  std::vector<const SessionSummary*> all;
  for (const auto& [name, g] : groups) {
    rows.push_back(row_of(name, g));
    all.insert(all.end(), g.begin(), g.end());
  }
  rows.push_back(row_of("ALL", all));
  return rows;
}

const char* to_string(FindingOutcome o) {
  switch (o) {
    case FindingOutcome::TP: return "TP";
    case FindingOutcome::FP: return "FP";
    case FindingOutcome::FN: return "FN";
  }
  return "?";
}

AttentionStat attention_time(const AttentionVolume& att, Vec3 centroid_mm, double diameter_mm, double reading_time) {
  if (!(reading_time > 0.0)) fail(Errc::parameter, "attention time needs a positive reading time");
  if (!(diameter_mm > 0.0)) fail(Errc::parameter, "attention time needs a positive finding diameter");
  AttentionStat s;
  const Region cyl = Region::cylinder(att.grid(), centroid_mm, kFovealDiameterMm, diameter_mm);
  if (cyl.empty()) {
    s.outside_volume = true;
    log::warn(fmt::format("attention cylinder at ({}, {}, {}) lies outside the volume", centroid_mm.x, centroid_mm.y,
                          centroid_mm.z));
    return s;
  }
  s.t_attention = attention_at(att, cyl);
  s.t_norm = std::min(1.0, s.t_attention / reading_time);
  return s;
}

std::vector<AttentionStat> finding_attention(const AttentionVolume& att, double reading_time,
                                             const MatchOutcome& outcome, std::span<const NoduleTruth> truths,
                                             std::span<const Mark> marks, const std::string& scan_id,
                                             const std::string& annotator) {
  std::map<std::string, const NoduleTruth*> truth_by_id;
  for (const auto& t : truths) truth_by_id[t.id] = &t;
  std::map<std::string, const Mark*> mark_by_id;
  for (const auto& m : marks) mark_by_id[m.id] = &m;

  std::vector<AttentionStat> out;
  auto add_truth = [&](const std::string& id, FindingOutcome o) {
    const auto it = truth_by_id.find(id);
    if (it == truth_by_id.end()) fail(Errc::parameter, fmt::format("unknown truth id {}", id));
    AttentionStat s = attention_time(att, it->second->centroid_mm, it->second->diameter_mm(), reading_time);
    s.finding_id = id;
    s.outcome = o;
    out.push_back(std::move(s));
  };
  for (const auto& [truth_id, mark_id] : outcome.tp) add_truth(truth_id, FindingOutcome::TP);
  for (const auto& truth_id : outcome.fn) add_truth(truth_id, FindingOutcome::FN);
  for (const auto& mark_id : outcome.fp) {
    const auto it = mark_by_id.find(mark_id);
    if (it == mark_by_id.end()) fail(Errc::parameter, fmt::format("unknown mark id {}", mark_id));
    const Mark& m = *it->second;
    AttentionStat s = attention_time(att, m.centroid_mm, m.equivalent_diameter_mm.value_or(kDefaultMarkDiameterMm),
                                     reading_time);
    s.finding_id = mark_id;
    s.outcome = FindingOutcome::FP;
    out.push_back(std::move(s));
  }
  for (auto& s : out) {
    s.scan_id = scan_id;
    s.annotator = annotator;
  }
  return out;
}

std::vector<AttentionSummaryRow> summarize_attention(std::span<const AttentionStat> stats) {
  std::map<std::pair<std::string, FindingOutcome>, std::vector<double>> groups;
  for (const auto& s : stats) {
    groups[{s.annotator, s.outcome}].push_back(100.0 * s.t_norm);
    groups[{"ALL", s.outcome}].push_back(100.0 * s.t_norm);
  }
  std::vector<AttentionSummaryRow> rows;
  auto emit = [&](const std::pair<std::string, FindingOutcome>& key, const std::vector<double>& v) {
    AttentionSummaryRow r;
    r.annotator = key.first;
    r.outcome = key.second;
    r.n = v.size();
    r.mean = mean_of(v);
    r.ci_half = v.size() < 2 ? kNaN
                             : special::student_t_quantile(0.975, double(v.size() - 1)) * sample_sd(v) /
                                   std::sqrt(double(v.size()));
    rows.push_back(r);
  };
  for (const auto& [key, v] : groups)
    if (key.first != "ALL") emit(key, v);
  for (const auto& [key, v] : groups)
    if (key.first == "ALL") emit(key, v);
  return rows;
}

bool outside_rater_range(std::span<const int> rater_scores, int score) {
  if (rater_scores.empty()) return false;
  std::vector<double> v(rater_scores.begin(), rater_scores.end());
  const double m = mean_of(v);
  const double sd = v.size() < 2 ? 0.0 : sample_sd(v);
  return score < m - sd || score > m + sd;
}

AgreementTable characterization_agreement(const GroundTruth& truth, std::span<const Mark> marks, MatchRule rule) {
  AgreementTable table;
  std::vector<std::string> scans;
  for (const auto& n : truth.nodules) scans.push_back(n.scan_id);
  std::sort(scans.begin(), scans.end());
  scans.erase(std::unique(scans.begin(), scans.end()), scans.end());

  struct Column {
    std::string annotator;
    std::size_t matched = 0;
    std::array<std::size_t, 7> outside{};
    std::array<std::size_t, 5> aggregate{};
  };
  std::vector<Column> columns;
  for (const auto& annotator : annotators_of(marks)) {
    Column col{annotator, 0, {}, {}};
    const auto own = by_annotator(marks, annotator);
    for (const auto& scan : scans) {
      const auto truths = for_scan<NoduleTruth>(truth.nodules, scan);
      const auto non = for_scan<NonNodule>(truth.non_nodules, scan);
      const auto scan_marks = for_scan<Mark>(own, scan);
      const auto outcome = match(truths, scan_marks, non, rule);
      for (const auto& [tid, mid] : outcome.tp) {
        const auto t = std::find_if(truths.begin(), truths.end(), [&](const auto& x) { return x.id == tid; });
        const auto m = std::find_if(scan_marks.begin(), scan_marks.end(), [&](const auto& x) { return x.id == mid; });
        if (!m->scores) continue;
        ++col.matched;
        int count = 0;
        for (std::size_t c = 0; c < kOrdinalCharacteristics.size(); ++c) {
          const Characteristic ch = kOrdinalCharacteristics[c];
          const auto score = m->scores->get(ch);
          if (!score) continue;
          std::vector<int> raters;
          for (const auto& r : t->raters)
            if (const auto v = r.get(ch)) raters.push_back(*v);
          if (outside_rater_range(raters, *score)) {
            ++col.outside[c];
            ++count;
          }
        }
        for (std::size_t k = 0; k < kAgreementThresholds.size(); ++k)
          if (count >= kAgreementThresholds[k]) ++col.aggregate[k];
      }
    }
    if (col.matched == 0) {
      table.warnings.push_back(fmt::format("annotator {} has no matched nodules; excluded", annotator));
      log::warn(table.warnings.back());
      continue;
    }
    columns.push_back(col);
  }

  for (const auto& c : columns) {
    table.annotators.push_back(c.annotator);
    table.matched.push_back(c.matched);
  }
  auto finish = [&](std::string name, auto count_of) {
    AgreementRow row{std::move(name), {}, 0.0, 0.0};
    for (const auto& c : columns) row.percent.push_back(100.0 * double(count_of(c)) / double(c.matched));
    row.mean = mean_of(row.percent);
    row.sd = sample_sd(row.percent);
    table.rows.push_back(std::move(row));
  };
  for (std::size_t i = 0; i < kOrdinalCharacteristics.size(); ++i)
    finish(std::string(characteristic_name(kOrdinalCharacteristics[i])), [i](const Column& c) { return c.outside[i]; });
  for (std::size_t k = 0; k < kAgreementThresholds.size(); ++k)
    finish(kAgreementRowNames[k], [k](const Column& c) { return c.aggregate[k]; });
  return table;
}

std::string curve_csv(const RightLungCurve& curve) {
  std::string s = "bin,p,ci_lo,ci_hi,sessions\n";
  for (int b = 0; b < kCurveBins; ++b)
    s += fmt::format("{},{},{},{},{}\n", b + 1, num(curve.p[b]), num(curve.ci_lo[b]), num(curve.ci_hi[b]),
                     curve.sessions[b]);
  return s;
}

std::string curve_svg(const RightLungCurve& curve) {
  svg::Axes axes;
  axes.title = "Probability of gaze on the right lung";
  axes.x_label = "normalized reading time (%)";
  axes.y_label = "P(right)";
  axes.x_min = 0.0;
  axes.x_max = 100.0;
  svg::Band band;
  svg::Series line;
  line.label = fmt::format("mean over sessions (n={})", curve.used_sessions);
  for (int b = 0; b < kCurveBins; ++b) {
    band.x.push_back(b + 0.5);
    band.lo.push_back(curve.ci_lo[b]);
    band.hi.push_back(curve.ci_hi[b]);
    line.x.push_back(b + 0.5);
    line.y.push_back(curve.p[b]);
  }
  return svg::line_plot(axes, {band}, {line});
}

std::string reading_time_csv(std::span<const ReadingTimeRow> rows) {
  std::string s = "annotator,sessions,mean_time_s,sd_time_s,mean_right_s,mean_left_s,right_left_ratio\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{},{},{},{}\n", r.annotator, r.sessions, num(r.mean_time), num(r.sd_time),
                     num(r.mean_right), num(r.mean_left), num(r.right_left_ratio));
  return s;
}

std::string attention_stats_csv(std::span<const AttentionStat> stats) {
  std::string s = "annotator,scan_id,finding_id,outcome,t_attention_s,t_norm\n";
  for (const auto& a : stats)
    s += fmt::format("{},{},{},{},{},{}\n", a.annotator, a.scan_id, a.finding_id, to_string(a.outcome),
                     num(a.t_attention), num(a.t_norm));
  return s;
}

std::string attention_summary_csv(std::span<const AttentionSummaryRow> rows) {
  std::string s = "annotator,outcome,n,mean_pct,ci95_half_pct\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{},{}\n", r.annotator, to_string(r.outcome), r.n, num(r.mean), num(r.ci_half));
  return s;
}

std::string agreement_csv(const AgreementTable& table) {
  std::string s = "characteristic";
  for (std::size_t i = 0; i < table.annotators.size(); ++i)
    s += fmt::format(",{} (n={})", table.annotators[i], table.matched[i]);
  s += ",avg,sd\n";
  for (const auto& row : table.rows) {
    s += row.name;
    for (double p : row.percent) s += "," + num(p);
    s += fmt::format(",{},{}\n", num(row.mean), num(row.sd));
  }
  s += "# aggregate rows count nodules outside on at least k of 7 characteristics: "
       "All k=7, >=3/4 k=6, >=1/2 k=4, >=1/4 k=2, At least one k=1\n";
  return s;
}

}  // namespace gfk
