#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fmt/format.h>

#include <cmath>
#include <random>

#include "gfk/analytics.hpp"
#include "gfk/error.hpp"

using namespace gfk;

namespace {

// 64 x 32 x 8 mask, every voxel set; split_x = 32, so x < 32 is the right lung.
LungMask full_mask() {
  Grid g;
  g.dims = {64, 32, 8};
  return LungMask(g, std::vector<std::uint8_t>(g.dims.count(), 1));
}

LungTimeline timeline(std::vector<double> t, std::vector<LungSide> s) {
  LungTimeline tl;
  tl.t_norm = std::move(t);
  tl.side = std::move(s);
  return tl;
}

// n points spread uniformly over [0, 1), right for t < right_until.
LungTimeline right_first(int n, double right_until) {
  LungTimeline tl;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    tl.t_norm.push_back(t);
    tl.side.push_back(t < right_until ? LungSide::Right : LungSide::Left);
  }
  return tl;
}

CharacteristicScores all_scores(int v) {
  CharacteristicScores s;
  for (Characteristic c : kAllCharacteristics) s.set(c, v);
  return s;
}

}  // namespace

TEST_CASE("right-first sessions give p = 1 on the first 30 bins") {
  std::vector<LungTimeline> sessions;
  for (int k = 0; k < 20; ++k) sessions.push_back(right_first(900 + 37 * k, 0.30));
  const auto c = right_lung_curve(sessions);
  CHECK(c.used_sessions == 20);
  for (int b = 0; b < 30; ++b) {
    CHECK(c.p[b] == 1.0);
    CHECK(c.sessions[b] == 20);
  }
  for (int b = 31; b < kCurveBins; ++b) CHECK(c.p[b] == 0.0);
}

TEST_CASE("points land in the bin of their normalised time") {
  const auto mask = full_mask();
  // T = 10 s starting at t = 2; a point at exactly 30% of T starts bin 31
  std::vector<VoxelGazePoint> pts{{2.0, 1, 1, 1, 0}, {4.999, 1, 1, 1, 0}, {5.0, 40, 1, 1, 0}, {12.0, 40, 1, 1, 0}};
  const auto tl = make_timeline(pts, mask, 2.0, 10.0, "s", "R1");
  CHECK(tl.side[0] == LungSide::Right);
  CHECK(tl.side[2] == LungSide::Left);
  const auto f = bin_right_fraction(tl);
  CHECK(f[0] == 1.0);
  CHECK(f[29] == 1.0);
  CHECK(f[30] == 0.0);
  CHECK(f[99] == 0.0);  // t_norm = 1 folds into the last bin
  CHECK(std::isnan(f[50]));
  CHECK_THROWS_AS(make_timeline(pts, mask, 0.0, 0.0), Error);
}

TEST_CASE("alternating gaze gives p near one half") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  std::vector<LungTimeline> sessions;
  const int n_points = 9000;
  for (int k = 0; k < 10; ++k) {
    LungTimeline tl;
    for (int i = 0; i < n_points; ++i) {
      tl.t_norm.push_back((i + 0.5) / n_points);
      tl.side.push_back(coin(rng) ? LungSide::Right : LungSide::Left);
    }
    sessions.push_back(tl);
  }
  const auto c = right_lung_curve(sessions);
  // 900 Bernoulli draws per bin pooled over sessions: 3 sigma = 0.05
  for (int b = 0; b < kCurveBins; ++b) {
    CHECK(std::abs(c.p[b] - 0.5) < 3.0 * std::sqrt(0.25 / 900.0));
    CHECK(c.ci_lo[b] <= c.p[b]);
    CHECK(c.ci_hi[b] >= c.p[b]);
  }
}

TEST_CASE("single all-left session and excluded empty sessions") {
  std::vector<LungTimeline> sessions{right_first(500, 0.0), timeline({}, {})};
  const auto c = right_lung_curve(sessions);
  CHECK(c.used_sessions == 1);
  CHECK(c.warnings.size() == 1);
  for (int b = 0; b < kCurveBins; ++b) {
    CHECK(c.p[b] == 0.0);
    CHECK(c.ci_lo[b] == 0.0);
    CHECK(c.ci_hi[b] == 0.0);
  }
  const std::string csv = curve_csv(c);
  CHECK(csv.rfind("bin,p,ci_lo,ci_hi,sessions\n1,0,0,0,1\n", 0) == 0);
  CHECK(curve_svg(c).find("<svg") != std::string::npos);
}

TEST_CASE("per-session bins partition into left and right") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  LungTimeline tl, flipped;
  for (int i = 0; i < 3000; ++i) {
    const double t = u(rng);
    const auto s = u(rng) < 0.6 ? LungSide::Right : LungSide::Left;
    tl.t_norm.push_back(t);
    tl.side.push_back(s);
    flipped.t_norm.push_back(t);
    flipped.side.push_back(s == LungSide::Right ? LungSide::Left : LungSide::Right);
  }
  const auto r = bin_right_fraction(tl), l = bin_right_fraction(flipped);
  for (int b = 0; b < kCurveBins; ++b) {
    if (std::isnan(r[b])) continue;
    CHECK(r[b] + l[b] == doctest::Approx(1.0));
    CHECK(r[b] >= 0.0);
    CHECK(r[b] <= 1.0);
  }
}

TEST_CASE("confidence band uses 1.96 standard errors across sessions") {
  std::vector<LungTimeline> sessions{right_first(100, 1.0), right_first(100, 0.0), right_first(100, 1.0),
                                     right_first(100, 1.0)};
  const auto c = right_lung_curve(sessions);
  const double sd = std::sqrt((3 * 0.25 * 0.25 + 0.75 * 0.75) / 3.0);
  CHECK(c.p[10] == doctest::Approx(0.75));
  CHECK(c.ci_lo[10] == doctest::Approx(0.75 - 1.959963984540054 * sd / 2.0));
  CHECK(c.ci_hi[10] == 1.0);  // clamped
}

TEST_CASE("session summaries and reading-time statistics") {
  const auto mask = full_mask();
  GazeSession s;
  s.f = 10.0;
  s.samples = {{1.0, 0, 0}, {31.0, 0, 0}};
  std::vector<VoxelGazePoint> pts;
  for (int i = 0; i < 60; ++i) pts.push_back({1.0 + i * 0.1, 10, 1, 1, 0});
  for (int i = 0; i < 50; ++i) pts.push_back({8.0 + i * 0.1, 50, 1, 1, 0});
  const auto sum = summarize_session(s, pts, mask, "s1", "R1");
  CHECK(sum.reading_time == 30.0);
  CHECK(sum.right_time == doctest::Approx(6.0));
  CHECK(sum.left_time == doctest::Approx(5.0));

  const std::vector<SessionSummary> sessions{{"s1", "R1", 100, 12, 10}, {"s2", "R1", 200, 24, 20},
                                             {"s1", "R2", 150, 10, 10}, {"s2", "R2", 250, 10, 10}};
  const auto rows = reading_time_stats(sessions);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].annotator == "R1");
  CHECK(rows[0].mean_time == 150.0);
  CHECK(rows[0].sd_time == doctest::Approx(std::sqrt(5000.0)));
  CHECK(rows[0].right_left_ratio == doctest::Approx(1.2));
  CHECK(rows[1].right_left_ratio == 1.0);
  CHECK(rows[2].annotator == "ALL");
  CHECK(rows[2].sessions == 4);
  CHECK(rows[2].mean_time == 175.0);
  CHECK(rows[2].right_left_ratio == doctest::Approx(56.0 / 50.0));
  CHECK(reading_time_csv(rows).find("ALL,4,175") != std::string::npos);
}

TEST_CASE("reading times drawn around 181 s stay within the interval of 181") {
  std::mt19937_64 rng(181);
  std::normal_distribution<double> n(181.0, 84.0);
  std::vector<SessionSummary> sessions;
  for (int i = 0; i < 20; ++i) sessions.push_back({fmt::format("s{}", i), "R1", std::max(40.0, n(rng)), 1, 1});
  const auto row = reading_time_stats(sessions).back();
  const double half = 2.093 * row.sd_time / std::sqrt(20.0);  // t(0.975, 19)
  CHECK(std::abs(row.mean_time - 181.0) < half);
}

TEST_CASE("attention time over cylinders") {
  Grid g;
  g.dims = {80, 80, 20};
  g.spacing = {1.0, 1.0, 2.0};
  const AttentionVolume uniform(g, std::vector<double>(g.dims.count(), 0.001), 90.0);
  const auto s = attention_time(uniform, {40, 40, 20}, 6.0, 100.0);
  // disc of radius 26 voxels times slices z with |2z - 20| <= 3
  int disc = 0;
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 80; ++x) disc += (x - 40) * (x - 40) + (y - 40) * (y - 40) <= 26 * 26;
  CHECK(s.t_attention == doctest::Approx(0.001 * disc * 3));
  CHECK(s.t_norm == doctest::Approx(s.t_attention / 100.0));
  CHECK(!s.outside_volume);

  // disjoint stacked cylinders add up; the total never exceeds the volume mass
  const auto lo = attention_time(uniform, {40, 40, 8}, 8.0, 100.0);
  const auto hi = attention_time(uniform, {40, 40, 18}, 8.0, 100.0);
  const auto both = attention_time(uniform, {40, 40, 13}, 18.0, 100.0);
  CHECK(lo.t_attention + hi.t_attention == doctest::Approx(both.t_attention));
  CHECK(both.t_attention <= uniform.total_mass());

  const auto out = attention_time(uniform, {1000, 1000, 1000}, 6.0, 100.0);
  CHECK(out.outside_volume);
  CHECK(out.t_attention == 0.0);
  CHECK_THROWS_AS(attention_time(uniform, {40, 40, 20}, 6.0, 0.0), Error);
}

TEST_CASE("gaze concentrated on a nodule gives t_norm near one") {
  Grid g;
  g.dims = {120, 120, 10};
  // 450 samples at 90 Hz on one voxel, zoom with sigma 4: T = 5 s
  std::vector<VoxelGazePoint> pts;
  for (int i = 0; i < 450; ++i) pts.push_back({i / 90.0, 60, 60, 5, 0});
  const auto att = splat(std::vector<GazeGroup>{{4.0, pts}}, 90.0, g);
  const auto s = attention_time(att, {60, 60, 5}, 3.0, 5.0);
  CHECK(s.t_norm > 0.99);
  CHECK(s.t_norm <= 1.0);
}

TEST_CASE("finding attention covers TP, FN and FP findings") {
  Grid g;
  g.dims = {200, 200, 10};
  const AttentionVolume att(g, std::vector<double>(g.dims.count(), 1e-4), 90.0);
  const std::vector<NoduleTruth> truths{{"n1", "s", {100, 100, 5}, 3.0, {}}, {"n2", "s", {150, 150, 5}, 2.0, {}}};
  Mark hit, fp;
  hit.id = "m1";
  hit.centroid_mm = {101, 100, 5};
  fp.id = "m2";
  fp.centroid_mm = {30, 30, 5};
  const std::vector<Mark> marks{hit, fp};
  const auto outcome = match(truths, marks, std::vector<NonNodule>{});
  const auto stats = finding_attention(att, 50.0, outcome, truths, marks, "s", "R1");
  REQUIRE(stats.size() == 3);
  CHECK(stats[0].outcome == FindingOutcome::TP);
  CHECK(stats[0].finding_id == "n1");
  CHECK(stats[1].outcome == FindingOutcome::FN);
  CHECK(stats[2].outcome == FindingOutcome::FP);
  CHECK(stats[2].finding_id == "m2");
  CHECK(stats[2].annotator == "R1");
  // heights: 6 mm -> 7 slices, 4 mm -> 5 slices, default 5 mm -> 5 slices
  CHECK(stats[0].t_attention / stats[1].t_attention == doctest::Approx(7.0 / 5.0));
}

TEST_CASE("attention summary uses a t interval") {
  std::vector<AttentionStat> stats;
  const double vals[] = {0.08, 0.10, 0.12, 0.09, 0.11};
  for (double v : vals) stats.push_back({"n", "s", "R1", FindingOutcome::TP, v * 100, v, false});
  stats.push_back({"m", "s", "R1", FindingOutcome::FP, 3, 0.03, false});
  const auto rows = summarize_attention(stats);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].annotator == "R1");
  CHECK(rows[0].outcome == FindingOutcome::TP);
  CHECK(rows[0].mean == doctest::Approx(10.0));
  // sd of {8, 10, 12, 9, 11} is sqrt(2.5); t(0.975, 4) = 2.776445105
  CHECK(rows[0].ci_half == doctest::Approx(2.7764451051977987 * std::sqrt(2.5) / std::sqrt(5.0)));
  CHECK(std::isnan(rows[1].ci_half));
  CHECK(rows[2].annotator == "ALL");
  CHECK(rows[0].mean > rows[1].mean);
  CHECK(attention_summary_csv(rows).find("R1,TP,5,10") != std::string::npos);
}

TEST_CASE("rater range check") {
  const std::vector<int> r{4, 4, 5, 5};
  CHECK(!outside_rater_range(r, 4));
  CHECK(!outside_rater_range(r, 5));
  CHECK(outside_rater_range(r, 3));
  CHECK(outside_rater_range(std::vector<int>{3, 3, 3}, 4));
  CHECK(!outside_rater_range(std::vector<int>{3, 3, 3}, 3));
  CHECK(!outside_rater_range(std::vector<int>{2}, 2));
  CHECK(outside_rater_range(std::vector<int>{2}, 1));
}

TEST_CASE("agreement table") {
  GroundTruth gt;
  std::vector<Mark> marks;
  for (int i = 0; i < 10; ++i) {
    NoduleTruth n{fmt::format("n{}", i), "s1", {i * 40.0, 0, 0}, 3.0, {}};
    for (int r = 0; r < 4; ++r) n.raters.push_back(all_scores(3));
    gt.nodules.push_back(n);
    Mark same, one_off;
    same.id = fmt::format("a{}", i);
    same.scan_id = one_off.scan_id = "s1";
    same.annotator = "A";
    same.centroid_mm = one_off.centroid_mm = n.centroid_mm;
    same.scores = all_scores(3);
    one_off.id = fmt::format("b{}", i);
    one_off.annotator = "B";
    one_off.scores = all_scores(3);
    one_off.scores->set(kOrdinalCharacteristics[i % 7], 5);
    marks.push_back(same);
    marks.push_back(one_off);
  }
  Mark stray;
  stray.id = "c";
  stray.scan_id = "s1";
  stray.annotator = "C";
  stray.centroid_mm = {1000, 0, 0};
  stray.scores = all_scores(1);
  marks.push_back(stray);

  const auto t = characterization_agreement(gt, marks);
  REQUIRE(t.annotators == std::vector<std::string>{"A", "B"});
  CHECK(t.matched == std::vector<std::size_t>{10, 10});
  CHECK(t.warnings.size() == 1);
  REQUIRE(t.rows.size() == 12);
  for (const auto& row : t.rows) CHECK(row.percent[0] == 0.0);
  CHECK(t.rows[7].name == "All");
  CHECK(t.rows[11].name == "At least one");
  CHECK(t.rows[11].percent[1] == 100.0);
  CHECK(t.rows[10].percent[1] == 0.0);
  CHECK(t.rows[7].percent[1] == 0.0);
  CHECK(t.rows[0].percent[1] == 20.0);  // lobulation is off on nodules 0 and 7
  CHECK(t.rows[11].mean == 50.0);
  CHECK(t.rows[11].sd == doctest::Approx(std::sqrt(5000.0)));
  CHECK(agreement_csv(t).find(">=3/4") != std::string::npos);
}

TEST_CASE("agreement aggregates are monotone") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> s(1, 5), nr(1, 4);
  GroundTruth gt;
  std::vector<Mark> marks;
  for (int i = 0; i < 60; ++i) {
    NoduleTruth n{fmt::format("n{}", i), "s1", {i * 40.0, 0, 0}, 3.0, {}};
    for (int r = nr(rng); r > 0; --r) {
      CharacteristicScores cs;
      for (Characteristic c : kOrdinalCharacteristics) cs.set(c, s(rng));
      n.raters.push_back(cs);
    }
    gt.nodules.push_back(n);
    for (const char* who : {"A", "B", "C"}) {
      Mark m;
      m.id = fmt::format("{}{}", who, i);
      m.scan_id = "s1";
      m.annotator = who;
      m.centroid_mm = n.centroid_mm;
      CharacteristicScores cs;
      for (Characteristic c : kOrdinalCharacteristics) cs.set(c, s(rng));
      m.scores = cs;
      marks.push_back(m);
    }
  }
  const auto t = characterization_agreement(gt, marks);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t k = 8; k < 12; ++k) CHECK(t.rows[k].percent[a] >= t.rows[k - 1].percent[a]);
    for (std::size_t c = 0; c < 7; ++c) CHECK(t.rows[11].percent[a] >= t.rows[c].percent[a]);
    for (const auto& row : t.rows) {
      CHECK(row.percent[a] >= 0.0);
      CHECK(row.percent[a] <= 100.0);
    }
  }
}
