#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gfk/analytics.hpp"
#include "gfk/attention.hpp"
#include "gfk/error.hpp"
#include "gfk/evaluation.hpp"
#include "gfk/simulate.hpp"
#include "support.hpp"

using namespace gfk;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::io;
}

std::string logs_text(const SessionLogs& logs) {
  std::ostringstream g, v;
  write_gaze_log(g, logs.samples, 90.0);
  write_viewport_log(v, logs.states);
  return g.str() + v.str();
}

struct GazeStudy {
  SimConfig cfg;
  Phantom anatomy;
  LungMask mask;
  SimStudy study;
};

// 25 scans x 4 annotators = 100 sessions, built once.
const GazeStudy& gaze_study() {
  static const GazeStudy s = [] {
    SimConfig cfg;
    cfg.seed = 3;
    cfg.n_scans = 25;
    Phantom anatomy = sim_anatomy(cfg);
    LungMask mask = analytic_lung_mask(anatomy);
    SimStudy study = simulate_study(cfg, true, &mask);
    return GazeStudy{cfg, std::move(anatomy), std::move(mask), std::move(study)};
  }();
  return s;
}

}  // namespace

TEST_CASE("a fixed seed reproduces the study exactly") {
  SimConfig cfg;
  cfg.seed = 11;
  cfg.n_scans = 3;
  const auto mask = analytic_lung_mask(sim_anatomy(cfg));
  const auto a = simulate_study(cfg, true, &mask);
  const auto b = simulate_study(cfg, true, &mask);
  CHECK(a.truth == b.truth);
  CHECK(a.marks == b.marks);
  CHECK(a.candidates == b.candidates);
  REQUIRE(a.sessions.size() == 12);
  for (std::size_t i = 0; i < a.sessions.size(); ++i) CHECK(logs_text(a.sessions[i].logs) == logs_text(b.sessions[i].logs));
  cfg.seed = 12;
  CHECK(simulate_study(cfg, false).marks != a.marks);
}

TEST_CASE("invalid configurations are rejected") {
  auto bad = [](auto edit) {
    SimConfig cfg;
    edit(cfg);
    return code_of([&] { cfg.validate(); });
  };
  CHECK(bad([](SimConfig& c) { c.right_first_fraction = 1.5; }) == Errc::configuration);
  CHECK(bad([](SimConfig& c) { c.reading_time_mean = 0; }) == Errc::configuration);
  CHECK(bad([](SimConfig& c) { c.n_scans = 0; }) == Errc::configuration);
  CHECK(bad([](SimConfig& c) { c.cade_sensitivity = 1.0; }) == Errc::configuration);  // p_see above 1
  CHECK(bad([](SimConfig& c) {
          c.human_sensitivity_base = 1.0;
          c.nodule_dwell_max = 0.0;
        }) == Errc::configuration);
  CHECK(bad([](SimConfig& c) { c.nodules_min = 4, c.nodules_max = 2; }) == Errc::configuration);
  CHECK(bad([](SimConfig& c) { c.f = -1; }) == Errc::configuration);
  SimConfig ok;
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.detection_probability(0.0) == doctest::Approx(0.09));
  CHECK(ok.detection_probability(0.1) == doctest::Approx(0.59));
  CHECK(ok.detection_probability(0.5) == 1.0);
}

TEST_CASE("generated artifacts pass their schemas") {
  SimConfig cfg;
  cfg.seed = 21;
  cfg.n_scans = 10;
  const auto st = simulate_study(cfg, false);
  CHECK(parse_truth(dump_truth(st.truth)) == st.truth);
  CHECK(parse_marks(dump_marks(st.marks)) == st.marks);
  CHECK(parse_candidates(dump_candidates(st.candidates)) == st.candidates);
  CHECK(st.scan_ids().size() == 10);
  for (const auto& n : st.truth.nodules) {
    CHECK(n.equivalent_radius_mm >= kNoduleMinRadiusMm);
    CHECK(n.raters.size() == 4);
  }
  const auto& g = st.anatomy.grid;
  for (const auto& m : st.marks) CHECK(g.dims.contains(g.nearest_voxel(m.centroid_mm)));
}

TEST_CASE("gaze maps into the mask and lasts the planned reading time") {
  const auto& s = gaze_study();
  REQUIRE(s.study.sessions.size() == 100);
  for (const auto& ss : s.study.sessions) {
    const auto sess = to_session(ss.logs, s.cfg.f);
    CHECK(std::abs(sess.reading_time() - ss.plan.reading_time) <= 1.0 / s.cfg.f + 1e-9);
    const auto pts = map_to_voxels(sess, s.mask);
    CHECK(pts.size() > sess.samples.size() / 2);
    for (const auto& st : ss.logs.states) {
      CHECK(st.z >= 0);
      CHECK(st.z < s.mask.dims().z);
    }
  }
}

TEST_CASE("right to left time ratio is 1.2 over 100 sessions") {
  const auto& s = gaze_study();
  std::vector<SessionSummary> sums;
  std::vector<LungTimeline> tls;
  for (const auto& ss : s.study.sessions) {
    const auto sess = to_session(ss.logs, s.cfg.f);
    const auto pts = map_to_voxels(sess, s.mask);
    sums.push_back(summarize_session(sess, pts, s.mask, ss.plan.scan_id, ss.plan.annotator));
    tls.push_back(make_timeline(pts, s.mask, sess.start_time(), sess.reading_time()));
  }
  const auto all = reading_time_stats(sums).back();
  CHECK(all.right_left_ratio == doctest::Approx(1.2).epsilon(0.05 / 1.2));
  const auto curve = right_lung_curve(tls);
  double early = 0.0;
  for (int b = 0; b < 30; ++b) early += curve.p[b] / 30;
  CHECK(early > 0.8);  // drilling starts on the right lung
}

TEST_CASE("detection rate rises with realised attention") {
  const auto& s = gaze_study();
  std::vector<std::pair<double, bool>> seen;  // (t_norm, detected)
  for (const auto& ss : s.study.sessions) {
    const auto sess = to_session(ss.logs, s.cfg.f);
    const auto pts = map_to_voxels(sess, s.mask);
    const auto att = splat(group_by_sigma(pts, sess.states), sess.f, s.mask.grid());
    const auto truths = for_scan<NoduleTruth>(s.study.truth.nodules, ss.plan.scan_id);
    const auto non = for_scan<NonNodule>(s.study.truth.non_nodules, ss.plan.scan_id);
    const auto outcome = match(truths, ss.plan.marks, non);
    for (const auto& a : finding_attention(att, sess.reading_time(), outcome, truths, ss.plan.marks, ss.plan.scan_id,
                                           ss.plan.annotator))
      if (a.outcome != FindingOutcome::FP) seen.emplace_back(a.t_norm, a.outcome == FindingOutcome::TP);
  }
  std::sort(seen.begin(), seen.end());
  const std::size_t q = seen.size() / 4;
  std::vector<double> rate;
  for (int k = 0; k < 4; ++k) {
    const auto lo = seen.begin() + k * q, hi = k == 3 ? seen.end() : lo + q;
    rate.push_back(double(std::count_if(lo, hi, [](auto& p) { return p.second; })) / double(hi - lo));
  }
  MESSAGE("detection by attention quartile: " << rate[0] << " " << rate[1] << " " << rate[2] << " " << rate[3]);
  for (int k = 1; k < 4; ++k) CHECK(rate[k] >= rate[k - 1]);
}

TEST_CASE("rendered phantom segments close to its analytic lungs") {
  SimConfig cfg;
  const auto plan = plan_scan(cfg, sim_anatomy(cfg), 0);
  auto rng = sim_rng(cfg, 0, -1, 4);
  const auto scan = render_phantom(plan.phantom, cfg.noise_hu, rng);
  const auto est = estimate_lung_mask(scan);
  const auto ref = analytic_lung_mask(plan.phantom);
  CHECK(gfk::testing::dice(est.bits(), ref.bits()) >= 0.95);
  CHECK(std::abs(est.split_x() - ref.split_x()) <= 1);
}
