#include "gfk/simulate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <array>
#include <map>
#include <optional>

#include "gfk/error.hpp"

namespace gfk {
namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
bool bernoulli(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(rng); }
int poisson(std::mt19937_64& rng, double mean) { return mean > 0.0 ? std::poisson_distribution<int>(mean)(rng) : 0; }
double normal(std::mt19937_64& rng, double mean, double sd) {
  return sd > 0.0 ? std::normal_distribution<double>(mean, sd)(rng) : mean;
}

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

void require(bool ok, const std::string& what) {
  if (!ok) fail(Errc::configuration, "simulation config: " + what);
}

LungSide side_of_lung(int lung) { return lung == 0 ? LungSide::Right : LungSide::Left; }

// Random point inside lung `lung` with normalized radius at most `max_rho`, snapped to a voxel center.
Vec3 random_lung_voxel(const Phantom& ph, int lung, double max_rho, std::mt19937_64& rng) {
  const Ellipsoid& e = ph.lungs[lung];
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const Vec3 p{e.center.x + e.semi.x * uniform(rng, -1, 1), e.center.y + e.semi.y * uniform(rng, -1, 1),
                 e.center.z + e.semi.z * uniform(rng, -1, 1)};
    const Index3 v = ph.grid.nearest_voxel(p);
    if (!ph.grid.dims.contains(v)) continue;
    const Vec3 w = ph.grid.voxel_to_world(v);
    if (e.rho(w) <= max_rho) return w;
  }
  fail(Errc::configuration, "simulation config: lung too small to place a finding");
}

struct Lesion {
  Vec3 c;
  double r;
};

bool clear_of(Vec3 p, const std::vector<Lesion>& lesions, double extra_mm, double scale = 2.0) {
  return std::all_of(lesions.begin(), lesions.end(),
                     [&](const Lesion& l) { return distance(p, l.c) >= scale * l.r + extra_mm; });
}

std::vector<Lesion> lesions_of(const ScanPlan& scan) {
  std::vector<Lesion> out;
  for (const auto& n : scan.nodules) out.push_back({n.centroid_mm, n.equivalent_radius_mm});
  for (const auto& n : scan.non_nodules) out.push_back({n.centroid_mm, n.equivalent_radius_mm});
  return out;
}

// A vessel point (or, lacking vessels, any lung point) clear of every lesion.
Vec3 confounder_point(const ScanPlan& scan, bool prefer_vessel, std::mt19937_64& rng) {
  const Phantom& ph = scan.phantom;
  const auto lesions = lesions_of(scan);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec3 p;
    if (prefer_vessel && !ph.vessels.empty()) {
      const Tube& t = ph.vessels[std::uniform_int_distribution<std::size_t>(0, ph.vessels.size() - 1)(rng)];
      p = t.a + (t.b - t.a) * uniform(rng, 0.0, 1.0);
    } else {
      p = random_lung_voxel(ph, bernoulli(rng, 0.5) ? 0 : 1, 0.9, rng);
    }
    const int lung = ph.lung_of(p);
    if (lung < 0 || ph.lungs[lung].rho(p) > 0.9) continue;
    if (clear_of(p, lesions, 2.0)) return p;
  }
  fail(Errc::configuration, "simulation config: no room for a false-positive location");
}

CharacteristicScores reader_scores(const NoduleTruth& n, std::mt19937_64& rng) {
  CharacteristicScores s;
  for (Characteristic c : kAllCharacteristics) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : n.raters)
      if (const auto v = r.get(c)) {
        sum += *v;
        ++count;
      }
    const double centre = count ? sum / count : 1.0 + 0.5 * (characteristic_max(c) - 1);
    const long v = std::lround(centre + normal(rng, 0.0, 0.8));
    s.set(c, static_cast<int>(std::clamp<long>(v, 1, characteristic_max(c))));
  }
  return s;
}

}  // namespace

void SimConfig::validate() const {
  require(n_scans >= 1, "n_scans must be at least 1");
  require(n_annotators >= 1, "n_annotators must be at least 1");
  require(phantom.dims.x >= 16 && phantom.dims.y >= 16 && phantom.dims.z >= 8, "phantom grid too small");
  require(phantom.spacing_mm > 0.0, "phantom spacing must be positive");
  require(nodules_min >= 0 && nodules_min <= nodules_max, "nodule count range is empty");
  require(nodule_radius_min_mm >= kNoduleMinRadiusMm && nodule_radius_min_mm <= nodule_radius_max_mm,
          "nodule radius range invalid");
  require(non_nodules_per_scan >= 0.0, "non_nodules_per_scan must be non-negative");
  require(raters >= 1, "raters must be at least 1");
  require(reading_time_mean > 0.0 && reading_time_sd >= 0.0 && reading_time_min > 0.0, "reading times must be positive");
  require(in_unit(right_first_fraction), "right_first_fraction outside [0, 1]");
  require(right_left_time_ratio > 0.0, "right_left_time_ratio must be positive");
  require(in_unit(human_sensitivity_base), "human_sensitivity_base outside [0, 1]");
  require(attention_sensitivity_slope >= 0.0, "attention_sensitivity_slope must be non-negative");
  require(nodule_dwell_max >= 0.0 && nodule_dwell_max <= 0.5, "nodule_dwell_max outside [0, 0.5]");
  require(!(nodule_dwell_max == 0.0 && human_sensitivity_base > 0.0),
          "readers cannot detect nodules they never dwell on (nodule_dwell_max is 0)");
  require(fp_dwell_min >= 0.0 && fp_dwell_min <= fp_dwell_max && fp_dwell_max <= 0.2, "fp dwell range invalid");
  require(annotation_fraction >= 0.0 && annotation_fraction <= 0.05, "annotation_fraction outside [0, 0.05]");
  require(human_fp_rate >= 0.0, "human_fp_rate must be non-negative");
  require(in_unit(non_nodule_mark_probability), "non_nodule_mark_probability outside [0, 1]");
  require(in_unit(cade_sensitivity), "cade_sensitivity outside [0, 1]");
  require(cade_fp_per_scan > human_fp_rate, "cade_fp_per_scan must exceed human_fp_rate");
  require(cade_fp_score_max > 0.0 && cade_fp_score_max <= 1.0, "cade_fp_score_max outside (0, 1]");
  require(cade_tp_score_min >= 0.0 && cade_tp_score_min < 1.0, "cade_tp_score_min outside [0, 1)");
  require(in_unit(cade_duplicate_probability), "cade_duplicate_probability outside [0, 1]");
  require(cade_outside_per_scan >= 0.0, "cade_outside_per_scan must be non-negative");
  require(in_unit(cade_non_nodule_probability), "cade_non_nodule_probability outside [0, 1]");
  require(f > 0.0, "f must be positive");
  require(dropout_rate >= 0.0 && dropout_rate < 1.0, "dropout_rate outside [0, 1)");
  require(fixation_s > 0.0, "fixation_s must be positive");
  require(display.px_pitch > 0.0 && display.zoom >= 0.0, "display settings invalid");
  require(display.window.width > 0.0 && display.window.height > 0.0, "display window is empty");
  const double p_see = cade_detect_probability();
  require(p_see <= 1.0, fmt::format("cade_sensitivity {} unreachable at the matched operating point (needs detection "
                                    "probability {:.3f})",
                                    cade_sensitivity, p_see));
}

double SimConfig::zoom() const {
  if (display.zoom > 0.0) return display.zoom;
  return std::min(display.window.width / phantom.dims.x, display.window.height / phantom.dims.y);
}

double SimConfig::cade_reference_threshold() const {
  return cade_fp_score_max * (1.0 - human_fp_rate / cade_fp_per_scan);
}

double SimConfig::cade_detect_probability() const {
  const double theta = std::max(cade_reference_threshold(), cade_tp_score_min);
  const double above = (1.0 - theta) / (1.0 - cade_tp_score_min);
  return above > 0.0 ? cade_sensitivity / above : std::numeric_limits<double>::infinity();
}

double SimConfig::detection_probability(double dwell_fraction) const {
  return std::clamp(human_sensitivity_base + attention_sensitivity_slope * dwell_fraction, 0.0, 1.0);
}

std::string sim_scan_id(int index) { return fmt::format("scan-{:03d}", index + 1); }
std::string sim_annotator_id(int index) { return fmt::format("R{}", index + 1); }

std::mt19937_64 sim_rng(const SimConfig& cfg, int scan_index, int annotator_index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(scan_index), static_cast<std::uint32_t>(annotator_index + 1),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Phantom sim_anatomy(const SimConfig& cfg) { return make_anatomy(cfg.phantom); }

ScanPlan plan_scan(const SimConfig& cfg, const Phantom& anatomy, int index) {
  auto rng = sim_rng(cfg, index, -1, 1);
  ScanPlan scan;
  scan.scan_id = sim_scan_id(index);
  scan.index = index;
  scan.phantom = anatomy;
  add_vessels(scan.phantom, cfg.phantom.vessels_per_lung, rng);

  std::vector<Lesion> placed;
  auto place = [&](double r) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Vec3 c = random_lung_voxel(scan.phantom, bernoulli(rng, 0.5) ? 0 : 1, 0.7, rng);
      if (std::all_of(placed.begin(), placed.end(), [&](const Lesion& l) { return distance(c, l.c) >= 30.0; })) {
        placed.push_back({c, r});
        return c;
      }
    }
    fail(Errc::configuration, "simulation config: too many lesions for the lung volume");
  };

  const int n_nodules = std::uniform_int_distribution<int>(cfg.nodules_min, cfg.nodules_max)(rng);
  for (int k = 0; k < n_nodules; ++k) {
    NoduleTruth n;
    n.id = fmt::format("n{}", k + 1);
    n.scan_id = scan.scan_id;
    n.equivalent_radius_mm = uniform(rng, cfg.nodule_radius_min_mm, cfg.nodule_radius_max_mm);
    n.centroid_mm = place(n.equivalent_radius_mm);
    for (int r = 0; r < cfg.raters; ++r) n.raters.emplace_back();
    for (Characteristic c : kAllCharacteristics) {
      const int top = characteristic_max(c);
      const int base = std::uniform_int_distribution<int>(1, top)(rng);
      for (auto& r : n.raters) r.set(c, std::clamp(base + std::uniform_int_distribution<int>(-1, 1)(rng), 1, top));
    }
    scan.phantom.nodules.push_back({n.centroid_mm, n.equivalent_radius_mm});
    scan.nodules.push_back(std::move(n));
  }
  const int n_non = poisson(rng, cfg.non_nodules_per_scan);
  for (int k = 0; k < n_non; ++k) {
    NonNodule n;
    n.id = fmt::format("nn{}", k + 1);
    n.scan_id = scan.scan_id;
    n.equivalent_radius_mm = uniform(rng, 1.5, 3.0);
    n.centroid_mm = place(n.equivalent_radius_mm);
    scan.phantom.non_nodules.push_back({n.centroid_mm, n.equivalent_radius_mm});
    scan.non_nodules.push_back(std::move(n));
  }
  return scan;
}

std::vector<Candidate> simulate_cade(const SimConfig& cfg, const ScanPlan& scan) {
  auto rng = sim_rng(cfg, scan.index, -1, 2);
  const double p_see = cfg.cade_detect_probability();
  std::vector<Candidate> out;
  auto add = [&](Vec3 c, double w, double h, double score) {
    out.push_back({fmt::format("c{}", out.size() + 1), scan.scan_id, c, w, h, score});
  };
  for (const auto& n : scan.nodules) {
    if (!bernoulli(rng, p_see)) continue;
    const double r = n.equivalent_radius_mm;
    const double s = uniform(rng, cfg.cade_tp_score_min, 1.0);
    const Vec3 c = n.centroid_mm + Vec3{normal(rng, 0, 0.15 * r), normal(rng, 0, 0.15 * r), normal(rng, 0, 0.15 * r)};
    const double w = 2 * r * uniform(rng, 0.9, 1.3), h = 2 * r * uniform(rng, 0.9, 1.3);
    add(c, w, h, s);
    if (bernoulli(rng, cfg.cade_duplicate_probability)) {
      Vec3 dir{normal(rng, 0, 1), normal(rng, 0, 1), normal(rng, 0, 1)};
      dir = dir * (uniform(rng, 0.5, 1.0) / std::max(1e-9, norm(dir)));
      add(c + dir, w * uniform(rng, 0.9, 1.1), h * uniform(rng, 0.9, 1.1), s * uniform(rng, 0.7, 1.0));
    }
  }
  for (const auto& n : scan.non_nodules) {
    if (!bernoulli(rng, cfg.cade_non_nodule_probability)) continue;
    const double r = n.equivalent_radius_mm;
    add(n.centroid_mm + Vec3{normal(rng, 0, 0.1 * r), normal(rng, 0, 0.1 * r), 0.0}, 2 * r, 2 * r,
        uniform(rng, 0.3, 0.9));
  }
  const int n_fp = poisson(rng, cfg.cade_fp_per_scan);
  for (int k = 0; k < n_fp; ++k) {
    const Vec3 c = confounder_point(scan, bernoulli(rng, 0.5), rng);
    add(c, uniform(rng, 3.0, 8.0), uniform(rng, 3.0, 8.0), uniform(rng, 0.0, cfg.cade_fp_score_max));
  }
  const int n_out = poisson(rng, cfg.cade_outside_per_scan);
  const Phantom& ph = scan.phantom;
  for (int k = 0; k < n_out; ++k) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Vec3 p{ph.body_center.x + ph.body_semi_x * uniform(rng, -1, 1),
                   ph.body_center.y + ph.body_semi_y * uniform(rng, -1, 1),
                   ph.lungs[0].center.z + ph.lungs[0].semi.z * uniform(rng, -0.8, 0.8)};
      if (!ph.in_body(p) || ph.lungs[0].rho(p) < 1.2 || ph.lungs[1].rho(p) < 1.2) continue;
      add(p, uniform(rng, 3.0, 8.0), uniform(rng, 3.0, 8.0), uniform(rng, 0.0, 1.0));
      break;
    }
  }
  return out;
}

ReaderPlan simulate_reader(const SimConfig& cfg, const ScanPlan& scan, int annotator_index, std::mt19937_64& rng) {
  ReaderPlan plan;
  plan.scan_id = scan.scan_id;
  plan.annotator = sim_annotator_id(annotator_index);
  plan.reading_time = std::max(cfg.reading_time_min, normal(rng, cfg.reading_time_mean, cfg.reading_time_sd));
  plan.right_first = bernoulli(rng, cfg.right_first_fraction);
  const Phantom& ph = scan.phantom;

  for (const auto& n : scan.nodules)
    plan.dwells.push_back({DwellKind::nodule, n.id, n.centroid_mm, side_of_lung(ph.lung_of(n.centroid_mm)),
                           uniform(rng, 0.0, cfg.nodule_dwell_max), false});
  const int n_fp = poisson(rng, cfg.human_fp_rate);
  for (int k = 0; k < n_fp; ++k) {
    const Vec3 p = confounder_point(scan, true, rng);
    plan.dwells.push_back({DwellKind::false_positive, fmt::format("fp{}", k + 1), p, side_of_lung(ph.lung_of(p)),
                           uniform(rng, cfg.fp_dwell_min, cfg.fp_dwell_max), true});
  }
  for (const auto& n : scan.non_nodules) {
    if (!bernoulli(rng, cfg.non_nodule_mark_probability)) continue;
    plan.dwells.push_back({DwellKind::non_nodule, n.id, n.centroid_mm, side_of_lung(ph.lung_of(n.centroid_mm)),
                           uniform(rng, 0.01, 0.04), true});
  }

  // Keep each side's dwell within 80% of its share of the gaze time, assuming every dwell annotates.
  const double share_right = cfg.right_left_time_ratio / (1.0 + cfg.right_left_time_ratio);
  const double gaze_min = 1.0 - cfg.annotation_fraction * double(plan.dwells.size());
  for (LungSide side : {LungSide::Right, LungSide::Left}) {
    const double cap = 0.8 * gaze_min * (side == LungSide::Right ? share_right : 1.0 - share_right);
    double sum = 0.0;
    for (const auto& d : plan.dwells)
      if (d.side == side) sum += d.fraction;
    if (sum > cap)
      for (auto& d : plan.dwells)
        if (d.side == side) d.fraction *= cap / sum;
  }

  auto next_id = [&plan] { return fmt::format("m{}", plan.marks.size() + 1); };
  for (auto& d : plan.dwells) {
    Mark m;
    m.scan_id = scan.scan_id;
    m.annotator = plan.annotator;
    if (d.kind == DwellKind::nodule) {
      d.annotate = bernoulli(rng, cfg.detection_probability(d.fraction));
      if (!d.annotate) continue;
      const auto& n = *std::find_if(scan.nodules.begin(), scan.nodules.end(),
                                    [&](const NoduleTruth& t) { return t.id == d.finding_id; });
      const double r = n.equivalent_radius_mm;
      Vec3 off{normal(rng, 0, 0.2 * r), normal(rng, 0, 0.2 * r), normal(rng, 0, 0.2 * r)};
      if (norm(off) > 0.6 * r) off = off * (0.6 * r / norm(off));
      m.centroid_mm = n.centroid_mm + off;
      m.equivalent_diameter_mm = 2.0 * r * uniform(rng, 0.8, 1.2);
      m.scores = reader_scores(n, rng);
    } else if (d.kind == DwellKind::false_positive) {
      m.centroid_mm = d.center_mm;
      m.equivalent_diameter_mm = uniform(rng, 3.0, 6.0);
      CharacteristicScores s;
      for (Characteristic c : kAllCharacteristics)
        s.set(c, std::uniform_int_distribution<int>(1, characteristic_max(c))(rng));
      m.scores = s;
    } else {
      m.kind = MarkKind::non_nodule_point;
      m.centroid_mm = d.center_mm;
    }
    m.id = next_id();
    plan.marks.push_back(std::move(m));
  }
  return plan;
}

SessionLogs synthesize_gaze(const SimConfig& cfg, const ScanPlan& scan, const LungMask& mask, const ReaderPlan& plan,
                            std::mt19937_64& rng) {
  const Grid& g = mask.grid();
  const double zoom = cfg.zoom();
  const double T = plan.reading_time;

  // in-mask voxels per (side, slice)
  std::array<std::vector<std::vector<std::pair<int, int>>>, 2> voxels;
  for (auto& v : voxels) v.resize(g.dims.z);
  for (int z = 0; z < g.dims.z; ++z)
    for (int y = 0; y < g.dims.y; ++y)
      for (int x = 0; x < g.dims.x; ++x)
        if (mask.contains({x, y, z})) voxels[side_of(mask, {x, y, z}) == LungSide::Right ? 0 : 1][z].emplace_back(x, y);
  auto side_index = [](LungSide s) { return s == LungSide::Right ? 0 : 1; };

  const auto n_samples = static_cast<std::size_t>(std::floor(T * cfg.f)) + 1;
  const double total = double(n_samples) / cfg.f;
  std::size_t annotations = 0;
  std::array<double, 2> dwell{0.0, 0.0};
  for (const auto& d : plan.dwells) {
    dwell[side_index(d.side)] += d.fraction * T;
    if (d.annotate) ++annotations;
  }
  const double gaze_time = total - double(annotations) * cfg.annotation_fraction * T;
  const double share_right = cfg.right_left_time_ratio / (1.0 + cfg.right_left_time_ratio);
  const std::array<double, 2> sweep{std::max(0.0, share_right * gaze_time - dwell[0]),
                                    std::max(0.0, (1.0 - share_right) * gaze_time - dwell[1])};

  enum class SegKind { sweep, focus };
  struct Segment {
    double dur;
    int z;
    int side;
    bool annotating;
    SegKind kind;
    Vec3 focus;  // continuous voxel coordinates
  };
  std::vector<Segment> segs;
  const int first = plan.right_first ? 0 : 1, second = 1 - first;
  struct Pass {
    int side;
    bool down;
    double dur;
  };
  const std::array<Pass, 4> passes{Pass{first, true, 0.6 * sweep[first]}, Pass{second, true, 0.5 * sweep[second]},
                                   Pass{second, false, 0.5 * sweep[second]}, Pass{first, false, 0.4 * sweep[first]}};
  std::array<bool, 2> dwelled{false, false};
  for (const Pass& p : passes) {
    std::vector<int> zs;
    for (int z = 0; z < g.dims.z; ++z)
      if (!voxels[p.side][z].empty()) zs.push_back(z);
    if (zs.empty()) fail(Errc::configuration, "simulation config: a lung has no voxels in the mask");
    if (!p.down) std::reverse(zs.begin(), zs.end());
    const bool insert = !dwelled[p.side];
    dwelled[p.side] = true;
    std::vector<char> done(plan.dwells.size(), 0);
    auto emit_dwell = [&](std::size_t i) {
      const Dwell& d = plan.dwells[i];
      Vec3 v = g.world_to_voxel(d.center_mm);
      const int z = static_cast<int>(std::lround(v.z));
      v = {v.x + 0.5, v.y + 0.5, double(z)};
      segs.push_back({d.fraction * T, z, p.side, false, SegKind::focus, v});
      if (d.annotate) segs.push_back({cfg.annotation_fraction * T, z, p.side, true, SegKind::focus, v});
      done[i] = 1;
    };
    for (int z : zs) {
      segs.push_back({p.dur / double(zs.size()), z, p.side, false, SegKind::sweep, {}});
      if (!insert) continue;
      for (std::size_t i = 0; i < plan.dwells.size(); ++i) {
        const Dwell& d = plan.dwells[i];
        if (side_index(d.side) == p.side && g.nearest_voxel(d.center_mm).z == z) emit_dwell(i);
      }
    }
    if (insert)
      for (std::size_t i = 0; i < plan.dwells.size(); ++i)
        if (!done[i] && side_index(plan.dwells[i].side) == p.side) emit_dwell(i);
  }

  SessionLogs logs;
  logs.samples.reserve(n_samples);
  ViewportState base;
  base.zoom = zoom;
  base.win = cfg.display.window;
  base.px_pitch = cfg.display.px_pitch;

  std::size_t seg = 0;
  double seg_start = 0.0;
  long fixation = -1;
  Vec3 fix{};
  bool state_emitted = false;
  std::normal_distribution<double> jitter(0.0, 0.6);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = double(i) / cfg.f;
    while (seg + 1 < segs.size() && t >= seg_start + segs[seg].dur) {
      seg_start += segs[seg].dur;
      ++seg;
      fixation = -1;
      state_emitted = false;
    }
    const Segment& s = segs[seg];
    if (!state_emitted) {
      ViewportState st = base;
      st.t = std::min(seg_start, t);
      st.z = s.z;
      st.annotating = s.annotating;
      logs.states.push_back(st);
      state_emitted = true;
    }
    const long fx = static_cast<long>(std::floor((t - seg_start) / cfg.fixation_s));
    if (fx != fixation) {
      fixation = fx;
      if (s.kind == SegKind::sweep) {
        const auto& list = voxels[s.side][s.z];
        const auto [x, y] = list[std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng)];
        fix = {x + 0.5, y + 0.5, double(s.z)};
      } else {
        fix = s.focus;
        const Vec3 cand{s.focus.x + jitter(rng), s.focus.y + jitter(rng), s.focus.z};
        const Index3 v{static_cast<int>(std::floor(cand.x)), static_cast<int>(std::floor(cand.y)), s.z};
        if (mask.contains(v) && (side_of(mask, v) == LungSide::Right ? 0 : 1) == s.side) fix = cand;
      }
    }
    Vec3 pos = fix;
    if (s.kind == SegKind::sweep) {
      pos.x = std::floor(fix.x) + uniform(rng, 0.05, 0.95);
      pos.y = std::floor(fix.y) + uniform(rng, 0.05, 0.95);
    }
    GazeSample gs{t, base.win.left + pos.x * zoom, base.win.top + pos.y * zoom};
    if (i > 0 && i + 1 < n_samples && bernoulli(rng, cfg.dropout_rate))
      gs.sx = gs.sy = std::numeric_limits<double>::quiet_NaN();
    logs.samples.push_back(gs);
  }
  (void)scan;
  return logs;
}

GazeSession to_session(const SessionLogs& logs, double f_nominal) {
  GazeSession s;
  for (const auto& g : logs.samples) {
    if (std::isnan(g.sx) || std::isnan(g.sy)) {
      ++s.dropouts;
      continue;
    }
    s.samples.push_back(g);
  }
  s.states = logs.states;
  s.f_nominal = f_nominal;
  s.f = estimate_frequency(s.samples).value_or(f_nominal);
  return s;
}

std::vector<std::string> SimStudy::scan_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : scans) ids.push_back(s.scan_id);
  return ids;
}

SimStudy simulate_study(const SimConfig& cfg, bool with_gaze, const LungMask* mask) {
  cfg.validate();
  SimStudy study;
  study.cfg = cfg;
  study.anatomy = sim_anatomy(cfg);
  std::optional<LungMask> own;
  if (with_gaze && mask == nullptr) {
    own.emplace(analytic_lung_mask(study.anatomy));
    mask = &*own;
  }
  for (int i = 0; i < cfg.n_scans; ++i) {
    ScanPlan scan = plan_scan(cfg, study.anatomy, i);
    const auto cands = simulate_cade(cfg, scan);
    study.candidates.insert(study.candidates.end(), cands.begin(), cands.end());
    study.truth.nodules.insert(study.truth.nodules.end(), scan.nodules.begin(), scan.nodules.end());
    study.truth.non_nodules.insert(study.truth.non_nodules.end(), scan.non_nodules.begin(), scan.non_nodules.end());
    for (int a = 0; a < cfg.n_annotators; ++a) {
      auto rng = sim_rng(cfg, i, a, 3);
      SimSession session;
      session.plan = simulate_reader(cfg, scan, a, rng);
      if (with_gaze) session.logs = synthesize_gaze(cfg, scan, *mask, session.plan, rng);
      study.marks.insert(study.marks.end(), session.plan.marks.begin(), session.plan.marks.end());
      study.sessions.push_back(std::move(session));
    }
    study.scans.push_back(std::move(scan));
  }
  return study;
}

}  // namespace gfk
