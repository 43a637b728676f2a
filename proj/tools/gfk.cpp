// gfk: study pipeline front end (mask, attention, eval, combine, fuse, analytics, stats, simulate, report).
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "gfk/analytics.hpp"
#include "gfk/attention.hpp"
#include "gfk/error.hpp"
#include "gfk/evaluation.hpp"
#include "gfk/fusion.hpp"
#include "gfk/gaze.hpp"
#include "gfk/log.hpp"
#include "gfk/metaimage.hpp"
#include "gfk/model.hpp"
#include "gfk/simulate.hpp"
#include "gfk/stats.hpp"
#include "gfk/study_io.hpp"
#include "gfk/svg.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace gfk;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

struct Options {
  fs::path study;
  int jobs = 1;
  bool flip_lr = false;
  bool match_radius = false;
  double hu_threshold = -400.0;
  double closing_mm = 5.0;
  std::string fusion_mode = "all";
  double attention_threshold = 0.10;
  double fp_target = 0.001;
  std::optional<double> score_threshold;
  std::uint64_t seed = 1;
  int scans = 20;
  int annotators = 4;
  std::string a;
  std::string b;
  double dedup_mm = 1.0;

  StudyLayout layout() const { return StudyLayout{study}; }
  MatchRule rule() const { return MatchRule{match_radius}; }
};

void require_input(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) fail(Errc::configuration, fmt::format("missing input: {} ({})", what, path.string()));
}

/// Runs fn(i) for i < n on up to `jobs` threads; the lowest-index failure is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp<long>(jobs, 1, static_cast<long>(std::max<std::size_t>(n, 1))));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct SessionRef {
  std::string annotator;
  std::string scan;
};

std::vector<SessionRef> list_sessions(const StudyLayout& layout) {
  std::vector<SessionRef> out;
  for (const auto& a : layout.session_annotators())
    for (const auto& s : list_stems(layout.sessions_dir() / a, ".gaze.jsonl")) out.push_back({a, s});
  if (out.empty()) fail(Errc::configuration, fmt::format("missing input: no gaze sessions under {}", layout.sessions_dir().string()));
  return out;
}

std::vector<std::string> require_scans(const StudyLayout& layout) {
  auto scans = layout.scan_ids();
  if (scans.empty()) fail(Errc::configuration, fmt::format("missing input: no scans under {}", layout.scans_dir().string()));
  return scans;
}

LungMask require_mask(const Options& opt, const std::string& scan) {
  const auto path = opt.layout().mask_path(scan);
  require_input(path, fmt::format("lung mask of {} (run `gfk mask`)", scan));
  return load_mask(path, opt.flip_lr);
}

GazeSession load_session(const StudyLayout& layout, const SessionRef& s) {
  return parse_session(layout.gaze_path(s.annotator, s.scan), layout.viewport_path(s.annotator, s.scan));
}

GroundTruth require_truth(const StudyLayout& layout) {
  require_input(layout.truth_path(), "ground truth");
  return load_truth(layout.truth_path());
}

std::string fused_slug(const FusionPolicy& p) {
  return p.mode == FusionMode::all ? "all" : fmt::format("low_attention-{:.2f}", p.attention_threshold);
}

// ---------------------------------------------------------------- subcommands

void cmd_simulate(const Options& opt) {
  SimConfig cfg;
  cfg.seed = opt.seed;
  cfg.n_scans = opt.scans;
  cfg.n_annotators = opt.annotators;
  cfg.validate();
  const Phantom anatomy = sim_anatomy(cfg);
  const LungMask mask = analytic_lung_mask(anatomy);
  const SimStudy study = simulate_study(cfg, true, &mask);
  write_sim_study(study, opt.layout());
  log::info(fmt::format("simulated {} scans x {} annotators into {}", cfg.n_scans, cfg.n_annotators, opt.study.string()));
}

void cmd_mask(const Options& opt) {
  const auto layout = opt.layout();
  const auto scans = require_scans(layout);
  LungMaskOptions mo;
  mo.hu_threshold = opt.hu_threshold;
  mo.closing_radius_mm = opt.closing_mm;
  mo.flip_lr = opt.flip_lr;
  if (!(mo.closing_radius_mm >= 0.0)) fail(Errc::parameter, "closing radius must be non-negative");
  parallel_for(scans.size(), opt.jobs, [&](std::size_t i) {
    const auto mask = estimate_lung_mask(read_metaimage(layout.scan_path(scans[i])), mo);
    fs::create_directories(layout.masks_dir());
    save_mask(layout.mask_path(scans[i]), mask);
    log::debug(fmt::format("mask {}: {} voxels, split_x {}", scans[i], mask.volume(), mask.split_x()));
  });
  log::info(fmt::format("wrote {} lung masks", scans.size()));
}

void cmd_attention(const Options& opt) {
  const auto layout = opt.layout();
  const auto sessions = list_sessions(layout);
  parallel_for(sessions.size(), opt.jobs, [&](std::size_t i) {
    const auto& s = sessions[i];
    const LungMask mask = require_mask(opt, s.scan);
    const GazeSession session = load_session(layout, s);
    for (const auto& w : session.warnings) log::warn(fmt::format("{}/{}: {}", s.annotator, s.scan, w));
    const auto points = map_to_voxels(session, mask);
    const auto att = splat(group_by_sigma(points, session.states), session.f, mask.grid());
    const auto path = layout.attention_path(s.annotator, s.scan);
    fs::create_directories(path.parent_path());
    write_attention(path, att);
  });
  log::info(fmt::format("wrote {} attention volumes", sessions.size()));
}

void cmd_combine(const Options& opt) {
  const auto layout = opt.layout();
  if (opt.a.empty() || opt.b.empty()) fail(Errc::configuration, "combine needs --a and --b annotators");
  require_input(layout.marks_path(opt.a), fmt::format("marks of {}", opt.a));
  require_input(layout.marks_path(opt.b), fmt::format("marks of {}", opt.b));
  const auto a = load_marks(layout.marks_path(opt.a));
  const auto b = load_marks(layout.marks_path(opt.b));
  const auto out = combine(a, b, opt.dedup_mm);
  save_marks(layout.combined_dir() / (opt.a + "+" + opt.b + ".json"), out);
  log::info(fmt::format("combined {} + {}: {} marks", opt.a, opt.b, out.size()));
}

void cmd_fuse(const Options& opt) {
  const auto layout = opt.layout();
  FusionPolicy policy;
  policy.mode = parse_fusion_mode(opt.fusion_mode);
  policy.attention_threshold = opt.attention_threshold;
  policy.validate();
  require_input(layout.candidates_path(), "CADe candidates");
  const auto scans = require_scans(layout);
  const auto annotators = layout.mark_annotators();
  if (annotators.empty()) fail(Errc::configuration, fmt::format("missing input: no marks under {}", layout.marks_dir().string()));

  // lung filtering and merging, per scan
  const auto raw = load_candidates(layout.candidates_path());
  std::vector<std::vector<Candidate>> per_scan(scans.size());
  parallel_for(scans.size(), opt.jobs, [&](std::size_t i) {
    per_scan[i] = postprocess_candidates(for_scan<Candidate>(raw, scans[i]), require_mask(opt, scans[i]));
  });
  std::vector<Candidate> cands;
  for (auto& c : per_scan) cands.insert(cands.end(), c.begin(), c.end());

  if (opt.score_threshold) {
    policy.score_threshold = *opt.score_threshold;
  } else {
    policy.score_threshold = calibrate_operating_point(require_truth(layout), cands, scans.size(), opt.fp_target, opt.rule());
    log::info(fmt::format("CADe threshold {:.6f} at {} FP/scan", policy.score_threshold, opt.fp_target));
  }
  policy.validate();

  const fs::path dir = layout.fused_dir() / fused_slug(policy);
  for (const auto& a : annotators) {
    const auto marks = load_marks(layout.marks_path(a));
    std::vector<std::vector<Mark>> fused(scans.size());
    parallel_for(scans.size(), opt.jobs, [&](std::size_t i) {
      std::optional<AttentionVolume> att;
      double reading_time = 0.0;
      if (policy.mode == FusionMode::low_attention) {
        const SessionRef s{a, scans[i]};
        require_input(layout.attention_path(a, scans[i]), fmt::format("attention of {}/{} (run `gfk attention`)", a, scans[i]));
        att = read_attention(layout.attention_path(a, scans[i]));
        reading_time = load_session(layout, s).reading_time();
      }
      fused[i] = fuse(for_scan<Mark>(marks, scans[i]), per_scan[i], att ? &*att : nullptr, reading_time, policy);
      for (auto& m : fused[i]) m.annotator = a;
    });
    std::vector<Mark> out;
    for (auto& f : fused) out.insert(out.end(), f.begin(), f.end());
    save_marks(dir / (a + ".json"), out);
  }
  nlohmann::ordered_json meta;
  meta["label"] = policy.label();
  meta["mode"] = to_string(policy.mode);
  meta["attention_threshold"] = policy.attention_threshold;
  meta["score_threshold"] = policy.score_threshold;
  write_text_file(dir / "policy.json", meta.dump(2) + "\n");
  log::info(fmt::format("{}: fused {} annotators", policy.label(), annotators.size()));
}

struct MarkSet {
  std::string stem;
  std::string label;
  fs::path path;
  std::string base;  // annotator of a fused set
};

std::vector<MarkSet> mark_sets(const StudyLayout& layout) {
  std::vector<MarkSet> out;
  for (const auto& a : layout.mark_annotators()) out.push_back({a, a, layout.marks_path(a), {}});
  for (const auto& c : list_stems(layout.combined_dir(), ".json"))
    out.push_back({"combined-" + c, "combined " + c, layout.combined_dir() / (c + ".json"), {}});
  if (fs::is_directory(layout.fused_dir())) {
    std::vector<std::string> dirs;
    for (const auto& e : fs::directory_iterator(layout.fused_dir()))
      if (e.is_directory()) dirs.push_back(e.path().filename().string());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      const fs::path dir = layout.fused_dir() / d;
      std::string label = d;
      if (fs::exists(dir / "policy.json"))
        label = nlohmann::json::parse(read_text_file(dir / "policy.json")).value("label", d);
      for (const auto& a : list_stems(dir, ".json")) {
        if (a == "policy") continue;
        out.push_back({"fused-" + d + "-" + a, fmt::format("{} ({})", label, a), dir / (a + ".json"), a});
      }
    }
  }
  return out;
}

void cmd_eval(const Options& opt) {
  const auto layout = opt.layout();
  const GroundTruth truth = require_truth(layout);
  const auto sets = mark_sets(layout);
  if (sets.empty()) fail(Errc::configuration, fmt::format("missing input: no marks under {}", layout.marks_dir().string()));
  const auto scans = layout.scan_ids();
  std::vector<EvalReport> reports(sets.size());
  parallel_for(sets.size(), opt.jobs, [&](std::size_t i) {
    reports[i] = evaluate(truth, load_marks(sets[i].path), scans, opt.rule());
  });
  std::string summary = "stem,label,sensitivity,fp_per_scan,tp,fp,fn,ignored,scans\n";
  for (std::size_t i = 0; i < sets.size(); ++i) {
    write_text_file(layout.eval_dir() / (sets[i].stem + ".json"), eval_report_json(reports[i], sets[i].label));
    write_text_file(layout.eval_dir() / (sets[i].stem + ".csv"), eval_report_csv(reports[i]));
    const auto& r = reports[i];
    summary += fmt::format("{},\"{}\",{:.6f},{:.6f},{},{},{},{},{}\n", sets[i].stem, sets[i].label, r.sensitivity,
                           r.fp_per_scan, r.tp, r.fp, r.fn, r.ignored, r.scans());
    log::info(fmt::format("{}: sensitivity {:.4f}, FP/scan {:.4f}", sets[i].label, r.sensitivity, r.fp_per_scan));
  }
  write_text_file(layout.eval_dir() / "summary.csv", summary);
}

void cmd_analytics(const Options& opt) {
  const auto layout = opt.layout();
  const auto sessions = list_sessions(layout);
  const GroundTruth truth = require_truth(layout);
  std::map<std::string, std::vector<Mark>> marks;
  for (const auto& a : layout.mark_annotators()) marks[a] = load_marks(layout.marks_path(a));

  struct Result {
    SessionSummary summary;
    LungTimeline timeline;
    std::vector<AttentionStat> stats;
  };
  std::vector<Result> results(sessions.size());
  parallel_for(sessions.size(), opt.jobs, [&](std::size_t i) {
    const auto& s = sessions[i];
    const LungMask mask = require_mask(opt, s.scan);
    const GazeSession session = load_session(layout, s);
    const auto points = map_to_voxels(session, mask);
    results[i].summary = summarize_session(session, points, mask, s.scan, s.annotator);
    results[i].timeline =
        make_timeline(points, mask, session.start_time(), session.reading_time(), s.scan, s.annotator);
    const auto att_path = layout.attention_path(s.annotator, s.scan);
    require_input(att_path, fmt::format("attention of {}/{} (run `gfk attention`)", s.annotator, s.scan));
    const auto att = read_attention(att_path);
    const auto truths = for_scan<NoduleTruth>(truth.nodules, s.scan);
    const auto scan_marks = for_scan<Mark>(marks[s.annotator], s.scan);
    const auto outcome = match(truths, scan_marks, for_scan<NonNodule>(truth.non_nodules, s.scan), opt.rule());
    results[i].stats = finding_attention(att, session.reading_time(), outcome, truths, scan_marks, s.scan, s.annotator);
  });

  std::vector<SessionSummary> summaries;
  std::vector<LungTimeline> timelines;
  std::vector<AttentionStat> stats;
  for (auto& r : results) {
    summaries.push_back(std::move(r.summary));
    timelines.push_back(std::move(r.timeline));
    stats.insert(stats.end(), r.stats.begin(), r.stats.end());
  }
  const fs::path dir = layout.analytics_dir();
  write_text_file(dir / "reading_time.csv", reading_time_csv(reading_time_stats(summaries)));
  const auto curve = right_lung_curve(timelines);
  for (const auto& w : curve.warnings) log::warn(w);
  write_text_file(dir / "right_lung_curve.csv", curve_csv(curve));
  write_text_file(dir / "right_lung_curve.svg", curve_svg(curve));
  write_text_file(dir / "attention_stats.csv", attention_stats_csv(stats));
  write_text_file(dir / "attention_summary.csv", attention_summary_csv(summarize_attention(stats)));
  std::vector<Mark> all_marks;
  for (const auto& [a, m] : marks) all_marks.insert(all_marks.end(), m.begin(), m.end());
  const auto table = characterization_agreement(truth, all_marks, opt.rule());
  for (const auto& w : table.warnings) log::warn(w);
  write_text_file(dir / "agreement.csv", agreement_csv(table));
  log::info(fmt::format("analytics over {} sessions written to {}", sessions.size(), dir.string()));
}

EvalReport load_eval(const StudyLayout& layout, const std::string& stem) {
  const auto path = layout.eval_dir() / (stem + ".json");
  require_input(path, fmt::format("evaluation {} (run `gfk eval`)", stem));
  return parse_eval_report(read_text_file(path));
}

void cmd_stats(const Options& opt) {
  const auto layout = opt.layout();
  std::vector<TestResult> results;
  auto paired = [&](const std::string& a, const std::string& b) {
    try {
      auto r = mcnemar(contingency(load_eval(layout, a), load_eval(layout, b)));
      r.label = a + " vs " + b;
      results.push_back(r);
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_test) throw;
      log::warn(fmt::format("McNemar {} vs {} skipped: {}", a, b, e.what()));
    }
  };
  if (!opt.a.empty() || !opt.b.empty()) {
    if (opt.a.empty() || opt.b.empty()) fail(Errc::configuration, "stats needs both --a and --b evaluation stems");
    paired(opt.a, opt.b);
  } else {
    for (const auto& s : mark_sets(layout))
      if (!s.base.empty()) paired(s.base, s.stem);
  }

  // per-scan sensitivity grouped by annotator
  std::vector<std::vector<double>> groups;
  for (const auto& a : layout.mark_annotators()) {
    std::vector<double> g;
    for (const auto& s : load_eval(layout, a).per_scan)
      if (s.truths > 0) g.push_back(double(s.outcome.tp.size()) / double(s.truths));
    groups.push_back(std::move(g));
  }
  if (groups.size() >= 2) {
    try {
      auto r = anova(groups).test;
      r.label = "per-scan sensitivity by annotator";
      results.push_back(r);
    } catch (const Error& e) {
      log::warn(fmt::format("ANOVA skipped: {}", e.what()));
    }
  }
  write_text_file(layout.stats_dir() / "stats.json", stats_report_json(results));
  log::info(fmt::format("{} tests written", results.size()));
}

// ---------------------------------------------------------------- report

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) row.push_back(std::exchange(cell, {}));
      else cell += c;
    }
    row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string html_table(const std::vector<std::vector<std::string>>& rows) {
  std::string out = "<table>\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += "<tr>";
    for (const auto& c : rows[r]) out += fmt::format(fmt::runtime(r == 0 ? "<th>{}</th>" : "<td>{}</td>"), svg::escape(c));
    out += "</tr>\n";
  }
  return out + "</table>\n";
}

void cmd_report(const Options& opt) {
  const auto layout = opt.layout();
  const fs::path analytics = layout.analytics_dir();
  const std::vector<fs::path> required{layout.eval_dir() / "summary.csv",     analytics / "reading_time.csv",
                                       analytics / "right_lung_curve.csv",     analytics / "right_lung_curve.svg",
                                       analytics / "attention_summary.csv",    analytics / "agreement.csv",
                                       layout.stats_dir() / "stats.json"};
  std::vector<std::string> missing;
  for (const auto& p : required)
    if (!fs::exists(p)) missing.push_back(fs::relative(p, layout.root).string());
  if (!missing.empty())
    fail(Errc::configuration, fmt::format("missing input: upstream artifacts not found: {}", fmt::join(missing, ", ")));

  const auto summary = parse_csv(read_text_file(required[0]));
  std::vector<svg::Bar> bars;
  for (std::size_t r = 1; r < summary.size(); ++r)
    bars.push_back({summary[r][0], std::stod(summary[r][2]), 0.0, summary[r][0].rfind("fused", 0) == 0 ? "#ff7f0e" : "#1f77b4"});
  svg::Axes axes;
  axes.title = "Sensitivity by mark set";
  axes.y_label = "sensitivity";
  axes.width = std::max(640, 60 * static_cast<int>(bars.size()));
  const std::string bar_svg = svg::bar_chart(axes, bars);
  write_text_file(layout.root / "report.svg", bar_svg);

  std::string csv = "section,name,value_1,value_2\n";
  for (std::size_t r = 1; r < summary.size(); ++r)
    csv += fmt::format("detection,\"{}\",{},{}\n", summary[r][1], summary[r][2], summary[r][3]);
  const auto stats = nlohmann::json::parse(read_text_file(required[6]));
  std::vector<std::vector<std::string>> stat_rows{{"test", "label", "statistic", "dof", "p", "significant"}};
  for (const auto& t : stats) {
    const std::string stat = t["statistic"].is_string() ? t["statistic"].get<std::string>()
                                                         : fmt::format("{:.6g}", t["statistic"].get<double>());
    std::vector<std::string> dof;
    for (const auto& d : t["dof"]) dof.push_back(fmt::format("{:g}", d.get<double>()));
    const std::string label = t.value("label", "");
    stat_rows.push_back({t["test"].get<std::string>(), label, stat, fmt::format("{}", fmt::join(dof, "/")),
                         fmt::format("{:.6g}", t["p"].get<double>()), t["significant"].get<bool>() ? "yes" : "no"});
    csv += fmt::format("test,\"{} {}\",{},{:.6g}\n", t["test"].get<std::string>(), label, stat, t["p"].get<double>());
  }
  write_text_file(layout.root / "report.csv", csv);

  std::string html =
      "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>gfk study report</title>\n"
      "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse;margin:1em 0}"
      "td,th{border:1px solid #ccc;padding:2px 8px;text-align:right}th{background:#eee}</style></head><body>\n"
      "<h1>Study report</h1>\n";
  html += "<h2>Detection performance</h2>\n" + html_table(summary) + bar_svg + "\n";
  html += "<h2>Statistical tests</h2>\n" + html_table(stat_rows);
  html += "<h2>Reading time</h2>\n" + html_table(parse_csv(read_text_file(required[1])));
  html += "<h2>Right-lung curve</h2>\n" + read_text_file(required[3]) + "\n";
  html += "<h2>Attention on findings</h2>\n" + html_table(parse_csv(read_text_file(required[4])));
  html += "<h2>Characterization agreement</h2>\n" + html_table(parse_csv(read_text_file(required[5])));
  html +=
      "<footer><p>Agreement aggregates count the 7 ordinal characteristics outside the rater range: "
      "&ge;3/4 means at least 6, &ge;1/2 at least 4 and &ge;1/4 at least 2.</p></footer>\n</body></html>\n";
  write_text_file(layout.report_path(), html);
  log::info(fmt::format("report written to {}", layout.report_path().string()));
}

}  // namespace

int main(int argc, char** argv) {
  log::init_from_env();
  CLI::App app{"Gaze-conditioned lung nodule study pipeline"};
  app.set_config("--config", "", "key = value configuration file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--study", opt.study, "study directory")->required();
  app.add_option("--jobs", opt.jobs, "parallel scans or sessions");
  app.add_flag("--flip-lr", opt.flip_lr, "anatomical right at high x");
  app.add_flag("--match-radius", opt.match_radius, "hit within the nodule radius instead of the diameter");
  app.add_option("--hu-threshold", opt.hu_threshold, "lung mask HU threshold");
  app.add_option("--closing-mm", opt.closing_mm, "lung mask closing radius (mm)");
  app.add_option("--fusion-mode,--mode", opt.fusion_mode, "all | low-attention");
  app.add_option("--attention-threshold,--threshold", opt.attention_threshold, "normalized attention cutoff");
  app.add_option("--fp-target", opt.fp_target, "CADe operating point in FP per scan");
  app.add_option("--score-threshold", opt.score_threshold, "fixed CADe score threshold (skips calibration)");
  app.add_option("--seed", opt.seed, "simulation seed");
  app.add_option("--scans", opt.scans, "simulated scans");
  app.add_option("--annotators", opt.annotators, "simulated annotators");

  const std::vector<std::pair<std::string, std::string>> names{
      {"mask", "estimate lung masks"},
      {"attention", "splat gaze into attention volumes"},
      {"eval", "evaluate every mark set"},
      {"combine", "union two annotators"},
      {"fuse", "add CADe candidates to radiologist marks"},
      {"analytics", "reading time, right-lung curve, attention and agreement tables"},
      {"stats", "McNemar and ANOVA on evaluation outputs"},
      {"simulate", "generate a synthetic study"},
      {"report", "bundle outputs into report.html, report.csv and report.svg"},
  };
  std::map<std::string, CLI::App*> sub;
  for (const auto& [name, help] : names) sub[name] = app.add_subcommand(name, help);
  for (auto* s : {sub["combine"], sub["stats"]}) {
    s->add_option("--a", opt.a, "first annotator or evaluation stem");
    s->add_option("--b", opt.b, "second annotator or evaluation stem");
  }
  sub["combine"]->add_option("--dedup-mm", opt.dedup_mm, "cross-annotator duplicate distance (mm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::map<std::string, void (*)(const Options&)> commands{
      {"mask", cmd_mask},   {"attention", cmd_attention}, {"eval", cmd_eval},         {"combine", cmd_combine},
      {"fuse", cmd_fuse},   {"analytics", cmd_analytics}, {"stats", cmd_stats},       {"simulate", cmd_simulate},
      {"report", cmd_report},
  };
  try {
    const auto* chosen = app.get_subcommands().front();
    commands.at(chosen->get_name())(opt);
  } catch (const Error& e) {
    log::error(fmt::format("{}: {}", errc_name(e.code()), e.what()));
    return e.code() == Errc::io ? kExitIo : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    log::error(fmt::format("io: {}", e.what()));
    return kExitIo;
  } catch (const std::exception& e) {
    log::error(e.what());
    return kExitValidation;
  }
  return 0;
}
