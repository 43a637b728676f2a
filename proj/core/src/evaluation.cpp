#include "gfk/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "gfk/error.hpp"
#include "json.hpp"

namespace gfk {

MatchOutcome match(std::span<const NoduleTruth> truths, std::span<const Mark> marks,
                   std::span<const NonNodule> non_nodules, MatchRule rule) {
  struct Pair {
    double d;
    std::size_t mark;
    std::size_t truth;
  };
  std::vector<Pair> pairs;
  std::vector<char> hits_truth(marks.size(), 0);
  for (std::size_t t = 0; t < truths.size(); ++t) {
    const double limit = rule.hit_distance(truths[t].equivalent_radius_mm);
    for (std::size_t m = 0; m < marks.size(); ++m) {
      const double d = distance(truths[t].centroid_mm, marks[m].centroid_mm);
      if (d < limit) {
        pairs.push_back({d, m, t});
        hits_truth[m] = 1;
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    return std::tie(a.d, marks[a.mark].id, truths[a.truth].id, a.mark, a.truth) <
           std::tie(b.d, marks[b.mark].id, truths[b.truth].id, b.mark, b.truth);
  });

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> truth_to_mark(truths.size(), kNone);
  std::vector<char> mark_used(marks.size(), 0);
  for (const Pair& p : pairs) {
    if (truth_to_mark[p.truth] != kNone || mark_used[p.mark]) continue;
    truth_to_mark[p.truth] = p.mark;
    mark_used[p.mark] = 1;
  }

  MatchOutcome out;
  for (std::size_t t = 0; t < truths.size(); ++t) {
    if (truth_to_mark[t] == kNone) out.fn.push_back(truths[t].id);
    else out.tp.emplace_back(truths[t].id, marks[truth_to_mark[t]].id);
  }
  for (std::size_t m = 0; m < marks.size(); ++m) {
    if (mark_used[m]) continue;
    if (hits_truth[m]) {
      out.ignored.push_back(marks[m].id);
      continue;
    }
    const bool on_non_nodule = std::any_of(non_nodules.begin(), non_nodules.end(), [&](const NonNodule& n) {
      return distance(n.centroid_mm, marks[m].centroid_mm) < rule.hit_distance(n.equivalent_radius_mm);
    });
    (on_non_nodule ? out.ignored : out.fp).push_back(marks[m].id);
  }
  return out;
}

std::vector<Mark> combine(std::span<const Mark> a, std::span<const Mark> b, double dedup_mm) {
  std::vector<Mark> out(a.begin(), a.end());
  for (const Mark& mb : b) {
    const bool duplicate = std::any_of(a.begin(), a.end(), [&](const Mark& ma) {
      if (ma.scan_id != mb.scan_id) return false;
      if (ma.annotator == mb.annotator) return ma.id == mb.id;
      return distance(ma.centroid_mm, mb.centroid_mm) <= dedup_mm;
    });
    if (!duplicate) out.push_back(mb);
  }
  return out;
}

std::vector<Mark> by_annotator(std::span<const Mark> marks, const std::string& annotator) {
  std::vector<Mark> out;
  for (const auto& m : marks)
    if (m.annotator == annotator) out.push_back(m);
  return out;
}

std::vector<std::string> annotators_of(std::span<const Mark> marks) {
  std::set<std::string> names;
  for (const auto& m : marks) names.insert(m.annotator);
  return {names.begin(), names.end()};
}

EvalReport evaluate(const GroundTruth& truth, std::span<const Mark> marks, std::vector<std::string> scan_ids,
                    MatchRule rule) {
  if (scan_ids.empty()) {
    std::set<std::string> ids;
    for (const auto& n : truth.nodules) ids.insert(n.scan_id);
    for (const auto& m : marks) ids.insert(m.scan_id);
    scan_ids.assign(ids.begin(), ids.end());
  } else {
    std::sort(scan_ids.begin(), scan_ids.end());
    scan_ids.erase(std::unique(scan_ids.begin(), scan_ids.end()), scan_ids.end());
  }
  if (scan_ids.empty()) fail(Errc::undefined_metric, "evaluation needs at least one scan");

  EvalReport r;
  for (const auto& id : scan_ids) {
    ScanOutcome s;
    s.scan_id = id;
    const auto truths = for_scan<NoduleTruth>(truth.nodules, id);
    const auto non_nodules = for_scan<NonNodule>(truth.non_nodules, id);
    const auto scan_marks = for_scan<Mark>(marks, id);
    s.truths = truths.size();
    s.outcome = match(truths, scan_marks, non_nodules, rule);
    r.tp += s.outcome.tp.size();
    r.fp += s.outcome.fp.size();
    r.fn += s.outcome.fn.size();
    r.ignored += s.outcome.ignored.size();
    r.per_scan.push_back(std::move(s));
  }
  if (r.tp + r.fn == 0) fail(Errc::undefined_metric, "sensitivity undefined: no ground-truth nodules in the evaluated scans");
  r.sensitivity = double(r.tp) / double(r.tp + r.fn);
  r.fp_per_scan = double(r.fp) / double(r.per_scan.size());
  return r;
}

std::string eval_report_json(const EvalReport& report, const std::string& label) {
  nlohmann::ordered_json doc;
  doc["label"] = label;
  doc["sensitivity"] = report.sensitivity;
  doc["fp_per_scan"] = report.fp_per_scan;
  doc["tp"] = report.tp;
  doc["fp"] = report.fp;
  doc["fn"] = report.fn;
  doc["ignored"] = report.ignored;
  doc["scans"] = report.scans();
  auto& scans = doc["per_scan"] = nlohmann::ordered_json::array();
  for (const auto& s : report.per_scan) {
    nlohmann::ordered_json e;
    e["scan_id"] = s.scan_id;
    e["truths"] = s.truths;
    auto& tp = e["tp"] = nlohmann::ordered_json::array();
    for (const auto& [t, m] : s.outcome.tp) tp.push_back({{"truth", t}, {"mark", m}});
    e["fp"] = s.outcome.fp;
    e["fn"] = s.outcome.fn;
    e["ignored"] = s.outcome.ignored;
    scans.push_back(e);
  }
  return doc.dump(2) + "\n";
}

std::string eval_report_csv(const EvalReport& report) {
  std::string out = "scan_id,truths,tp,fp,fn,ignored,sensitivity\n";
  for (const auto& s : report.per_scan) {
    const std::size_t tp = s.outcome.tp.size(), fn = s.outcome.fn.size();
    const std::string sens = tp + fn ? fmt::format("{:.6f}", double(tp) / double(tp + fn)) : "";
    out += fmt::format("{},{},{},{},{},{},{}\n", s.scan_id, s.truths, tp, s.outcome.fp.size(), fn,
                       s.outcome.ignored.size(), sens);
  }
  out += fmt::format("ALL,{},{},{},{},{},{:.6f}\n", report.tp + report.fn, report.tp, report.fp, report.fn,
                     report.ignored, report.sensitivity);
  out += fmt::format("# fp_per_scan={:.6f} scans={}\n", report.fp_per_scan, report.scans());
  return out;
}

EvalReport parse_eval_report(std::string_view json_text, std::string* label) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
    EvalReport r;
    if (label) *label = doc.at("label").get<std::string>();
    r.sensitivity = doc.at("sensitivity").get<double>();
    r.fp_per_scan = doc.at("fp_per_scan").get<double>();
    r.tp = doc.at("tp").get<std::size_t>();
    r.fp = doc.at("fp").get<std::size_t>();
    r.fn = doc.at("fn").get<std::size_t>();
    r.ignored = doc.at("ignored").get<std::size_t>();
    for (const auto& e : doc.at("per_scan")) {
      ScanOutcome s;
      s.scan_id = e.at("scan_id").get<std::string>();
      s.truths = e.at("truths").get<std::size_t>();
      for (const auto& p : e.at("tp")) s.outcome.tp.emplace_back(p.at("truth").get<std::string>(), p.at("mark").get<std::string>());
      s.outcome.fp = e.at("fp").get<std::vector<std::string>>();
      s.outcome.fn = e.at("fn").get<std::vector<std::string>>();
      s.outcome.ignored = e.at("ignored").get<std::vector<std::string>>();
      r.per_scan.push_back(std::move(s));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, fmt::format("eval report: {}", e.what()));
  }
}

}  // namespace gfk
