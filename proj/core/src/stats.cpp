#include "gfk/stats.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "gfk/error.hpp"
#include "gfk/special_functions.hpp"
#include "json.hpp"

namespace gfk {

bool significance(double p, double alpha) {
  if (!(p >= 0.0 && p <= 1.0)) fail(Errc::parameter, fmt::format("p-value {} outside [0, 1]", p));
  return p < alpha;
}

TestResult mcnemar(const ContingencyCounts& c) {
  if (c.n00 < 0 || c.n01 < 0 || c.n10 < 0 || c.n11 < 0) fail(Errc::parameter, "contingency counts must be non-negative");
  const long discordant = c.n01 + c.n10;
  if (discordant == 0) fail(Errc::degenerate_test, "McNemar test needs at least one discordant pair");
  const double diff = std::abs(double(c.n01 - c.n10)) - 1.0;
  TestResult r;
  r.test = "mcnemar";
  r.statistic = diff * diff / double(discordant);
  r.dof = {1.0};
  r.p = special::chi2_survival(r.statistic, 1.0);
  r.significant = significance(r.p);
  return r;
}

AnovaResult anova(const std::vector<std::vector<double>>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) fail(Errc::parameter, "ANOVA needs at least two groups");
  std::size_t n = 0;
  double total = 0.0;
  std::vector<double> means(k);
  for (std::size_t g = 0; g < k; ++g) {
    if (groups[g].empty()) fail(Errc::parameter, fmt::format("ANOVA group {} is empty", g));
    const double s = std::accumulate(groups[g].begin(), groups[g].end(), 0.0);
    means[g] = s / double(groups[g].size());
    total += s;
    n += groups[g].size();
  }
  if (n <= k) fail(Errc::parameter, "ANOVA needs N - k >= 1");
  const double grand = total / double(n);

  AnovaResult a;
  for (std::size_t g = 0; g < k; ++g) {
    const double dm = means[g] - grand;
    a.ssr += double(groups[g].size()) * dm * dm;
    for (double x : groups[g]) a.sse += (x - means[g]) * (x - means[g]);
  }
  const double d1 = double(k - 1), d2 = double(n - k);
  a.test.test = "anova";
  a.test.dof = {d1, d2};
  if (a.sse == 0.0) {
    if (a.ssr == 0.0) fail(Errc::degenerate_test, "ANOVA is degenerate: every observation is identical");
    a.test.statistic = std::numeric_limits<double>::infinity();
    a.test.infinite_statistic = true;
    a.test.p = 0.0;
  } else {
    a.test.statistic = (a.ssr / d1) / (a.sse / d2);
    a.test.p = special::f_survival(a.test.statistic, d1, d2);
  }
  a.test.significant = significance(a.test.p);
  return a;
}

ContingencyCounts contingency(const EvalReport& a, const EvalReport& b) {
  // key: scan id + truth id -> detected?
  auto detections = [](const EvalReport& r) {
    std::map<std::pair<std::string, std::string>, bool> out;
    for (const auto& s : r.per_scan) {
      for (const auto& [t, m] : s.outcome.tp) out[{s.scan_id, t}] = true;
      for (const auto& t : s.outcome.fn) out[{s.scan_id, t}] = false;
    }
    return out;
  };
  const auto da = detections(a), db = detections(b);
  ContingencyCounts c;
  for (const auto& [key, hit_a] : da) {
    const auto it = db.find(key);
    if (it == db.end()) continue;
    const bool hit_b = it->second;
    if (hit_a && hit_b) ++c.n11;
    else if (hit_a) ++c.n01;
    else if (hit_b) ++c.n10;
    else ++c.n00;
  }
  return c;
}

std::string stats_report_json(std::span<const TestResult> results) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json e;
    e["test"] = r.test;
    if (!r.label.empty()) e["label"] = r.label;
    if (r.infinite_statistic) e["statistic"] = "inf";
    else e["statistic"] = r.statistic;
    e["dof"] = r.dof;
    e["p"] = r.p;
    e["significant"] = r.significant;
    doc.push_back(e);
  }
  return doc.dump(2) + "\n";
}

}  // namespace gfk
