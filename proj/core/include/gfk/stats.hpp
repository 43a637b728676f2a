#pragma once

#include <span>
#include <string>
#include <vector>

#include "gfk/evaluation.hpp"

namespace gfk {

/// Paired detection outcomes over shared ground-truth nodules.
struct ContingencyCounts {
  long n00 = 0;  // missed by both
  long n01 = 0;  // detected by A, missed by B
  long n10 = 0;  // missed by A, detected by B
  long n11 = 0;  // detected by both
};

struct TestResult {
  std::string test;
  std::string label;
  double statistic = 0.0;
  std::vector<double> dof;
  double p = 1.0;
  bool significant = false;
  bool infinite_statistic = false;
};

/// Continuity-corrected McNemar chi-squared, (|n01 - n10| - 1)^2 / (n01 + n10),
/// with the 1-dof chi-squared upper tail. Needs discordant pairs.
TestResult mcnemar(const ContingencyCounts& counts);

struct AnovaResult {
  TestResult test;
  double ssr = 0.0;
  double sse = 0.0;
};

/// One-way ANOVA across k >= 2 non-empty groups with N - k >= 1.
AnovaResult anova(const std::vector<std::vector<double>>& groups);

/// p < alpha
bool significance(double p, double alpha = 0.05);

/// Counts over nodules present in both reports (matched by scan id and truth id).
ContingencyCounts contingency(const EvalReport& a, const EvalReport& b);

std::string stats_report_json(std::span<const TestResult> results);

}  // namespace gfk
