#pragma once

#include <span>

namespace recaudit {

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation
};

SampleSummary summarize(std::span<const double> values);

struct WelchResult {
  double t = 0.0;        // (mean_a - mean_b) / standard error
  double df = 0.0;       // Welch-Satterthwaite degrees of freedom
  double p_value = 1.0;  // two-sided
};

/// Welch's unequal-variance t-test. Each sample needs at least two values (DegenerateGroup).
/// When both samples have zero variance, t is 0 (p = 1) for equal means and +/-inf (p = 0)
/// otherwise.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided tail probability P(|T| >= |t|) of Student's t with df degrees of freedom.
double student_t_two_sided(double t, double df);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace recaudit
