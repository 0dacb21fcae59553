#include "recaudit/metrics.hpp"

#include <string>
#include <vector>

#include "recaudit/error.hpp"

namespace recaudit {
namespace {

void require_aligned(std::span<const PreferenceDistribution> actual,
                     std::span<const PreferenceDistribution> predicted) {
  if (actual.empty()) throw Error(ErrorCode::EmptyInput, "no users");
  if (actual.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(actual.size()) + " actual vs " +
                                               std::to_string(predicted.size()) + " predicted");
  }
}

std::vector<PreferenceDistribution> smooth_all(std::span<const PreferenceDistribution> ds,
                                               double alpha) {
  std::vector<PreferenceDistribution> out;
  out.reserve(ds.size());
  for (const auto& d : ds) out.push_back(smooth(d, alpha));
  return out;
}

}  // namespace

double miscalibration_user(const PreferenceDistribution& p, const PreferenceDistribution& q,
                           double alpha) {
  return kl_divergence(smooth(p, alpha), smooth(q, alpha));
}

Effects effects_user(const PreferenceDistribution& p, const PreferenceDistribution& q,
                     const PreferenceDistribution& p_bar, const PreferenceDistribution& q_bar,
                     double alpha) {
  const auto ps = smooth(p, alpha);
  const double to_q = kl_divergence(ps, smooth(q, alpha));
  const double to_q_bar = kl_divergence(ps, smooth(q_bar, alpha));
  const double to_p_bar = kl_divergence(ps, smooth(p_bar, alpha));
  return {to_q_bar - to_p_bar, to_q - to_q_bar};
}

SystemAudit decompose_system(std::span<const PreferenceDistribution> actual,
                             std::span<const PreferenceDistribution> predicted, double alpha) {
  require_aligned(actual, predicted);
  SystemAudit out;
  out.mean_actual = mean_distribution(actual);
  out.mean_predicted = mean_distribution(predicted);
  const auto p_bar = smooth(out.mean_actual, alpha);
  const auto q_bar = smooth(out.mean_predicted, alpha);

  double mc = 0.0;
  double var = 0.0;
  for (std::size_t u = 0; u < actual.size(); ++u) {
    const auto qs = smooth(predicted[u], alpha);
    mc += kl_divergence(smooth(actual[u], alpha), qs);
    var += kl_divergence(q_bar, qs);
  }
  const double n = static_cast<double>(actual.size());
  out.miscalibration_mean = mc / n;
  out.variance_term = var / n;
  out.bias_term = kl_divergence(p_bar, q_bar);
  out.decomposition_residual = out.miscalibration_mean - out.bias_term - out.variance_term;
  const double denom = out.bias_term + out.variance_term;
  out.bias_variance_ratio = denom > 0.0 ? out.variance_term / denom : 0.0;
  return out;
}

double stereotype_system(std::span<const PreferenceDistribution> actual,
                         std::span<const PreferenceDistribution> predicted, double alpha) {
  require_aligned(actual, predicted);
  const auto ps = smooth_all(actual, alpha);
  const auto qs = smooth_all(predicted, alpha);
  const auto p_bar = mean_distribution(ps);
  const auto q_bar = mean_distribution(qs);
  double actual_spread = 0.0;
  double predicted_spread = 0.0;
  for (std::size_t u = 0; u < ps.size(); ++u) {
    actual_spread += js_divergence(ps[u], p_bar);
    predicted_spread += js_divergence(qs[u], q_bar);
  }
  // Identical inputs can leave a rounding-level spread because the mean is not bit-exact.
  if (actual_spread <= 1e-14 * static_cast<double>(ps.size())) {
    throw Error(ErrorCode::ZeroActualSpread, "every user shares one actual preference");
  }
  return 1.0 - predicted_spread / actual_spread;
}

double stereotype_user(const PreferenceDistribution& p, const PreferenceDistribution& q,
                       const PreferenceDistribution& p_bar, const PreferenceDistribution& q_bar,
                       double alpha) {
  return js_divergence(smooth(p, alpha), smooth(p_bar, alpha)) -
         js_divergence(smooth(q, alpha), smooth(q_bar, alpha));
}

double inflated_diversity_user(const PreferenceDistribution& p, const PreferenceDistribution& q) {
  return entropy_normalized(p) - entropy_normalized(q);
}

double bias_disparity(const PreferenceDistribution& mean_actual,
                      const PreferenceDistribution& mean_predicted, std::size_t category) {
  if (mean_actual.size() != mean_predicted.size() || category >= mean_actual.size()) {
    throw Error(ErrorCode::LengthMismatch, "category " + std::to_string(category) + " out of range");
  }
  const double actual_mass = mean_actual[category];
  if (actual_mass <= 0.0) {
    throw Error(ErrorCode::ZeroActualMass, "no actual mass on category " + std::to_string(category));
  }
  return 1.0 - mean_predicted[category] / actual_mass;
}

double bias_disparity(std::span<const PreferenceDistribution> actual,
                      std::span<const PreferenceDistribution> predicted, std::size_t category) {
  require_aligned(actual, predicted);
  return bias_disparity(mean_distribution(actual), mean_distribution(predicted), category);
}

double atypicality_user(const PreferenceDistribution& p, const PreferenceDistribution& p_bar,
                        double alpha) {
  return js_divergence(smooth(p, alpha), smooth(p_bar, alpha));
}

double diversity_user(const PreferenceDistribution& p) { return entropy_normalized(p); }

UserAudit audit_user(const PreferenceDistribution& p, const PreferenceDistribution& q,
                     const PreferenceDistribution& p_bar, const PreferenceDistribution& q_bar,
                     double alpha) {
  const auto ps = smooth(p, alpha);
  const auto qs = smooth(q, alpha);
  const auto pbs = smooth(p_bar, alpha);
  const auto qbs = smooth(q_bar, alpha);

  const double kl_p_q = kl_divergence(ps, qs);
  const double kl_p_qbar = kl_divergence(ps, qbs);
  const double kl_p_pbar = kl_divergence(ps, pbs);
  const double js_p = 0.5 * (kl_p_pbar + kl_divergence(pbs, ps));
  const double js_q = js_divergence(qs, qbs);

  UserAudit row;
  row.atypicality = js_p;
  row.diversity = entropy_normalized(p);
  row.miscalibration = kl_p_q;
  row.bias_effect = kl_p_qbar - kl_p_pbar;
  row.variance_effect = kl_p_q - kl_p_qbar;
  row.stereotype = js_p - js_q;
  row.inflated_diversity = row.diversity - entropy_normalized(q);
  return row;
}

}  // namespace recaudit
