#pragma once

// Calibration, bias/variance and stereotype measures.
//
// Every divergence is taken between smoothed distributions; the functions below accept raw
// distributions plus the smoothing alpha and blend internally. Smoothing is affine, so the
// smoothed mean of a population equals the mean of the smoothed members and p_bar / q_bar may
// be passed raw as well. Entropy-based measures and bias disparity use raw masses.

#include <cstdint>
#include <span>

#include "recaudit/prefdist.hpp"

namespace recaudit {

enum class Gender : std::uint8_t { Male, Female };
enum class AgeGroup : std::uint8_t { Younger, Older };

struct UserAudit {
  std::int64_t user_id = 0;
  Gender gender = Gender::Male;
  AgeGroup age_group = AgeGroup::Younger;
  double atypicality = 0.0;          // JS(p || p_bar)
  double diversity = 0.0;            // entropy_normalized(p)
  double miscalibration = 0.0;       // KL(p || q)
  double bias_effect = 0.0;          // KL(p || q_bar) - KL(p || p_bar)
  double variance_effect = 0.0;      // KL(p || q) - KL(p || q_bar)
  double stereotype = 0.0;           // JS(p || p_bar) - JS(q || q_bar)
  double inflated_diversity = 0.0;   // DV(p) - DV(q); negative when q is more diverse than p
  double ndcg_at_k = 0.0;            // 0 when the user has no test items
  std::size_t test_items = 0;
  std::size_t typicality_rank = 0;   // 1 = most typical (lowest atypicality)

  friend bool operator==(const UserAudit&, const UserAudit&) = default;
};

struct SystemAudit {
  double miscalibration_mean = 0.0;
  double bias_term = 0.0;              // KL(P_bar || Q_bar)
  double variance_term = 0.0;          // mean_u KL(Q_bar || q_u)
  double decomposition_residual = 0.0; // miscalibration_mean - bias_term - variance_term
  double stereotype = 0.0;
  double bias_variance_ratio = 0.0;    // variance / (bias + variance); 0 when both vanish
  PreferenceDistribution mean_actual;
  PreferenceDistribution mean_predicted;

  friend bool operator==(const SystemAudit&, const SystemAudit&) = default;
};

struct Effects {
  double bias_effect = 0.0;
  double variance_effect = 0.0;
};

double miscalibration_user(const PreferenceDistribution& p, const PreferenceDistribution& q,
                           double alpha = kDefaultSmoothing);

Effects effects_user(const PreferenceDistribution& p, const PreferenceDistribution& q,
                     const PreferenceDistribution& p_bar, const PreferenceDistribution& q_bar,
                     double alpha = kDefaultSmoothing);

/// Fills miscalibration_mean, bias_term, variance_term, residual, the two means and the
/// bias/variance ratio. stereotype is left at 0; see stereotype_system.
SystemAudit decompose_system(std::span<const PreferenceDistribution> actual,
                             std::span<const PreferenceDistribution> predicted,
                             double alpha = kDefaultSmoothing);

/// 1 - E[JS(q || Q_bar)] / E[JS(p || P_bar)]. Throws ZeroActualSpread when the denominator is 0
/// (below 1e-14 per user).
double stereotype_system(std::span<const PreferenceDistribution> actual,
                         std::span<const PreferenceDistribution> predicted,
                         double alpha = kDefaultSmoothing);

/// Positive when the user's prediction sits closer to the typical prediction than their
/// actual preference sits to the typical preference.
double stereotype_user(const PreferenceDistribution& p, const PreferenceDistribution& q,
                       const PreferenceDistribution& p_bar, const PreferenceDistribution& q_bar,
                       double alpha = kDefaultSmoothing);

double inflated_diversity_user(const PreferenceDistribution& p, const PreferenceDistribution& q);

/// 1 - Q_bar(c) / P_bar(c) over the given group. Positive means the category lost mass in the
/// predictions. Throws ZeroActualMass when P_bar(c) = 0.
double bias_disparity(std::span<const PreferenceDistribution> actual,
                      std::span<const PreferenceDistribution> predicted, std::size_t category);
double bias_disparity(const PreferenceDistribution& mean_actual,
                      const PreferenceDistribution& mean_predicted, std::size_t category);

/// JS(p || p_bar). Pass (q, q_bar) for predictive atypicality.
double atypicality_user(const PreferenceDistribution& p, const PreferenceDistribution& p_bar,
                        double alpha = kDefaultSmoothing);

double diversity_user(const PreferenceDistribution& p);

/// Every per-user measure except nDCG, typicality rank and demographics.
UserAudit audit_user(const PreferenceDistribution& p, const PreferenceDistribution& q,
                     const PreferenceDistribution& p_bar, const PreferenceDistribution& q_bar,
                     double alpha = kDefaultSmoothing);

}  // namespace recaudit
