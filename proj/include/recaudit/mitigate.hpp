#pragma once

// Stereotype-driven oversampling: bin users by individual stereotype, replicate the
// interactions of stereotyped bins at linearly increasing rates, retrain and re-audit.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "recaudit/dataio.hpp"
#include "recaudit/evalreport.hpp"
#include "recaudit/recsys.hpp"

namespace recaudit {

inline constexpr double kMinBaseRate = 0.01;
inline constexpr double kMaxBaseRate = 0.4;

struct StereotypeBins {
  // bins[0] holds the users with ST_u <= 0; later bins ascend in stereotype.
  std::vector<std::vector<UserId>> bins;
  std::size_t inverse_users = 0;
};

/// n = max(2, round(N / N_inv)) bins. Users are sorted by (ST_u, user id); bin 0 takes the
/// N_inv non-positive users and the rest fill n - 1 contiguous bins of floor size, the last one
/// absorbing the remainder. Without inverse-stereotyped users an explicit bin_count is
/// required (NoInverseStereotyped otherwise); bin 0 is then empty and bin_count bins follow.
StereotypeBins bin_users_by_stereotype(std::span<const UserAudit> per_user,
                                       std::optional<std::size_t> bin_count = std::nullopt);

struct OversamplePlan {
  std::vector<std::vector<UserId>> bins;
  std::vector<double> rates;  // rates[0] = 1, rates[k] = 1 + base_rate * k
  double base_rate = 0.0;

  /// Rate of the bin holding the user; ConfigError if the user is in no bin.
  double rate_of(UserId user) const;
};

/// RateOutOfRange unless base_rate lies in [kMinBaseRate, kMaxBaseRate].
OversamplePlan build_oversample_plan(const StereotypeBins& bins, double base_rate);

/// Keeps every original row and appends, per user in ascending id order,
/// round-half-even((r - 1) * n_u) rows drawn uniformly with replacement from that user's rows.
std::vector<Interaction> resample_interactions(std::span<const Interaction> train,
                                               const OversamplePlan& plan, std::uint64_t seed);

struct MitigationResult {
  std::string model;
  double base_rate = 0.0;
  std::size_t bins = 0;
  std::size_t train_rows_before = 0;
  std::size_t train_rows_after = 0;
  double stereotyped_share_before = 0.0;  // share of users with ST_u > 0
  double stereotyped_share_after = 0.0;
  double ndcg_before = 0.0;
  double ndcg_after = 0.0;
  double stereotype_before = 0.0;
  double stereotype_after = 0.0;
  double miscalibration_before = 0.0;
  double miscalibration_after = 0.0;

  double delta_ndcg() const { return ndcg_after - ndcg_before; }
  double delta_stereotype() const { return stereotype_after - stereotype_before; }
  double delta_miscalibration() const { return miscalibration_after - miscalibration_before; }
};

/// Oversamples against an existing baseline audit, retrains with the same configuration and
/// audits on the original split. Actual preferences always come from the original training rows.
MitigationResult mitigate_from_baseline(const SplitDataset& split, const ModelConfig& config,
                                        const AuditReport& baseline, double base_rate,
                                        std::uint64_t seed, const AuditOptions& options = {});

/// Trains and audits the baseline, then mitigate_from_baseline.
MitigationResult run_mitigation_experiment(const SplitDataset& split, const ModelConfig& config,
                                           double base_rate, std::uint64_t seed,
                                           const AuditOptions& options = {});

}  // namespace recaudit
