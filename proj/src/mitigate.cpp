#include "recaudit/mitigate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "recaudit/error.hpp"
#include "recaudit/textio.hpp"

namespace recaudit {
namespace {

std::string hash_rows(std::span<const Interaction> rows) {
  std::uint64_t h = fnv1a64({});
  for (const auto& x : rows) {
    const std::int64_t fields[] = {x.user, x.item, x.rating, x.timestamp};
    h = fnv1a64({reinterpret_cast<const char*>(fields), sizeof(fields)}, h);
  }
  return hex64(h);
}

}  // namespace

StereotypeBins bin_users_by_stereotype(std::span<const UserAudit> per_user,
                                       std::optional<std::size_t> bin_count) {
  if (per_user.empty()) throw Error(ErrorCode::EmptyInput, "no users to bin");
  std::vector<const UserAudit*> order;
  order.reserve(per_user.size());
  for (const auto& row : per_user) order.push_back(&row);
  std::sort(order.begin(), order.end(), [](const UserAudit* a, const UserAudit* b) {
    if (a->stereotype != b->stereotype) return a->stereotype < b->stereotype;
    return a->user_id < b->user_id;
  });

  const std::size_t n_users = order.size();
  const auto n_inv = static_cast<std::size_t>(std::count_if(
      order.begin(), order.end(), [](const UserAudit* r) { return r->stereotype <= 0.0; }));

  std::size_t stereotyped_bins = 0;
  if (bin_count) {
    if (*bin_count == 0) throw Error(ErrorCode::ConfigError, "bin count must be positive");
    stereotyped_bins = n_inv == 0 ? *bin_count : std::max<std::size_t>(*bin_count, 2) - 1;
  } else {
    if (n_inv == 0) {
      throw Error(ErrorCode::NoInverseStereotyped,
                  "every user is stereotyped; pass an explicit bin count");
    }
    const auto n = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(static_cast<double>(n_users) / static_cast<double>(n_inv))));
    stereotyped_bins = n - 1;
  }
  const std::size_t rest = n_users - n_inv;
  stereotyped_bins = std::max<std::size_t>(1, std::min(stereotyped_bins, std::max<std::size_t>(rest, 1)));

  StereotypeBins out;
  out.inverse_users = n_inv;
  out.bins.resize(stereotyped_bins + 1);
  for (std::size_t i = 0; i < n_inv; ++i) out.bins[0].push_back(order[i]->user_id);
  const std::size_t size = rest / stereotyped_bins;
  for (std::size_t i = 0; i < rest; ++i) {
    const std::size_t bin = std::min(i / std::max<std::size_t>(size, 1), stereotyped_bins - 1) + 1;
    out.bins[bin].push_back(order[n_inv + i]->user_id);
  }
  return out;
}

double OversamplePlan::rate_of(UserId user) const {
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (std::find(bins[b].begin(), bins[b].end(), user) != bins[b].end()) return rates[b];
  }
  throw Error(ErrorCode::ConfigError, "user " + std::to_string(user) + " is not in the plan");
}

OversamplePlan build_oversample_plan(const StereotypeBins& bins, double base_rate) {
  if (!(base_rate >= kMinBaseRate && base_rate <= kMaxBaseRate)) {
    throw Error(ErrorCode::RateOutOfRange,
                "base rate " + format_double(base_rate) + " outside [0.01, 0.4]");
  }
  OversamplePlan plan;
  plan.bins = bins.bins;
  plan.base_rate = base_rate;
  for (std::size_t k = 0; k < plan.bins.size(); ++k) {
    plan.rates.push_back(1.0 + base_rate * static_cast<double>(k));
  }
  return plan;
}

std::vector<Interaction> resample_interactions(std::span<const Interaction> train,
                                               const OversamplePlan& plan, std::uint64_t seed) {
  std::map<UserId, double> rate;
  for (std::size_t b = 0; b < plan.bins.size(); ++b) {
    for (auto u : plan.bins[b]) rate[u] = plan.rates.at(b);
  }
  std::map<UserId, std::vector<std::size_t>> rows_of;
  for (std::size_t i = 0; i < train.size(); ++i) rows_of[train[i].user].push_back(i);

  std::vector<Interaction> out(train.begin(), train.end());
  std::mt19937_64 rng(seed);
  for (const auto& [user, rows] : rows_of) {
    auto it = rate.find(user);
    if (it == rate.end()) {
      throw Error(ErrorCode::ConfigError, "user " + std::to_string(user) + " is not in the plan");
    }
    // Snap to 1e-9 first so products such as 0.15 * 30 land on the intended half.
    const double want = std::round((it->second - 1.0) * static_cast<double>(rows.size()) * 1e9) / 1e9;
    const auto extra = static_cast<std::size_t>(std::nearbyint(want));
    std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
    for (std::size_t e = 0; e < extra; ++e) out.push_back(train[rows[pick(rng)]]);
  }
  return out;
}

MitigationResult mitigate_from_baseline(const SplitDataset& split, const ModelConfig& config,
                                        const AuditReport& baseline, double base_rate,
                                        std::uint64_t seed, const AuditOptions& options) {
  const auto bins = bin_users_by_stereotype(baseline.per_user);
  const auto plan = build_oversample_plan(bins, base_rate);
  const std::string test_hash = hash_rows(split.test);

  SplitDataset augmented;
  augmented.users = split.users;
  augmented.catalog = split.catalog;
  augmented.test = split.test;
  augmented.train = resample_interactions(split.train, plan, seed);

  const auto model = train_model(augmented, config);
  // Actual preferences come from the original rows, not the oversampled ones.
  const auto after = audit_population(split, *model, options);
  if (hash_rows(split.test) != test_hash || hash_rows(augmented.test) != test_hash) {
    throw Error(ErrorCode::InconsistentReport, "test split changed during mitigation");
  }

  MitigationResult r;
  r.model = to_string(config.kind);
  r.base_rate = base_rate;
  r.bins = plan.bins.size();
  r.train_rows_before = split.train.size();
  r.train_rows_after = augmented.train.size();
  r.stereotyped_share_before = baseline.stereotyped_share;
  r.stereotyped_share_after = after.stereotyped_share;
  r.ndcg_before = baseline.ndcg_mean;
  r.ndcg_after = after.ndcg_mean;
  r.stereotype_before = baseline.system.stereotype;
  r.stereotype_after = after.system.stereotype;
  r.miscalibration_before = baseline.system.miscalibration_mean;
  r.miscalibration_after = after.system.miscalibration_mean;
  return r;
}

MitigationResult run_mitigation_experiment(const SplitDataset& split, const ModelConfig& config,
                                           double base_rate, std::uint64_t seed,
                                           const AuditOptions& options) {
  const auto model = train_model(split, config);
  const auto baseline = audit_population(split, *model, options);
  return mitigate_from_baseline(split, config, baseline, base_rate, seed, options);
}

}  // namespace recaudit
