#include "recaudit/evalreport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "recaudit/error.hpp"
#include "recaudit/kernels.hpp"

namespace recaudit {
namespace {

constexpr std::array<std::string_view, 8> kMeasures = {
    "atypicality", "diversity",          "miscalibration", "bias_effect",
    "variance_effect", "stereotype", "inflated_diversity", "ndcg_at_k"};

bool is_minority(const UserAudit& row, Attribute a) {
  return a == Attribute::Gender ? row.gender == Gender::Female : row.age_group == AgeGroup::Older;
}

std::pair<std::string, std::string> labels(Attribute a) {
  if (a == Attribute::Gender) return {group_label(Gender::Female), group_label(Gender::Male)};
  return {group_label(AgeGroup::Older), group_label(AgeGroup::Younger)};
}

}  // namespace

std::string to_string(Attribute a) { return a == Attribute::Gender ? "gender" : "age"; }
std::string group_label(Gender g) { return g == Gender::Male ? "men" : "women"; }
std::string group_label(AgeGroup g) { return g == AgeGroup::Younger ? "younger" : "older"; }

std::span<const std::string_view> measure_names() { return kMeasures; }

double measure_value(const UserAudit& row, std::string_view measure) {
  if (measure == "atypicality") return row.atypicality;
  if (measure == "diversity") return row.diversity;
  if (measure == "miscalibration") return row.miscalibration;
  if (measure == "bias_effect") return row.bias_effect;
  if (measure == "variance_effect") return row.variance_effect;
  if (measure == "stereotype") return row.stereotype;
  if (measure == "inflated_diversity") return row.inflated_diversity;
  if (measure == "ndcg_at_k") return row.ndcg_at_k;
  throw Error(ErrorCode::ConfigError, "unknown measure '" + std::string(measure) + "'");
}

double ndcg_at_k(const TopKList& topk, std::span<const ItemId> test_items, std::size_t k) {
  if (test_items.empty() || k == 0) return 0.0;
  double dcg = 0.0;
  const std::size_t depth = std::min(k, topk.items.size());
  for (std::size_t r = 0; r < depth; ++r) {
    if (std::find(test_items.begin(), test_items.end(), topk.items[r].item) != test_items.end()) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(test_items.size(), k);
  for (std::size_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

AuditReport audit_population(const SplitDataset& split, const Model& model,
                             const AuditOptions& options) {
  if (split.users.empty()) throw Error(ErrorCode::EmptyInput, "no users to audit");
  AuditReport report;
  report.model = to_string(model.kind());
  report.k = options.k;
  report.alpha = options.alpha;
  report.categories.assign(split.catalog.categories().begin(), split.catalog.categories().end());

  // Sequential pre-pass: actual preferences and test sets.
  report.actual = actual_preferences(split);
  std::unordered_map<UserId, std::vector<ItemId>> test_sets;
  for (const auto& x : split.test) test_sets[x.user].push_back(x.item);

  const auto lists = kernels::recommend_all(model, options.k, options.exec);
  std::vector<const TopKList*> by_user(split.users.size(), nullptr);
  for (std::size_t u = 0; u < split.users.size(); ++u) {
    auto idx = model.training().user_index(split.users[u].id);
    if (!idx) throw Error(ErrorCode::UnknownUser, "user " + std::to_string(split.users[u].id));
    by_user[u] = &lists[*idx];
  }
  report.predicted.reserve(split.users.size());
  for (const auto* list : by_user) report.predicted.push_back(predicted_preference(*list, split.catalog));

  report.system = decompose_system(report.actual, report.predicted, options.alpha);
  report.system.stereotype = stereotype_system(report.actual, report.predicted, options.alpha);

  report.per_user = kernels::audit_rows(report.actual, report.predicted, report.system.mean_actual,
                                        report.system.mean_predicted, options.alpha, options.exec);

  double ndcg_sum = 0.0;
  std::size_t stereotyped = 0;
  for (std::size_t u = 0; u < split.users.size(); ++u) {
    auto& row = report.per_user[u];
    const auto& user = split.users[u];
    row.user_id = user.id;
    row.gender = user.gender;
    row.age_group = user.age_group;
    auto it = test_sets.find(user.id);
    if (it != test_sets.end()) {
      row.test_items = it->second.size();
      row.ndcg_at_k = ndcg_at_k(*by_user[u], it->second, options.k);
      ndcg_sum += row.ndcg_at_k;
      ++report.ndcg_users;
    }
    if (row.stereotype > 0.0) ++stereotyped;
  }
  report.ndcg_mean = report.ndcg_users > 0 ? ndcg_sum / static_cast<double>(report.ndcg_users) : 0.0;
  report.stereotyped_share =
      static_cast<double>(stereotyped) / static_cast<double>(report.per_user.size());

  std::vector<std::size_t> order(report.per_user.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = report.per_user[a];
    const auto& rb = report.per_user[b];
    if (ra.atypicality != rb.atypicality) return ra.atypicality < rb.atypicality;
    return ra.user_id < rb.user_id;
  });
  for (std::size_t r = 0; r < order.size(); ++r) report.per_user[order[r]].typicality_rank = r + 1;
  return report;
}

GroupDisparity group_disparity(const AuditReport& report, Attribute attribute) {
  GroupDisparity out;
  out.attribute = attribute;
  std::tie(out.minority, out.majority) = labels(attribute);

  std::vector<std::size_t> minority_rows;
  std::vector<std::size_t> majority_rows;
  for (std::size_t u = 0; u < report.per_user.size(); ++u) {
    (is_minority(report.per_user[u], attribute) ? minority_rows : majority_rows).push_back(u);
  }
  if (minority_rows.size() < 2 || majority_rows.size() < 2) {
    throw Error(ErrorCode::DegenerateGroup, to_string(attribute) + " groups of size " +
                                                std::to_string(minority_rows.size()) + " and " +
                                                std::to_string(majority_rows.size()));
  }

  for (auto measure : kMeasures) {
    std::vector<double> a;
    std::vector<double> b;
    const bool ranking = measure == "ndcg_at_k";
    for (auto u : minority_rows) {
      if (!ranking || report.per_user[u].test_items > 0) a.push_back(measure_value(report.per_user[u], measure));
    }
    for (auto u : majority_rows) {
      if (!ranking || report.per_user[u].test_items > 0) b.push_back(measure_value(report.per_user[u], measure));
    }
    MeasureComparison cmp;
    cmp.measure = std::string(measure);
    cmp.minority = summarize(a);
    cmp.majority = summarize(b);
    if (a.size() >= 2 && b.size() >= 2) {
      cmp.welch = welch_t_test(a, b);
    } else {
      cmp.welch = {0.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
    }
    out.measures.push_back(cmp);
  }

  for (const auto* rows : {&minority_rows, &majority_rows}) {
    std::vector<PreferenceDistribution> p;
    std::vector<PreferenceDistribution> q;
    for (auto u : *rows) {
      p.push_back(report.actual.at(u));
      q.push_back(report.predicted.at(u));
    }
    GroupSystem g;
    g.group = rows == &minority_rows ? out.minority : out.majority;
    g.users = rows->size();
    g.bias_term = decompose_system(p, q, report.alpha).bias_term;
    try {
      g.stereotype = stereotype_system(p, q, report.alpha);
    } catch (const Error&) {
      g.stereotype = std::numeric_limits<double>::quiet_NaN();
    }
    out.system.push_back(g);
  }
  return out;
}

BiasDisparityTable bias_disparity_matrix(const AuditReport& report, Attribute attribute) {
  BiasDisparityTable table;
  table.attribute = attribute;
  auto [minority, majority] = labels(attribute);
  table.groups = {minority, majority};
  for (bool want_minority : {true, false}) {
    std::vector<PreferenceDistribution> p;
    std::vector<PreferenceDistribution> q;
    for (std::size_t u = 0; u < report.per_user.size(); ++u) {
      if (is_minority(report.per_user[u], attribute) != want_minority) continue;
      p.push_back(report.actual.at(u));
      q.push_back(report.predicted.at(u));
    }
    std::vector<std::optional<double>> row(report.categories.size());
    if (!p.empty()) {
      const auto p_bar = mean_distribution(p);
      const auto q_bar = mean_distribution(q);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (p_bar[c] > 0.0) row[c] = bias_disparity(p_bar, q_bar, c);
      }
    }
    table.values.push_back(std::move(row));
  }
  return table;
}

AuditReport build_report(const SplitDataset& split, const Model& model, const AuditOptions& options,
                         std::string config_hash, std::string manifest_hash) {
  auto report = audit_population(split, model, options);
  report.config_hash = std::move(config_hash);
  report.manifest_hash = std::move(manifest_hash);
  for (auto a : {Attribute::Gender, Attribute::Age}) {
    report.groups.push_back(group_disparity(report, a));
    report.bias_disparity.push_back(bias_disparity_matrix(report, a));
  }
  return report;
}

void check_consistency(const AuditReport& report, double tolerance) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InconsistentReport, what); };
  const std::size_t n = report.per_user.size();
  if (n == 0) fail("report has no users");
  if (report.actual.size() != n || report.predicted.size() != n) fail("distributions misaligned");

  double mc = 0.0;
  double ndcg = 0.0;
  std::size_t ndcg_users = 0;
  for (const auto& row : report.per_user) {
    mc += row.miscalibration;
    if (row.test_items > 0) {
      ndcg += row.ndcg_at_k;
      ++ndcg_users;
    }
  }
  if (std::abs(mc / static_cast<double>(n) - report.system.miscalibration_mean) > tolerance) {
    fail("miscalibration mean does not match per-user rows");
  }
  if (ndcg_users != report.ndcg_users) fail("nDCG coverage does not match per-user rows");
  if (ndcg_users > 0 && std::abs(ndcg / static_cast<double>(ndcg_users) - report.ndcg_mean) > tolerance) {
    fail("nDCG mean does not match per-user rows");
  }
  for (const auto& g : report.groups) {
    const auto fresh = group_disparity(report, g.attribute);
    for (std::size_t m = 0; m < g.measures.size(); ++m) {
      const auto& stored = g.measures[m];
      const auto& recomputed = fresh.measures.at(m);
      if (stored.minority.count != recomputed.minority.count ||
          stored.majority.count != recomputed.majority.count ||
          std::abs(stored.minority.mean - recomputed.minority.mean) > tolerance ||
          std::abs(stored.majority.mean - recomputed.majority.mean) > tolerance) {
        fail(to_string(g.attribute) + " group means for " + stored.measure + " do not recompute");
      }
    }
  }
}

}  // namespace recaudit
