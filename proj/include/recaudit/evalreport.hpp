#pragma once

// Population audits: ranking quality, per-user measures, demographic group comparisons and
// per-category bias disparity, plus TSV/JSON export of the resulting report.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recaudit/dataio.hpp"
#include "recaudit/metrics.hpp"
#include "recaudit/recsys.hpp"
#include "recaudit/stats.hpp"

namespace recaudit {

enum class Attribute { Gender, Age };

std::string to_string(Attribute a);
std::string group_label(Gender g);    // "men" / "women"
std::string group_label(AgeGroup g);  // "younger" / "older"

/// Binary-relevance nDCG with a log2(rank + 1) discount. The ideal ranking places
/// min(|test|, k) hits first. Returns 0 when test_items is empty.
double ndcg_at_k(const TopKList& topk, std::span<const ItemId> test_items, std::size_t k);

struct MeasureComparison {
  std::string measure;
  SampleSummary minority;  // women / older
  SampleSummary majority;  // men / younger
  WelchResult welch;       // minority minus majority
};

struct GroupSystem {
  std::string group;
  std::size_t users = 0;
  double bias_term = 0.0;   // KL(P_bar_g || Q_bar_g)
  double stereotype = 0.0;  // NaN when the group's actual spread is zero
};

struct GroupDisparity {
  Attribute attribute = Attribute::Gender;
  std::string minority;
  std::string majority;
  std::vector<MeasureComparison> measures;
  std::vector<GroupSystem> system;  // minority first
};

struct BiasDisparityTable {
  Attribute attribute = Attribute::Gender;
  std::vector<std::string> groups;                        // minority first
  std::vector<std::vector<std::optional<double>>> values;  // [group][category]; nullopt if undefined
};

struct AuditReport {
  std::string model;
  std::size_t k = 20;
  double alpha = kDefaultSmoothing;
  std::string config_hash;
  std::string manifest_hash;

  SystemAudit system;
  double ndcg_mean = 0.0;        // over users with at least one test item
  std::size_t ndcg_users = 0;    // coverage of the nDCG mean
  double stereotyped_share = 0.0;  // share of users with ST_u > 0

  std::vector<std::string> categories;
  std::vector<UserAudit> per_user;                 // ascending user id
  std::vector<PreferenceDistribution> actual;      // aligned with per_user
  std::vector<PreferenceDistribution> predicted;   // aligned with per_user
  std::vector<GroupDisparity> groups;
  std::vector<BiasDisparityTable> bias_disparity;
};

struct AuditOptions {
  std::size_t k = 20;
  double alpha = kDefaultSmoothing;
  Exec exec = Exec::Parallel;
};

/// Actual preferences from train, top-k from the model, every per-user measure and the
/// system-level audit. Group tables are left empty; see build_report.
AuditReport audit_population(const SplitDataset& split, const Model& model,
                             const AuditOptions& options = {});

/// Per-group summaries of every measure with Welch t-tests, minority vs majority.
GroupDisparity group_disparity(const AuditReport& report, Attribute attribute);

/// bias_disparity for every (group, category) cell of the attribute.
BiasDisparityTable bias_disparity_matrix(const AuditReport& report, Attribute attribute);

/// audit_population plus group disparity and bias disparity for gender and age.
AuditReport build_report(const SplitDataset& split, const Model& model, const AuditOptions& options,
                         std::string config_hash = {}, std::string manifest_hash = {});

/// Recomputes every aggregate from the per-user rows; throws InconsistentReport on mismatch.
void check_consistency(const AuditReport& report, double tolerance = 1e-9);

enum class ReportFormat { Tsv, Json };

/// Writes the report under dir: per_user.tsv, system.tsv, groups.tsv, group_system.tsv,
/// bias_disparity.tsv, preferences.tsv for Tsv; report.json for Json.
void export_report(const AuditReport& report, const std::filesystem::path& dir, ReportFormat format);
AuditReport import_report(const std::filesystem::path& dir, ReportFormat format);

/// Names of the per-user measures, in export column order.
std::span<const std::string_view> measure_names();
double measure_value(const UserAudit& row, std::string_view measure);

}  // namespace recaudit
