#pragma once

// MovieLens-format ingestion, implicit-feedback preprocessing and chronological splitting.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "recaudit/metrics.hpp"
#include "recaudit/prefdist.hpp"

namespace recaudit {

using UserId = std::int64_t;
using ItemId = std::int64_t;

struct Interaction {
  UserId user = 0;
  ItemId item = 0;
  int rating = 0;
  std::int64_t timestamp = 0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

// Dense item table. Items are kept in ascending id order so a dense index tie-break matches
// an item-id tie-break. Each row of weights sums to one.
class ItemCatalog {
 public:
  ItemCatalog() = default;
  ItemCatalog(std::vector<std::string> categories, std::vector<ItemId> item_ids,
              std::vector<double> weights);

  std::span<const std::string> categories() const noexcept { return categories_; }
  std::size_t category_count() const noexcept { return categories_.size(); }
  std::size_t item_count() const noexcept { return item_ids_.size(); }
  std::span<const ItemId> item_ids() const noexcept { return item_ids_; }
  ItemId item_id(std::size_t index) const { return item_ids_[index]; }
  std::span<const double> weights(std::size_t index) const {
    return {weights_.data() + index * categories_.size(), categories_.size()};
  }
  std::optional<std::size_t> find(ItemId id) const;
  bool contains(ItemId id) const { return index_.contains(id); }

  /// Keeps only the listed items, then drops categories no remaining item carries.
  ItemCatalog restricted_to(std::span<const ItemId> keep) const;

  friend bool operator==(const ItemCatalog& a, const ItemCatalog& b) {
    return a.categories_ == b.categories_ && a.item_ids_ == b.item_ids_ && a.weights_ == b.weights_;
  }

 private:
  std::vector<std::string> categories_;
  std::vector<ItemId> item_ids_;
  std::vector<double> weights_;
  std::unordered_map<ItemId, std::size_t> index_;
};

struct UserRecord {
  UserId id = 0;
  Gender gender = Gender::Male;
  int age_code = 0;
  AgeGroup age_group = AgeGroup::Younger;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

inline constexpr int kDefaultAgeCutoff = 35;

struct Dataset {
  std::vector<Interaction> interactions;  // sorted by (user, timestamp, item)
  ItemCatalog catalog;
  std::vector<UserRecord> users;          // ascending id, exactly the users with interactions

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct SplitDataset {
  std::vector<Interaction> train;
  std::vector<Interaction> test;
  std::vector<UserRecord> users;
  ItemCatalog catalog;
  std::vector<std::string> warnings;
};

struct PreprocessOptions {
  int min_rating = 4;
  std::size_t min_interactions = 20;
};

/// `UserID::MovieID::Rating::Timestamp` lines.
std::vector<Interaction> parse_interactions(const std::filesystem::path& path);
/// `MovieID::Title::Genre1|Genre2|...` lines, read as Latin-1 bytes. Each listed genre gets
/// weight 1/(number of genres). Categories are ordered by first appearance.
ItemCatalog parse_catalog(const std::filesystem::path& path);
/// `UserID::Gender::Age::Occupation::Zip` lines. Ages below age_cutoff are "younger".
std::vector<UserRecord> parse_users(const std::filesystem::path& path,
                                    int age_cutoff = kDefaultAgeCutoff);

AgeGroup age_group_for(int age_code, int age_cutoff = kDefaultAgeCutoff);

/// Deduplicate (latest timestamp wins) -> keep ratings >= min_rating -> drop users with fewer
/// than min_interactions -> prune items left without interactions. Applied once, in that order.
/// Interactions whose user or item is missing from the side tables are dropped.
Dataset preprocess(std::span<const Interaction> interactions, const ItemCatalog& catalog,
                   std::span<const UserRecord> users, const PreprocessOptions& options = {});

/// Per user, sort by (timestamp, item) and send the first ceil(ratio * n) to train.
SplitDataset chronological_split(const Dataset& dataset, double train_ratio);

/// Normalized sum of the category weights of the user's training items (with multiplicity).
PreferenceDistribution actual_preference(UserId user, std::span<const Interaction> train,
                                         const ItemCatalog& catalog);

/// actual_preference for every user of the split, aligned with split.users.
std::vector<PreferenceDistribution> actual_preferences(const SplitDataset& split);

}  // namespace recaudit
