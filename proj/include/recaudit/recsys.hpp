#pragma once

// Implicit-feedback recommenders behind one scoring interface.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recaudit/dataio.hpp"
#include "recaudit/prefdist.hpp"

namespace recaudit {

class BinaryWriter;
class BinaryReader;

enum class Exec { Serial, Parallel };

// User x item interaction counts in CSR (by user) and CSC (by item) form. Users and items are
// dense indices in ascending id order; counts exceed one only for duplicated training rows.
class TrainingMatrix {
 public:
  TrainingMatrix() = default;

  static TrainingMatrix build(std::span<const UserRecord> users, const ItemCatalog& catalog,
                              std::span<const Interaction> train);
  /// For tests and small fixtures: (user index, item index) pairs, repeats allowed.
  static TrainingMatrix from_pairs(std::size_t n_users, std::size_t n_items,
                                   std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs);
  static TrainingMatrix from_parts(std::vector<UserId> user_ids, std::vector<ItemId> item_ids,
                                   std::vector<std::size_t> row_ptr,
                                   std::vector<std::uint32_t> cols, std::vector<double> counts);

  std::size_t user_count() const noexcept { return user_ids_.size(); }
  std::size_t item_count() const noexcept { return item_ids_.size(); }
  std::size_t nnz() const noexcept { return cols_.size(); }

  std::span<const UserId> user_ids() const noexcept { return user_ids_; }
  std::span<const ItemId> item_ids() const noexcept { return item_ids_; }
  std::optional<std::size_t> user_index(UserId id) const;

  std::span<const std::uint32_t> items_of(std::size_t u) const {
    return {cols_.data() + row_ptr_[u], row_ptr_[u + 1] - row_ptr_[u]};
  }
  std::span<const double> item_counts_of(std::size_t u) const {
    return {counts_.data() + row_ptr_[u], row_ptr_[u + 1] - row_ptr_[u]};
  }
  std::span<const std::uint32_t> users_of(std::size_t i) const {
    return {rows_.data() + col_ptr_[i], col_ptr_[i + 1] - col_ptr_[i]};
  }
  std::span<const double> user_counts_of(std::size_t i) const {
    return {col_counts_.data() + col_ptr_[i], col_ptr_[i + 1] - col_ptr_[i]};
  }
  bool has(std::size_t u, std::size_t i) const;

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::uint32_t> cols() const noexcept { return cols_; }
  std::span<const double> counts() const noexcept { return counts_; }
  std::span<const std::size_t> col_ptr() const noexcept { return col_ptr_; }
  std::span<const std::uint32_t> rows() const noexcept { return rows_; }
  std::span<const double> col_counts() const noexcept { return col_counts_; }

  friend bool operator==(const TrainingMatrix& a, const TrainingMatrix& b) {
    return a.user_ids_ == b.user_ids_ && a.item_ids_ == b.item_ids_ && a.row_ptr_ == b.row_ptr_ &&
           a.cols_ == b.cols_ && a.counts_ == b.counts_;
  }

 private:
  void build_transpose();

  std::vector<UserId> user_ids_;
  std::vector<ItemId> item_ids_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> counts_;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<std::uint32_t> rows_;
  std::vector<double> col_counts_;
};

enum class ModelKind : std::uint8_t { UserKnn = 1, ItemKnn = 2, Bpr = 3, Wrmf = 4, IdentityOracle = 5 };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);  // throws ConfigError

struct ModelConfig {
  ModelKind kind = ModelKind::UserKnn;
  std::size_t k_neighbors = 50;
  std::size_t factors = 64;
  double learning_rate = 0.05;
  double reg = 0.01;
  std::size_t epochs = 30;
  double confidence_alpha = 40.0;
  std::size_t iterations = 15;
  std::uint64_t seed = 42;

  /// Throws ConfigError for out-of-range values (for example factors = 0).
  void validate() const;
  /// Canonical key=value lines, stored verbatim in checkpoints.
  std::string serialize() const;
  static ModelConfig deserialize(std::string_view text);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct ScoredItem {
  ItemId item = 0;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

struct TopKList {
  UserId user = 0;
  std::vector<ScoredItem> items;  // scores non-increasing, ties by ascending item id
  bool truncated = false;         // fewer than k unseen items were available

  friend bool operator==(const TopKList&, const TopKList&) = default;
};

// Sparse similarity rows: for each entity, (neighbor index, similarity) sorted by descending
// similarity then ascending index.
struct Neighbor {
  std::uint32_t index = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct NeighborLists {
  std::vector<std::size_t> row_ptr{0};
  std::vector<Neighbor> entries;

  std::size_t size() const noexcept { return row_ptr.size() - 1; }
  std::span<const Neighbor> of(std::size_t row) const {
    return {entries.data() + row_ptr[row], row_ptr[row + 1] - row_ptr[row]};
  }
  friend bool operator==(const NeighborLists&, const NeighborLists&) = default;
};

class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const noexcept = 0;
  /// Writes a score for every item (dense index) into out.
  virtual void score_user(std::size_t user, std::span<double> out) const = 0;
  /// Highest-scoring unseen items. The default ranks score_user output.
  virtual TopKList recommend(std::size_t user, std::size_t k) const;

  const TrainingMatrix& training() const noexcept { return train_; }
  const ModelConfig& config() const noexcept { return config_; }

  /// Kind-specific parameter block of the checkpoint layout.
  virtual void write_params(BinaryWriter& out) const = 0;

 protected:
  Model(ModelConfig config, TrainingMatrix train)
      : config_(std::move(config)), train_(std::move(train)) {}

 private:
  ModelConfig config_;
  TrainingMatrix train_;
};

// Cosine similarity on count vectors; score(u, i) sums sim(u, v) over the user's k nearest
// neighbors v that consumed i.
class UserKnnModel final : public Model {
 public:
  UserKnnModel(ModelConfig config, TrainingMatrix train, NeighborLists neighbors);
  ModelKind kind() const noexcept override { return ModelKind::UserKnn; }
  void score_user(std::size_t user, std::span<double> out) const override;
  void write_params(BinaryWriter& out) const override;
  const NeighborLists& neighbors() const noexcept { return neighbors_; }

 private:
  NeighborLists neighbors_;
};

// score(u, i) sums sim(i, j) over the items j in u's history that are among i's k nearest items.
class ItemKnnModel final : public Model {
 public:
  ItemKnnModel(ModelConfig config, TrainingMatrix train, NeighborLists neighbors);
  ModelKind kind() const noexcept override { return ModelKind::ItemKnn; }
  void score_user(std::size_t user, std::span<double> out) const override;
  void write_params(BinaryWriter& out) const override;
  const NeighborLists& neighbors() const noexcept { return neighbors_; }

 private:
  NeighborLists neighbors_;
  NeighborLists reverse_;  // reverse_[j] lists (i, sim(i, j)) for every i whose top-k holds j
};

// Shared by BPR and WRMF: score(u, i) = item_bias[i] + <user_factors[u], item_factors[i]>.
class FactorModel final : public Model {
 public:
  FactorModel(ModelConfig config, TrainingMatrix train, std::size_t dim,
              std::vector<double> user_factors, std::vector<double> item_factors,
              std::vector<double> item_bias, std::vector<double> objective_trace = {});
  ModelKind kind() const noexcept override { return config().kind; }
  void score_user(std::size_t user, std::span<double> out) const override;
  void write_params(BinaryWriter& out) const override;

  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> user_factors() const noexcept { return user_factors_; }
  std::span<const double> item_factors() const noexcept { return item_factors_; }
  std::span<const double> item_bias() const noexcept { return item_bias_; }
  /// WRMF only: objective after initialization and after every iteration.
  std::span<const double> objective_trace() const noexcept { return objective_trace_; }

 private:
  std::size_t dim_;
  std::vector<double> user_factors_;
  std::vector<double> item_factors_;
  std::vector<double> item_bias_;
  std::vector<double> objective_trace_;
};

// Test oracle reproducing each user's training category mix in the top-k list. When every
// k * p(c) is integral and enough unseen single-category items exist, it takes exactly that
// many per category; otherwise it greedily picks the unseen item whose weights bring the
// running sum closest (squared error) to k * p.
class IdentityOracleModel final : public Model {
 public:
  IdentityOracleModel(ModelConfig config, TrainingMatrix train, std::size_t categories,
                      std::vector<double> item_weights);
  ModelKind kind() const noexcept override { return ModelKind::IdentityOracle; }
  void score_user(std::size_t user, std::span<double> out) const override;
  TopKList recommend(std::size_t user, std::size_t k) const override;
  void write_params(BinaryWriter& out) const override;

 private:
  std::size_t categories_;
  std::vector<double> item_weights_;
};

UserKnnModel train_userknn(const TrainingMatrix& train, const ModelConfig& config,
                           Exec exec = Exec::Parallel);
ItemKnnModel train_itemknn(const TrainingMatrix& train, const ModelConfig& config,
                           Exec exec = Exec::Parallel);
/// Pairwise SGD on ln sigma(x_ui - x_uj) with uniform negatives; single-threaded, seeded.
FactorModel train_bpr(const TrainingMatrix& train, const ModelConfig& config);
/// Weighted ALS with confidence 1 + alpha * count on observed entries.
FactorModel train_wrmf(const TrainingMatrix& train, const ModelConfig& config,
                       Exec exec = Exec::Parallel);
IdentityOracleModel make_identity_oracle(const TrainingMatrix& train, const ItemCatalog& catalog,
                                         const ModelConfig& config);

/// Builds the training matrix from the split and dispatches on config.kind.
std::unique_ptr<Model> train_model(const SplitDataset& split, const ModelConfig& config);

/// Throws UnknownUser if the user was not part of training.
TopKList recommend_topk(const Model& model, UserId user, std::size_t k);

/// Ranks scores over items not in `seen` (sorted dense indices).
TopKList select_topk(UserId user, std::span<const double> scores, std::span<const ItemId> item_ids,
                     std::span<const std::uint32_t> seen, std::size_t k);

/// Unweighted sum of the recommended items' category weights, normalized. Throws EmptyList.
PreferenceDistribution predicted_preference(const TopKList& topk, const ItemCatalog& catalog);

}  // namespace recaudit
