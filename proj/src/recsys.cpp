#include "recaudit/recsys.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "recaudit/error.hpp"
#include "recaudit/kernels.hpp"
#include "recaudit/textio.hpp"

namespace recaudit {

// ---------------------------------------------------------------------------------------------
// TrainingMatrix

TrainingMatrix TrainingMatrix::build(std::span<const UserRecord> users, const ItemCatalog& catalog,
                                     std::span<const Interaction> train) {
  std::vector<UserId> uids;
  uids.reserve(users.size());
  for (const auto& u : users) uids.push_back(u.id);
  std::sort(uids.begin(), uids.end());
  std::unordered_map<UserId, std::uint32_t> slot;
  for (std::size_t u = 0; u < uids.size(); ++u) slot.emplace(uids[u], static_cast<std::uint32_t>(u));

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(train.size());
  for (const auto& x : train) {
    auto s = slot.find(x.user);
    auto i = catalog.find(x.item);
    if (s == slot.end() || !i) continue;
    pairs.emplace_back(s->second, static_cast<std::uint32_t>(*i));
  }
  auto m = from_pairs(uids.size(), catalog.item_count(), pairs);
  m.user_ids_ = std::move(uids);
  m.item_ids_.assign(catalog.item_ids().begin(), catalog.item_ids().end());
  return m;
}

TrainingMatrix TrainingMatrix::from_pairs(
    std::size_t n_users, std::size_t n_items,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs) {
  TrainingMatrix m;
  m.user_ids_.resize(n_users);
  std::iota(m.user_ids_.begin(), m.user_ids_.end(), UserId{0});
  m.item_ids_.resize(n_items);
  std::iota(m.item_ids_.begin(), m.item_ids_.end(), ItemId{0});

  std::vector<std::pair<std::uint32_t, std::uint32_t>> sorted(pairs.begin(), pairs.end());
  for (const auto& [u, i] : sorted) {
    if (u >= n_users || i >= n_items) throw Error(ErrorCode::LengthMismatch, "pair out of range");
  }
  std::sort(sorted.begin(), sorted.end());
  m.row_ptr_.assign(n_users + 1, 0);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k > 0 && sorted[k] == sorted[k - 1]) {
      m.counts_.back() += 1.0;
      continue;
    }
    m.cols_.push_back(sorted[k].second);
    m.counts_.push_back(1.0);
    ++m.row_ptr_[sorted[k].first + 1];
  }
  for (std::size_t u = 0; u < n_users; ++u) m.row_ptr_[u + 1] += m.row_ptr_[u];
  m.build_transpose();
  return m;
}

TrainingMatrix TrainingMatrix::from_parts(std::vector<UserId> user_ids, std::vector<ItemId> item_ids,
                                          std::vector<std::size_t> row_ptr,
                                          std::vector<std::uint32_t> cols, std::vector<double> counts) {
  if (row_ptr.size() != user_ids.size() + 1 || cols.size() != counts.size() ||
      row_ptr.back() != cols.size()) {
    throw Error(ErrorCode::LengthMismatch, "inconsistent training matrix parts");
  }
  TrainingMatrix m;
  m.user_ids_ = std::move(user_ids);
  m.item_ids_ = std::move(item_ids);
  m.row_ptr_ = std::move(row_ptr);
  m.cols_ = std::move(cols);
  m.counts_ = std::move(counts);
  for (auto c : m.cols_) {
    if (c >= m.item_ids_.size()) throw Error(ErrorCode::LengthMismatch, "item index out of range");
  }
  m.build_transpose();
  return m;
}

void TrainingMatrix::build_transpose() {
  const std::size_t n_items = item_ids_.size();
  col_ptr_.assign(n_items + 1, 0);
  for (auto c : cols_) ++col_ptr_[c + 1];
  for (std::size_t i = 0; i < n_items; ++i) col_ptr_[i + 1] += col_ptr_[i];
  rows_.assign(cols_.size(), 0);
  col_counts_.assign(cols_.size(), 0.0);
  std::vector<std::size_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
  for (std::size_t u = 0; u + 1 < row_ptr_.size(); ++u) {
    for (std::size_t k = row_ptr_[u]; k < row_ptr_[u + 1]; ++k) {
      const std::size_t dst = fill[cols_[k]]++;
      rows_[dst] = static_cast<std::uint32_t>(u);
      col_counts_[dst] = counts_[k];
    }
  }
}

std::optional<std::size_t> TrainingMatrix::user_index(UserId id) const {
  auto it = std::lower_bound(user_ids_.begin(), user_ids_.end(), id);
  if (it == user_ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - user_ids_.begin());
}

bool TrainingMatrix::has(std::size_t u, std::size_t i) const {
  auto items = items_of(u);
  return std::binary_search(items.begin(), items.end(), static_cast<std::uint32_t>(i));
}

// ---------------------------------------------------------------------------------------------
// Config

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::UserKnn: return "userknn";
    case ModelKind::ItemKnn: return "itemknn";
    case ModelKind::Bpr: return "bpr";
    case ModelKind::Wrmf: return "wrmf";
    case ModelKind::IdentityOracle: return "identity-oracle";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::UserKnn, ModelKind::ItemKnn, ModelKind::Bpr, ModelKind::Wrmf,
                 ModelKind::IdentityOracle}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown model '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  switch (kind) {
    case ModelKind::UserKnn:
    case ModelKind::ItemKnn:
      if (k_neighbors == 0) fail("k_neighbors must be >= 1");
      break;
    case ModelKind::Bpr:
      if (factors == 0) fail("factors must be >= 1");
      if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
      if (!(reg >= 0.0)) fail("reg must be >= 0");
      if (epochs == 0) fail("epochs must be >= 1");
      break;
    case ModelKind::Wrmf:
      if (factors == 0) fail("factors must be >= 1");
      if (!(reg > 0.0)) fail("reg must be > 0");
      if (!(confidence_alpha >= 0.0)) fail("confidence_alpha must be >= 0");
      if (iterations == 0) fail("iterations must be >= 1");
      break;
    case ModelKind::IdentityOracle:
      break;
  }
}

std::string ModelConfig::serialize() const {
  std::string s;
  s += "model=" + to_string(kind) + "\n";
  s += "k_neighbors=" + std::to_string(k_neighbors) + "\n";
  s += "factors=" + std::to_string(factors) + "\n";
  s += "learning_rate=" + format_double(learning_rate) + "\n";
  s += "reg=" + format_double(reg) + "\n";
  s += "epochs=" + std::to_string(epochs) + "\n";
  s += "confidence_alpha=" + format_double(confidence_alpha) + "\n";
  s += "iterations=" + std::to_string(iterations) + "\n";
  s += "seed=" + std::to_string(seed) + "\n";
  return s;
}

ModelConfig ModelConfig::deserialize(std::string_view text) {
  ModelConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "model") c.kind = parse_model_kind(val);
    else if (key == "k_neighbors") c.k_neighbors = std::stoull(val);
    else if (key == "factors") c.factors = std::stoull(val);
    else if (key == "learning_rate") c.learning_rate = parse_double(val);
    else if (key == "reg") c.reg = parse_double(val);
    else if (key == "epochs") c.epochs = std::stoull(val);
    else if (key == "confidence_alpha") c.confidence_alpha = parse_double(val);
    else if (key == "iterations") c.iterations = std::stoull(val);
    else if (key == "seed") c.seed = std::stoull(val);
  }
  return c;
}

// ---------------------------------------------------------------------------------------------
// Ranking

TopKList select_topk(UserId user, std::span<const double> scores, std::span<const ItemId> item_ids,
                     std::span<const std::uint32_t> seen, std::size_t k) {
  TopKList out;
  out.user = user;
  std::vector<std::uint32_t> candidates;
  candidates.reserve(scores.size());
  std::size_t s = 0;
  for (std::uint32_t i = 0; i < scores.size(); ++i) {
    while (s < seen.size() && seen[s] < i) ++s;
    if (s < seen.size() && seen[s] == i) continue;
    candidates.push_back(i);
  }
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const std::size_t take = std::min(k, candidates.size());
  out.truncated = take < k;
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);
  out.items.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    out.items.push_back({item_ids[candidates[r]], scores[candidates[r]]});
  }
  return out;
}

TopKList Model::recommend(std::size_t user, std::size_t k) const {
  std::vector<double> scores(train_.item_count(), 0.0);
  score_user(user, scores);
  return select_topk(train_.user_ids()[user], scores, train_.item_ids(), train_.items_of(user), k);
}

TopKList recommend_topk(const Model& model, UserId user, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::ConfigError, "k must be >= 1");
  auto idx = model.training().user_index(user);
  if (!idx) throw Error(ErrorCode::UnknownUser, "user " + std::to_string(user));
  return model.recommend(*idx, k);
}

PreferenceDistribution predicted_preference(const TopKList& topk, const ItemCatalog& catalog) {
  if (topk.items.empty()) {
    throw Error(ErrorCode::EmptyList, "no recommendations for user " + std::to_string(topk.user));
  }
  std::vector<double> mass(catalog.category_count(), 0.0);
  for (const auto& s : topk.items) {
    auto idx = catalog.find(s.item);
    if (!idx) throw Error(ErrorCode::LengthMismatch, "item " + std::to_string(s.item) + " not in catalog");
    auto w = catalog.weights(*idx);
    for (std::size_t c = 0; c < mass.size(); ++c) mass[c] += w[c];
  }
  return normalize(mass);
}

// ---------------------------------------------------------------------------------------------
// KNN

UserKnnModel::UserKnnModel(ModelConfig config, TrainingMatrix train, NeighborLists neighbors)
    : Model(std::move(config), std::move(train)), neighbors_(std::move(neighbors)) {
  if (neighbors_.size() != training().user_count()) {
    throw Error(ErrorCode::LengthMismatch, "one neighbor row per user expected");
  }
}

void UserKnnModel::score_user(std::size_t user, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& nb : neighbors_.of(user)) {
    for (auto i : training().items_of(nb.index)) out[i] += nb.similarity;
  }
}

ItemKnnModel::ItemKnnModel(ModelConfig config, TrainingMatrix train, NeighborLists neighbors)
    : Model(std::move(config), std::move(train)), neighbors_(std::move(neighbors)) {
  const std::size_t n = training().item_count();
  if (neighbors_.size() != n) throw Error(ErrorCode::LengthMismatch, "one neighbor row per item expected");
  reverse_.row_ptr.assign(n + 1, 0);
  for (const auto& nb : neighbors_.entries) ++reverse_.row_ptr[nb.index + 1];
  for (std::size_t j = 0; j < n; ++j) reverse_.row_ptr[j + 1] += reverse_.row_ptr[j];
  reverse_.entries.resize(neighbors_.entries.size());
  std::vector<std::size_t> fill(reverse_.row_ptr.begin(), reverse_.row_ptr.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& nb : neighbors_.of(i)) {
      reverse_.entries[fill[nb.index]++] = {static_cast<std::uint32_t>(i), nb.similarity};
    }
  }
}

void ItemKnnModel::score_user(std::size_t user, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (auto j : training().items_of(user)) {
    for (const auto& nb : reverse_.of(j)) out[nb.index] += nb.similarity;
  }
}

UserKnnModel train_userknn(const TrainingMatrix& train, const ModelConfig& config, Exec exec) {
  config.validate();
  if (train.nnz() == 0) throw Error(ErrorCode::EmptyInput, "empty training split");
  auto neighbors = kernels::cosine_topk(kernels::by_user(train), kernels::by_item(train),
                                        config.k_neighbors, exec);
  ModelConfig c = config;
  c.kind = ModelKind::UserKnn;
  return UserKnnModel(c, train, std::move(neighbors));
}

ItemKnnModel train_itemknn(const TrainingMatrix& train, const ModelConfig& config, Exec exec) {
  config.validate();
  if (train.nnz() == 0) throw Error(ErrorCode::EmptyInput, "empty training split");
  auto neighbors = kernels::cosine_topk(kernels::by_item(train), kernels::by_user(train),
                                        config.k_neighbors, exec);
  ModelConfig c = config;
  c.kind = ModelKind::ItemKnn;
  return ItemKnnModel(c, train, std::move(neighbors));
}

// ---------------------------------------------------------------------------------------------
// Factor models

FactorModel::FactorModel(ModelConfig config, TrainingMatrix train, std::size_t dim,
                         std::vector<double> user_factors, std::vector<double> item_factors,
                         std::vector<double> item_bias, std::vector<double> objective_trace)
    : Model(std::move(config), std::move(train)),
      dim_(dim),
      user_factors_(std::move(user_factors)),
      item_factors_(std::move(item_factors)),
      item_bias_(std::move(item_bias)),
      objective_trace_(std::move(objective_trace)) {
  if (user_factors_.size() != training().user_count() * dim_ ||
      item_factors_.size() != training().item_count() * dim_ ||
      item_bias_.size() != training().item_count()) {
    throw Error(ErrorCode::LengthMismatch, "factor shapes do not match the training matrix");
  }
}

void FactorModel::score_user(std::size_t user, std::span<double> out) const {
  const double* x = user_factors_.data() + user * dim_;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* y = item_factors_.data() + i * dim_;
    double s = item_bias_[i];
    for (std::size_t f = 0; f < dim_; ++f) s += x[f] * y[f];
    out[i] = s;
  }
}

namespace {

std::vector<double> uniform_init(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-0.01, 0.01);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Weighted squared loss plus L2 penalty. sum over all (u, i) of s^2 is x_u^T (Y^T Y) x_u.
double wrmf_objective(const TrainingMatrix& m, std::span<const double> x, std::span<const double> y,
                      std::size_t d, double reg, double alpha) {
  std::vector<double> gram(d * d, 0.0);
  for (std::size_t i = 0; i < m.item_count(); ++i) {
    const double* yi = y.data() + i * d;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) gram[a * d + b] += yi[a] * yi[b];
  }
  double loss = 0.0;
  for (std::size_t u = 0; u < m.user_count(); ++u) {
    const double* xu = x.data() + u * d;
    for (std::size_t a = 0; a < d; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < d; ++b) row += gram[a * d + b] * xu[b];
      loss += xu[a] * row;
    }
    auto items = m.items_of(u);
    auto counts = m.item_counts_of(u);
    for (std::size_t k = 0; k < items.size(); ++k) {
      const double* yi = y.data() + items[k] * d;
      double s = 0.0;
      for (std::size_t f = 0; f < d; ++f) s += xu[f] * yi[f];
      const double conf = 1.0 + alpha * counts[k];
      loss += conf * (1.0 - s) * (1.0 - s) - s * s;
    }
  }
  double norms = 0.0;
  for (double v : x) norms += v * v;
  for (double v : y) norms += v * v;
  return loss + reg * norms;
}

}  // namespace

FactorModel train_bpr(const TrainingMatrix& train, const ModelConfig& config) {
  config.validate();
  if (config.factors == 0) throw Error(ErrorCode::ConfigError, "factors must be >= 1");
  const std::size_t n_users = train.user_count();
  const std::size_t n_items = train.item_count();
  const std::size_t d = config.factors;
  if (train.nnz() == 0) throw Error(ErrorCode::EmptyInput, "empty training split");

  std::mt19937_64 rng(config.seed);
  auto user_f = uniform_init(rng, n_users * d);
  auto item_f = uniform_init(rng, n_items * d);
  std::vector<double> bias(n_items, 0.0);

  // Positive pool with multiplicity: duplicated training rows are drawn proportionally more.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> positives;
  for (std::size_t u = 0; u < n_users; ++u) {
    auto items = train.items_of(u);
    auto counts = train.item_counts_of(u);
    if (items.size() == n_items) continue;  // no negatives to contrast with
    for (std::size_t k = 0; k < items.size(); ++k) {
      for (int c = 0; c < static_cast<int>(counts[k]); ++c) {
        positives.emplace_back(static_cast<std::uint32_t>(u), items[k]);
      }
    }
  }
  if (positives.empty()) throw Error(ErrorCode::EmptyInput, "no user has an unseen item");

  std::uniform_int_distribution<std::size_t> pick_positive(0, positives.size() - 1);
  std::uniform_int_distribution<std::uint32_t> pick_item(0, static_cast<std::uint32_t>(n_items - 1));
  const double lr = config.learning_rate;
  const double reg = config.reg;
  std::vector<double> xu(d);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t step = 0; step < positives.size(); ++step) {
      const auto [u, i] = positives[pick_positive(rng)];
      std::uint32_t j = pick_item(rng);
      while (train.has(u, j)) j = pick_item(rng);

      double* pu = user_f.data() + std::size_t{u} * d;
      double* qi = item_f.data() + std::size_t{i} * d;
      double* qj = item_f.data() + std::size_t{j} * d;
      double x = bias[i] - bias[j];
      for (std::size_t f = 0; f < d; ++f) x += pu[f] * (qi[f] - qj[f]);
      const double g = 1.0 / (1.0 + std::exp(x));  // sigma(-x)

      std::copy(pu, pu + d, xu.begin());
      for (std::size_t f = 0; f < d; ++f) {
        pu[f] += lr * (g * (qi[f] - qj[f]) - reg * pu[f]);
        qi[f] += lr * (g * xu[f] - reg * qi[f]);
        qj[f] += lr * (-g * xu[f] - reg * qj[f]);
      }
      bias[i] += lr * (g - reg * bias[i]);
      bias[j] += lr * (-g - reg * bias[j]);
    }
    if (!all_finite(user_f) || !all_finite(item_f) || !all_finite(bias)) {
      throw Error(ErrorCode::DivergedTraining, "BPR parameters became non-finite in epoch " +
                                                   std::to_string(epoch + 1));
    }
  }
  ModelConfig c = config;
  c.kind = ModelKind::Bpr;
  return FactorModel(c, train, d, std::move(user_f), std::move(item_f), std::move(bias));
}

FactorModel train_wrmf(const TrainingMatrix& train, const ModelConfig& config, Exec exec) {
  config.validate();
  if (config.factors == 0) throw Error(ErrorCode::ConfigError, "factors must be >= 1");
  const std::size_t d = config.factors;
  if (train.nnz() == 0) throw Error(ErrorCode::EmptyInput, "empty training split");

  std::mt19937_64 rng(config.seed);
  auto user_f = uniform_init(rng, train.user_count() * d);
  auto item_f = uniform_init(rng, train.item_count() * d);

  std::vector<double> trace;
  trace.push_back(wrmf_objective(train, user_f, item_f, d, config.reg, config.confidence_alpha));
  const auto users = kernels::by_user(train);
  const auto items = kernels::by_item(train);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    kernels::als_half_step(users, item_f, user_f, d, config.reg, config.confidence_alpha, exec);
    kernels::als_half_step(items, user_f, item_f, d, config.reg, config.confidence_alpha, exec);
    if (!all_finite(user_f) || !all_finite(item_f)) {
      throw Error(ErrorCode::DivergedTraining, "WRMF factors became non-finite");
    }
    trace.push_back(wrmf_objective(train, user_f, item_f, d, config.reg, config.confidence_alpha));
  }
  ModelConfig c = config;
  c.kind = ModelKind::Wrmf;
  std::vector<double> bias(train.item_count(), 0.0);
  return FactorModel(c, train, d, std::move(user_f), std::move(item_f), std::move(bias),
                     std::move(trace));
}

// ---------------------------------------------------------------------------------------------
// Identity oracle

IdentityOracleModel::IdentityOracleModel(ModelConfig config, TrainingMatrix train,
                                         std::size_t categories, std::vector<double> item_weights)
    : Model(std::move(config), std::move(train)),
      categories_(categories),
      item_weights_(std::move(item_weights)) {
  if (item_weights_.size() != training().item_count() * categories_) {
    throw Error(ErrorCode::LengthMismatch, "item weight table does not match the catalog");
  }
}

void IdentityOracleModel::score_user(std::size_t user, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const auto list = recommend(user, out.size());
  const auto ids = training().item_ids();
  for (const auto& s : list.items) {
    auto it = std::lower_bound(ids.begin(), ids.end(), s.item);
    out[static_cast<std::size_t>(it - ids.begin())] = s.score;
  }
}

TopKList IdentityOracleModel::recommend(std::size_t user, std::size_t k) const {
  const std::size_t nc = categories_;
  const std::size_t n_items = training().item_count();
  auto history = training().items_of(user);
  auto counts = training().item_counts_of(user);

  std::vector<double> mix(nc, 0.0);
  double total = 0.0;
  for (std::size_t h = 0; h < history.size(); ++h) {
    const double* w = item_weights_.data() + history[h] * nc;
    for (std::size_t c = 0; c < nc; ++c) mix[c] += counts[h] * w[c];
  }
  for (double v : mix) total += v;

  std::vector<bool> taken(n_items, false);
  for (auto i : history) taken[i] = true;

  // Target total mass k * p; each pick minimises the squared gap to it.
  std::vector<double> gap(nc, 0.0);
  if (total > 0.0) {
    for (std::size_t c = 0; c < nc; ++c) gap[c] = static_cast<double>(k) * (mix[c] / total);
  }

  TopKList out;
  out.user = training().user_ids()[user];

  // Exact phase: when every k * p(c) is integral and enough unseen single-category items
  // exist, take that many of each, lowest index first.
  {
    std::vector<std::size_t> quota(nc, 0);
    bool integral = total > 0.0;
    for (std::size_t c = 0; c < nc && integral; ++c) {
      const double q = std::round(gap[c]);
      integral = std::abs(gap[c] - q) < 1e-9;
      quota[c] = static_cast<std::size_t>(q);
    }
    std::vector<std::uint32_t> picks;
    if (integral) {
      std::vector<std::size_t> left = quota;
      for (std::size_t i = 0; i < n_items && picks.size() < k; ++i) {
        if (taken[i]) continue;
        const double* w = item_weights_.data() + i * nc;
        for (std::size_t c = 0; c < nc; ++c) {
          if (w[c] == 1.0 && left[c] > 0) {
            --left[c];
            picks.push_back(static_cast<std::uint32_t>(i));
            break;
          }
        }
      }
    }
    if (integral && picks.size() == k) {
      for (std::size_t r = 0; r < k; ++r) {
        out.items.push_back({training().item_ids()[picks[r]], static_cast<double>(k - r)});
      }
      return out;
    }
  }

  for (std::size_t r = 0; r < k; ++r) {
    std::size_t best = n_items;
    double best_cost = 0.0;
    for (std::size_t i = 0; i < n_items; ++i) {
      if (taken[i]) continue;
      const double* w = item_weights_.data() + i * nc;
      double cost = 0.0;
      for (std::size_t c = 0; c < nc; ++c) cost += (w[c] - gap[c]) * (w[c] - gap[c]);
      if (best == n_items || cost < best_cost) {
        best = i;
        best_cost = cost;
      }
    }
    if (best == n_items) {
      out.truncated = true;
      break;
    }
    taken[best] = true;
    const double* w = item_weights_.data() + best * nc;
    for (std::size_t c = 0; c < nc; ++c) gap[c] -= w[c];
    out.items.push_back({training().item_ids()[best], static_cast<double>(k - r)});
  }
  return out;
}

IdentityOracleModel make_identity_oracle(const TrainingMatrix& train, const ItemCatalog& catalog,
                                         const ModelConfig& config) {
  if (catalog.item_count() != train.item_count()) {
    throw Error(ErrorCode::LengthMismatch, "catalog and training matrix disagree on items");
  }
  std::vector<double> weights;
  weights.reserve(catalog.item_count() * catalog.category_count());
  for (std::size_t i = 0; i < catalog.item_count(); ++i) {
    auto w = catalog.weights(i);
    weights.insert(weights.end(), w.begin(), w.end());
  }
  ModelConfig c = config;
  c.kind = ModelKind::IdentityOracle;
  return IdentityOracleModel(c, train, catalog.category_count(), std::move(weights));
}

std::unique_ptr<Model> train_model(const SplitDataset& split, const ModelConfig& config) {
  config.validate();
  auto train = TrainingMatrix::build(split.users, split.catalog, split.train);
  switch (config.kind) {
    case ModelKind::UserKnn: return std::make_unique<UserKnnModel>(train_userknn(train, config));
    case ModelKind::ItemKnn: return std::make_unique<ItemKnnModel>(train_itemknn(train, config));
    case ModelKind::Bpr: return std::make_unique<FactorModel>(train_bpr(train, config));
    case ModelKind::Wrmf: return std::make_unique<FactorModel>(train_wrmf(train, config));
    case ModelKind::IdentityOracle:
      return std::make_unique<IdentityOracleModel>(make_identity_oracle(train, split.catalog, config));
  }
  throw Error(ErrorCode::ConfigError, "unhandled model kind");
}

}  // namespace recaudit
