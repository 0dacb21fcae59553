#include "recaudit/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "recaudit/error.hpp"

namespace recaudit {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path.string());
  return std::move(buf).str();
}

// Calls fn(line, line_number) for every non-blank line, with any trailing '\r' removed.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line, line_no);
    pos = end + 1;
  }
}

std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + sep.size();
  }
}

template <typename T>
bool parse_int(std::string_view field, T& out) {
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

}  // namespace

ItemCatalog::ItemCatalog(std::vector<std::string> categories, std::vector<ItemId> item_ids,
                         std::vector<double> weights)
    : categories_(std::move(categories)), item_ids_(std::move(item_ids)), weights_(std::move(weights)) {
  if (weights_.size() != item_ids_.size() * categories_.size()) {
    throw Error(ErrorCode::LengthMismatch, "catalog weight table does not match its shape");
  }
  if (!std::is_sorted(item_ids_.begin(), item_ids_.end())) {
    // Sort rows by id, carrying their weights along.
    std::vector<std::size_t> order(item_ids_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return item_ids_[a] < item_ids_[b]; });
    std::vector<ItemId> ids;
    std::vector<double> w;
    ids.reserve(order.size());
    w.reserve(weights_.size());
    for (std::size_t i : order) {
      ids.push_back(item_ids_[i]);
      auto row = this->weights(i);
      w.insert(w.end(), row.begin(), row.end());
    }
    item_ids_ = std::move(ids);
    weights_ = std::move(w);
  }
  index_.reserve(item_ids_.size());
  for (std::size_t i = 0; i < item_ids_.size(); ++i) {
    if (!index_.emplace(item_ids_[i], i).second) {
      throw Error(ErrorCode::ConfigError, "duplicate item id " + std::to_string(item_ids_[i]));
    }
  }
}

std::optional<std::size_t> ItemCatalog::find(ItemId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ItemCatalog ItemCatalog::restricted_to(std::span<const ItemId> keep) const {
  std::vector<std::size_t> rows;
  rows.reserve(keep.size());
  for (ItemId id : keep) {
    if (auto idx = find(id)) rows.push_back(*idx);
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  const std::size_t nc = category_count();
  std::vector<bool> used(nc, false);
  for (std::size_t r : rows) {
    auto w = weights(r);
    for (std::size_t c = 0; c < nc; ++c) used[c] = used[c] || w[c] > 0.0;
  }
  std::vector<std::string> cats;
  for (std::size_t c = 0; c < nc; ++c) {
    if (used[c]) cats.push_back(categories_[c]);
  }
  std::vector<ItemId> ids;
  std::vector<double> w;
  ids.reserve(rows.size());
  w.reserve(rows.size() * cats.size());
  for (std::size_t r : rows) {
    ids.push_back(item_ids_[r]);
    auto row = weights(r);
    for (std::size_t c = 0; c < nc; ++c) {
      if (used[c]) w.push_back(row[c]);
    }
  }
  return ItemCatalog(std::move(cats), std::move(ids), std::move(w));
}

std::vector<Interaction> parse_interactions(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<Interaction> out;
  out.reserve(text.size() / 24);
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto f = split_fields(line, "::");
    Interaction x;
    if (f.size() != 4 || !parse_int(f[0], x.user) || !parse_int(f[1], x.item) ||
        !parse_int(f[2], x.rating) || !parse_int(f[3], x.timestamp)) {
      throw ParseError(path.string(), line_no, "expected UserID::MovieID::Rating::Timestamp");
    }
    if (x.rating < 1 || x.rating > 5) {
      throw ParseError(path.string(), line_no, "rating " + std::to_string(x.rating) + " outside 1-5");
    }
    out.push_back(x);
  });
  return out;
}

ItemCatalog parse_catalog(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::string> categories;
  std::unordered_map<std::string, std::size_t> category_index;
  std::vector<std::pair<ItemId, std::vector<std::size_t>>> rows;

  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const std::size_t first = line.find("::");
    const std::size_t last = line.rfind("::");
    ItemId id = 0;
    if (first == std::string_view::npos || last == first || !parse_int(line.substr(0, first), id)) {
      throw ParseError(path.string(), line_no, "expected MovieID::Title::Genres");
    }
    const auto genres = split_fields(line.substr(last + 2), "|");
    std::vector<std::size_t> cats;
    for (auto g : genres) {
      if (g.empty()) throw ParseError(path.string(), line_no, "empty genre");
      auto [it, inserted] = category_index.try_emplace(std::string(g), categories.size());
      if (inserted) categories.emplace_back(g);
      if (std::find(cats.begin(), cats.end(), it->second) == cats.end()) cats.push_back(it->second);
    }
    rows.emplace_back(id, std::move(cats));
  });

  const std::size_t nc = categories.size();
  std::vector<ItemId> ids;
  std::vector<double> weights(rows.size() * nc, 0.0);
  ids.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    ids.push_back(rows[r].first);
    const double share = 1.0 / static_cast<double>(rows[r].second.size());
    for (std::size_t c : rows[r].second) weights[r * nc + c] = share;
  }
  return ItemCatalog(std::move(categories), std::move(ids), std::move(weights));
}

AgeGroup age_group_for(int age_code, int age_cutoff) {
  return age_code < age_cutoff ? AgeGroup::Younger : AgeGroup::Older;
}

std::vector<UserRecord> parse_users(const std::filesystem::path& path, int age_cutoff) {
  const std::string text = read_file(path);
  std::vector<UserRecord> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto f = split_fields(line, "::");
    UserRecord u;
    if (f.size() != 5 || !parse_int(f[0], u.id) || !parse_int(f[2], u.age_code)) {
      throw ParseError(path.string(), line_no, "expected UserID::Gender::Age::Occupation::Zip");
    }
    if (f[1] == "M") {
      u.gender = Gender::Male;
    } else if (f[1] == "F") {
      u.gender = Gender::Female;
    } else {
      throw ParseError(path.string(), line_no, "gender must be M or F");
    }
    u.age_group = age_group_for(u.age_code, age_cutoff);
    out.push_back(u);
  });
  return out;
}

Dataset preprocess(std::span<const Interaction> interactions, const ItemCatalog& catalog,
                   std::span<const UserRecord> users, const PreprocessOptions& options) {
  std::unordered_map<UserId, const UserRecord*> user_table;
  for (const auto& u : users) user_table.emplace(u.id, &u);

  // Latest timestamp wins among duplicate (user, item) pairs.
  std::map<std::pair<UserId, ItemId>, Interaction> dedup;
  for (const auto& x : interactions) {
    if (!user_table.contains(x.user) || !catalog.contains(x.item)) continue;
    auto [it, inserted] = dedup.try_emplace({x.user, x.item}, x);
    if (!inserted && x.timestamp >= it->second.timestamp) it->second = x;
  }

  std::vector<Interaction> positives;
  positives.reserve(dedup.size());
  for (const auto& [key, x] : dedup) {
    if (x.rating >= options.min_rating) positives.push_back(x);
  }

  std::unordered_map<UserId, std::size_t> per_user;
  for (const auto& x : positives) ++per_user[x.user];

  Dataset out;
  for (const auto& x : positives) {
    if (per_user[x.user] >= options.min_interactions) out.interactions.push_back(x);
  }
  if (out.interactions.empty()) {
    throw Error(ErrorCode::EmptyAfterFilter, "no interactions survive preprocessing");
  }
  std::sort(out.interactions.begin(), out.interactions.end(),
            [](const Interaction& a, const Interaction& b) {
              return std::tie(a.user, a.timestamp, a.item) < std::tie(b.user, b.timestamp, b.item);
            });

  std::vector<ItemId> kept_items;
  std::unordered_set<UserId> kept_users;
  for (const auto& x : out.interactions) {
    kept_items.push_back(x.item);
    kept_users.insert(x.user);
  }
  out.catalog = catalog.restricted_to(kept_items);
  for (const auto& u : users) {
    if (kept_users.contains(u.id)) out.users.push_back(u);
  }
  std::sort(out.users.begin(), out.users.end(),
            [](const UserRecord& a, const UserRecord& b) { return a.id < b.id; });
  return out;
}

SplitDataset chronological_split(const Dataset& dataset, double train_ratio) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw Error(ErrorCode::InvalidRatio, "train ratio " + std::to_string(train_ratio));
  }
  SplitDataset split;
  split.users = dataset.users;
  split.catalog = dataset.catalog;

  std::map<UserId, std::vector<Interaction>> by_user;
  for (const auto& x : dataset.interactions) by_user[x.user].push_back(x);

  for (auto& [user, rows] : by_user) {
    std::sort(rows.begin(), rows.end(), [](const Interaction& a, const Interaction& b) {
      return std::tie(a.timestamp, a.item) < std::tie(b.timestamp, b.item);
    });
    const double n = static_cast<double>(rows.size());
    // The epsilon keeps exact products such as 0.8 * 35 from rounding up a whole interaction.
    auto n_train = static_cast<std::size_t>(std::ceil(train_ratio * n - 1e-9));
    n_train = std::min(n_train, rows.size());
    split.train.insert(split.train.end(), rows.begin(), rows.begin() + n_train);
    split.test.insert(split.test.end(), rows.begin() + n_train, rows.end());
    if (n_train == rows.size()) {
      split.warnings.push_back("user " + std::to_string(user) + " has no test interactions (" +
                               std::to_string(rows.size()) + " total)");
    }
  }
  return split;
}

PreferenceDistribution actual_preference(UserId user, std::span<const Interaction> train,
                                         const ItemCatalog& catalog) {
  std::vector<double> mass(catalog.category_count(), 0.0);
  bool any = false;
  for (const auto& x : train) {
    if (x.user != user) continue;
    auto idx = catalog.find(x.item);
    if (!idx) continue;
    auto w = catalog.weights(*idx);
    for (std::size_t c = 0; c < mass.size(); ++c) mass[c] += w[c];
    any = true;
  }
  if (!any) throw Error(ErrorCode::NoTrainingHistory, "user " + std::to_string(user));
  return normalize(mass);
}

std::vector<PreferenceDistribution> actual_preferences(const SplitDataset& split) {
  const std::size_t nc = split.catalog.category_count();
  std::unordered_map<UserId, std::size_t> slot;
  for (std::size_t u = 0; u < split.users.size(); ++u) slot.emplace(split.users[u].id, u);

  std::vector<std::vector<double>> mass(split.users.size(), std::vector<double>(nc, 0.0));
  std::vector<bool> seen(split.users.size(), false);
  for (const auto& x : split.train) {
    auto s = slot.find(x.user);
    auto idx = split.catalog.find(x.item);
    if (s == slot.end() || !idx) continue;
    auto w = split.catalog.weights(*idx);
    for (std::size_t c = 0; c < nc; ++c) mass[s->second][c] += w[c];
    seen[s->second] = true;
  }
  std::vector<PreferenceDistribution> out;
  out.reserve(mass.size());
  for (std::size_t u = 0; u < mass.size(); ++u) {
    if (!seen[u]) {
      throw Error(ErrorCode::NoTrainingHistory, "user " + std::to_string(split.users[u].id));
    }
    out.push_back(normalize(mass[u]));
  }
  return out;
}

}  // namespace recaudit
