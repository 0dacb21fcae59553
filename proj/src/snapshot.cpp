#include "recaudit/snapshot.hpp"

#include <charconv>
#include <nlohmann/json.hpp>

#include "recaudit/error.hpp"
#include "recaudit/textio.hpp"

namespace recaudit {
namespace {

constexpr const char* kInteractions = "interactions.tsv";
constexpr const char* kCatalog = "catalog.tsv";
constexpr const char* kUsers = "users.tsv";
constexpr const char* kManifest = "manifest.json";

std::int64_t to_int(const std::string& s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedLine, "not an integer: '" + s + "'");
  }
  return v;
}

std::string content_hash_of(const std::string& a, const std::string& b, const std::string& c) {
  std::uint64_t h = fnv1a64(a);
  h = fnv1a64(b, h);
  h = fnv1a64(c, h);
  return hex64(h);
}

}  // namespace

SnapshotManifest write_snapshot(const Dataset& dataset, const std::filesystem::path& dir,
                                const std::string& config_hash) {
  const std::string meta = "# config_hash=" + config_hash + "\n";

  std::string inter = meta + "user_id\titem_id\trating\ttimestamp\n";
  for (const auto& x : dataset.interactions) {
    inter += std::to_string(x.user) + '\t' + std::to_string(x.item) + '\t' +
             std::to_string(x.rating) + '\t' + std::to_string(x.timestamp) + '\n';
  }

  const auto& cat = dataset.catalog;
  std::string catalog = meta + "item_id";
  for (const auto& c : cat.categories()) catalog += '\t' + c;
  catalog += '\n';
  for (std::size_t i = 0; i < cat.item_count(); ++i) {
    catalog += std::to_string(cat.item_id(i));
    for (double w : cat.weights(i)) catalog += '\t' + format_double(w);
    catalog += '\n';
  }

  std::string users = meta + "user_id\tgender\tage_code\tage_group\n";
  for (const auto& u : dataset.users) {
    users += std::to_string(u.id) + '\t' + (u.gender == Gender::Male ? "M" : "F") + '\t' +
             std::to_string(u.age_code) + '\t' +
             (u.age_group == AgeGroup::Younger ? "younger" : "older") + '\n';
  }

  std::filesystem::create_directories(dir);
  write_text(dir / kInteractions, inter);
  write_text(dir / kCatalog, catalog);
  write_text(dir / kUsers, users);

  SnapshotManifest m;
  m.interactions = dataset.interactions.size();
  m.users = dataset.users.size();
  m.items = cat.item_count();
  m.categories = cat.category_count();
  m.config_hash = config_hash;
  m.content_hash = content_hash_of(inter, catalog, users);

  nlohmann::ordered_json j;
  j["format"] = "recaudit-snapshot";
  j["version"] = 1;
  j["config_hash"] = m.config_hash;
  j["content_hash"] = m.content_hash;
  j["interactions"] = m.interactions;
  j["users"] = m.users;
  j["items"] = m.items;
  j["categories"] = m.categories;
  j["files"] = {kInteractions, kCatalog, kUsers};
  write_text(dir / kManifest, j.dump(2) + "\n");
  return m;
}

SnapshotManifest read_manifest(const std::filesystem::path& dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(dir / kManifest));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, (dir / kManifest).string() + ": " + e.what());
  }
  SnapshotManifest m;
  m.interactions = j.at("interactions").get<std::size_t>();
  m.users = j.at("users").get<std::size_t>();
  m.items = j.at("items").get<std::size_t>();
  m.categories = j.at("categories").get<std::size_t>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.content_hash = j.at("content_hash").get<std::string>();
  return m;
}

Snapshot read_snapshot(const std::filesystem::path& dir) {
  Snapshot snap;
  snap.manifest = read_manifest(dir);
  const std::string inter_text = read_text(dir / kInteractions);
  const std::string catalog_text = read_text(dir / kCatalog);
  const std::string users_text = read_text(dir / kUsers);
  if (content_hash_of(inter_text, catalog_text, users_text) != snap.manifest.content_hash) {
    throw Error(ErrorCode::ConfigMismatch, "snapshot files in " + dir.string() +
                                               " do not match their manifest");
  }

  const auto inter = read_tsv(dir / kInteractions);
  const auto catalog = read_tsv(dir / kCatalog);
  const auto users = read_tsv(dir / kUsers);
  for (const auto* t : {&inter, &catalog, &users}) {
    if (t->meta_value("config_hash") != snap.manifest.config_hash) {
      throw Error(ErrorCode::ConfigMismatch, "snapshot file hash differs from manifest");
    }
  }

  auto& ds = snap.dataset;
  ds.interactions.reserve(inter.rows.size());
  for (const auto& r : inter.rows) {
    ds.interactions.push_back(
        {to_int(r.at(0)), to_int(r.at(1)), static_cast<int>(to_int(r.at(2))), to_int(r.at(3))});
  }

  std::vector<std::string> cats(catalog.header.begin() + 1, catalog.header.end());
  std::vector<ItemId> ids;
  std::vector<double> weights;
  for (const auto& r : catalog.rows) {
    ids.push_back(to_int(r.at(0)));
    for (std::size_t c = 1; c < r.size(); ++c) weights.push_back(parse_double(r[c]));
  }
  ds.catalog = ItemCatalog(std::move(cats), std::move(ids), std::move(weights));

  for (const auto& r : users.rows) {
    UserRecord u;
    u.id = to_int(r.at(0));
    u.gender = r.at(1) == "F" ? Gender::Female : Gender::Male;
    u.age_code = static_cast<int>(to_int(r.at(2)));
    u.age_group = r.at(3) == "younger" ? AgeGroup::Younger : AgeGroup::Older;
    ds.users.push_back(u);
  }

  if (ds.interactions.size() != snap.manifest.interactions || ds.users.size() != snap.manifest.users ||
      ds.catalog.item_count() != snap.manifest.items) {
    throw Error(ErrorCode::ConfigMismatch, "snapshot counts disagree with manifest");
  }
  return snap;
}

}  // namespace recaudit
