#include <charconv>
#include <cmath>
#include <nlohmann/json.hpp>

#include "recaudit/error.hpp"
#include "recaudit/evalreport.hpp"
#include "recaudit/textio.hpp"

namespace recaudit {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kPerUser = "per_user.tsv";
constexpr const char* kSystem = "system.tsv";
constexpr const char* kGroups = "groups.tsv";
constexpr const char* kGroupSystem = "group_system.tsv";
constexpr const char* kBiasDisparity = "bias_disparity.tsv";
constexpr const char* kPreferences = "preferences.tsv";
constexpr const char* kJson = "report.json";

std::uint64_t to_uint(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedLine, "not a non-negative integer: '" + s + "'");
  }
  return v;
}

std::int64_t to_int(const std::string& s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedLine, "not an integer: '" + s + "'");
  }
  return v;
}

Attribute parse_attribute(const std::string& s) {
  if (s == "gender") return Attribute::Gender;
  if (s == "age") return Attribute::Age;
  throw Error(ErrorCode::MalformedLine, "unknown attribute '" + s + "'");
}

Gender parse_gender(const std::string& s) {
  if (s == "M") return Gender::Male;
  if (s == "F") return Gender::Female;
  throw Error(ErrorCode::MalformedLine, "unknown gender '" + s + "'");
}

AgeGroup parse_age_group(const std::string& s) {
  if (s == "younger") return AgeGroup::Younger;
  if (s == "older") return AgeGroup::Older;
  throw Error(ErrorCode::MalformedLine, "unknown age group '" + s + "'");
}

std::string gender_code(Gender g) { return g == Gender::Male ? "M" : "F"; }

// Non-finite doubles travel as the strings "nan", "inf", "-inf".
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double get_num(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

std::string meta_lines(const AuditReport& r) {
  return "# config_hash=" + r.config_hash + "\n# manifest_hash=" + r.manifest_hash + "\n";
}

// Key/value pairs shared by system.tsv and the JSON "system" object.
std::vector<std::pair<std::string, double>> system_values(const AuditReport& r) {
  const auto& s = r.system;
  return {{"alpha", r.alpha},
          {"miscalibration_mean", s.miscalibration_mean},
          {"bias_term", s.bias_term},
          {"variance_term", s.variance_term},
          {"decomposition_residual", s.decomposition_residual},
          {"stereotype", s.stereotype},
          {"bias_variance_ratio", s.bias_variance_ratio},
          {"ndcg_mean", r.ndcg_mean},
          {"stereotyped_share", r.stereotyped_share}};
}

void set_system_value(AuditReport& r, const std::string& key, double v) {
  auto& s = r.system;
  if (key == "alpha") r.alpha = v;
  else if (key == "miscalibration_mean") s.miscalibration_mean = v;
  else if (key == "bias_term") s.bias_term = v;
  else if (key == "variance_term") s.variance_term = v;
  else if (key == "decomposition_residual") s.decomposition_residual = v;
  else if (key == "stereotype") s.stereotype = v;
  else if (key == "bias_variance_ratio") s.bias_variance_ratio = v;
  else if (key == "ndcg_mean") r.ndcg_mean = v;
  else if (key == "stereotyped_share") r.stereotyped_share = v;
  else throw Error(ErrorCode::MalformedLine, "unknown system key '" + key + "'");
}

void set_measure(UserAudit& row, std::string_view measure, double v) {
  if (measure == "atypicality") row.atypicality = v;
  else if (measure == "diversity") row.diversity = v;
  else if (measure == "miscalibration") row.miscalibration = v;
  else if (measure == "bias_effect") row.bias_effect = v;
  else if (measure == "variance_effect") row.variance_effect = v;
  else if (measure == "stereotype") row.stereotype = v;
  else if (measure == "inflated_diversity") row.inflated_diversity = v;
  else if (measure == "ndcg_at_k") row.ndcg_at_k = v;
}

std::string join_weights(const PreferenceDistribution& d) {
  std::string out;
  for (double w : d) out += '\t' + format_double(w);
  return out;
}

PreferenceDistribution weights_from(const std::vector<std::string>& row, std::size_t first) {
  std::vector<double> w;
  for (std::size_t c = first; c < row.size(); ++c) w.push_back(parse_double(row[c]));
  return PreferenceDistribution(std::move(w));
}

// ---- TSV -------------------------------------------------------------------------------

void export_tsv(const AuditReport& r, const std::filesystem::path& dir) {
  const std::string meta = meta_lines(r);

  std::string per_user = meta + "user_id\tgender\tage_group";
  for (auto m : measure_names()) per_user += '\t' + std::string(m);
  per_user += "\ttest_items\ttypicality_rank\n";
  for (const auto& row : r.per_user) {
    per_user += std::to_string(row.user_id) + '\t' + gender_code(row.gender) + '\t' +
                group_label(row.age_group);
    for (auto m : measure_names()) {
      per_user += '\t';
      // nDCG is undefined without test items; leave the cell empty.
      if (m != "ndcg_at_k" || row.test_items > 0) per_user += format_double(measure_value(row, m));
    }
    per_user += '\t' + std::to_string(row.test_items) + '\t' + std::to_string(row.typicality_rank) + '\n';
  }

  std::string system = meta + "key\tvalue\n";
  system += "model\t" + r.model + '\n';
  system += "k\t" + std::to_string(r.k) + '\n';
  system += "ndcg_users\t" + std::to_string(r.ndcg_users) + '\n';
  for (const auto& [k, v] : system_values(r)) system += k + '\t' + format_double(v) + '\n';

  std::string groups = meta +
      "attribute\tmeasure\tminority\tmajority\tminority_n\tminority_mean\tminority_sd\t"
      "majority_n\tmajority_mean\tmajority_sd\tt\tdf\tp_value\n";
  std::string group_system = meta + "attribute\tgroup\tusers\tbias_term\tstereotype\n";
  for (const auto& g : r.groups) {
    const std::string attr = to_string(g.attribute);
    for (const auto& m : g.measures) {
      groups += attr + '\t' + m.measure + '\t' + g.minority + '\t' + g.majority + '\t' +
                std::to_string(m.minority.count) + '\t' + format_double(m.minority.mean) + '\t' +
                format_double(m.minority.stddev) + '\t' + std::to_string(m.majority.count) + '\t' +
                format_double(m.majority.mean) + '\t' + format_double(m.majority.stddev) + '\t' +
                format_double(m.welch.t) + '\t' + format_double(m.welch.df) + '\t' +
                format_double(m.welch.p_value) + '\n';
    }
    for (const auto& s : g.system) {
      group_system += attr + '\t' + s.group + '\t' + std::to_string(s.users) + '\t' +
                      format_double(s.bias_term) + '\t' + format_double(s.stereotype) + '\n';
    }
  }

  std::string bd = meta + "attribute\tgroup";
  for (const auto& c : r.categories) bd += '\t' + c;
  bd += '\n';
  for (const auto& t : r.bias_disparity) {
    for (std::size_t g = 0; g < t.groups.size(); ++g) {
      bd += to_string(t.attribute) + '\t' + t.groups[g];
      for (const auto& v : t.values[g]) bd += '\t' + (v ? format_double(*v) : std::string());
      bd += '\n';
    }
  }

  std::string prefs = meta + "user_id\tkind";
  for (const auto& c : r.categories) prefs += '\t' + c;
  prefs += '\n';
  prefs += "mean\tactual" + join_weights(r.system.mean_actual) + '\n';
  prefs += "mean\tpredicted" + join_weights(r.system.mean_predicted) + '\n';
  for (std::size_t u = 0; u < r.per_user.size(); ++u) {
    const auto id = std::to_string(r.per_user[u].user_id);
    prefs += id + "\tactual" + join_weights(r.actual[u]) + '\n';
    prefs += id + "\tpredicted" + join_weights(r.predicted[u]) + '\n';
  }

  std::filesystem::create_directories(dir);
  write_text(dir / kPerUser, per_user);
  write_text(dir / kSystem, system);
  write_text(dir / kGroups, groups);
  write_text(dir / kGroupSystem, group_system);
  write_text(dir / kBiasDisparity, bd);
  write_text(dir / kPreferences, prefs);
}

// Every file of one export carries the same hashes; a mix of exports is refused.
void check_same_origin(const TsvTable& t, const AuditReport& r, const char* file) {
  if (t.meta_value("config_hash").value_or("") != r.config_hash ||
      t.meta_value("manifest_hash").value_or("") != r.manifest_hash) {
    throw Error(ErrorCode::ConfigMismatch, std::string(file) + " comes from a different run");
  }
}

GroupDisparity& group_for(AuditReport& r, Attribute a) {
  for (auto& g : r.groups) {
    if (g.attribute == a) return g;
  }
  r.groups.push_back({});
  r.groups.back().attribute = a;
  return r.groups.back();
}

AuditReport import_tsv(const std::filesystem::path& dir) {
  AuditReport r;
  const auto per_user = read_tsv(dir / kPerUser);
  r.config_hash = per_user.meta_value("config_hash").value_or("");
  r.manifest_hash = per_user.meta_value("manifest_hash").value_or("");

  const auto system = read_tsv(dir / kSystem);
  check_same_origin(system, r, kSystem);
  for (const auto& row : system.rows) {
    if (row[0] == "model") r.model = row[1];
    else if (row[0] == "k") r.k = to_uint(row[1]);
    else if (row[0] == "ndcg_users") r.ndcg_users = to_uint(row[1]);
    else set_system_value(r, row[0], parse_double(row[1]));
  }

  const auto c_id = per_user.column("user_id");
  const auto c_gender = per_user.column("gender");
  const auto c_age = per_user.column("age_group");
  const auto c_tests = per_user.column("test_items");
  const auto c_rank = per_user.column("typicality_rank");
  for (const auto& row : per_user.rows) {
    UserAudit u;
    u.user_id = to_int(row[c_id]);
    u.gender = parse_gender(row[c_gender]);
    u.age_group = parse_age_group(row[c_age]);
    for (auto m : measure_names()) {
      const auto& cell = row[per_user.column(m)];
      if (!cell.empty()) set_measure(u, m, parse_double(cell));
    }
    u.test_items = to_uint(row[c_tests]);
    u.typicality_rank = to_uint(row[c_rank]);
    r.per_user.push_back(u);
  }

  const auto prefs = read_tsv(dir / kPreferences);
  check_same_origin(prefs, r, kPreferences);
  r.categories.assign(prefs.header.begin() + 2, prefs.header.end());
  std::size_t next = 0;
  for (const auto& row : prefs.rows) {
    auto d = weights_from(row, 2);
    const bool actual = row[1] == "actual";
    if (row[0] == "mean") {
      (actual ? r.system.mean_actual : r.system.mean_predicted) = std::move(d);
      continue;
    }
    if (next >= r.per_user.size() || to_int(row[0]) != r.per_user[next].user_id) {
      throw Error(ErrorCode::InconsistentReport, "preferences.tsv is not aligned with per_user.tsv");
    }
    if (actual) {
      r.actual.push_back(std::move(d));
    } else {
      r.predicted.push_back(std::move(d));
      ++next;
    }
  }

  const auto groups = read_tsv(dir / kGroups);
  check_same_origin(groups, r, kGroups);
  for (const auto& row : groups.rows) {
    auto& g = group_for(r, parse_attribute(row[0]));
    g.minority = row[2];
    g.majority = row[3];
    MeasureComparison m;
    m.measure = row[1];
    m.minority = {to_uint(row[4]), parse_double(row[5]), parse_double(row[6])};
    m.majority = {to_uint(row[7]), parse_double(row[8]), parse_double(row[9])};
    m.welch = {parse_double(row[10]), parse_double(row[11]), parse_double(row[12])};
    g.measures.push_back(std::move(m));
  }
  const auto group_system = read_tsv(dir / kGroupSystem);
  check_same_origin(group_system, r, kGroupSystem);
  for (const auto& row : group_system.rows) {
    auto& g = group_for(r, parse_attribute(row[0]));
    g.system.push_back({row[1], to_uint(row[2]), parse_double(row[3]), parse_double(row[4])});
  }

  const auto bd = read_tsv(dir / kBiasDisparity);
  check_same_origin(bd, r, kBiasDisparity);
  for (const auto& row : bd.rows) {
    const auto attr = parse_attribute(row[0]);
    if (r.bias_disparity.empty() || r.bias_disparity.back().attribute != attr) {
      r.bias_disparity.push_back({});
      r.bias_disparity.back().attribute = attr;
    }
    auto& t = r.bias_disparity.back();
    t.groups.push_back(row[1]);
    std::vector<std::optional<double>> values;
    for (std::size_t c = 2; c < row.size(); ++c) {
      if (!row[c].empty()) values.emplace_back(parse_double(row[c]));
      else values.emplace_back(std::nullopt);
    }
    t.values.push_back(std::move(values));
  }
  return r;
}

// ---- JSON ------------------------------------------------------------------------------

json weights_json(const PreferenceDistribution& d) {
  json a = json::array();
  for (double w : d) a.push_back(w);
  return a;
}

PreferenceDistribution weights_from(const json& a) {
  std::vector<double> w;
  for (const auto& x : a) w.push_back(x.get<double>());
  return PreferenceDistribution(std::move(w));
}

json summary_json(const SampleSummary& s) {
  return {{"n", s.count}, {"mean", num(s.mean)}, {"sd", num(s.stddev)}};
}

SampleSummary summary_from(const json& j) {
  return {j.at("n").get<std::size_t>(), get_num(j.at("mean")), get_num(j.at("sd"))};
}

void export_json(const AuditReport& r, const std::filesystem::path& dir) {
  json j;
  j["format"] = "recaudit-report";
  j["version"] = 1;
  j["config_hash"] = r.config_hash;
  j["manifest_hash"] = r.manifest_hash;
  j["model"] = r.model;
  j["k"] = r.k;
  j["ndcg_users"] = r.ndcg_users;
  json system = json::object();
  for (const auto& [k, v] : system_values(r)) system[k] = num(v);
  j["system"] = std::move(system);
  j["categories"] = r.categories;
  j["mean_actual"] = weights_json(r.system.mean_actual);
  j["mean_predicted"] = weights_json(r.system.mean_predicted);

  json users = json::array();
  for (std::size_t u = 0; u < r.per_user.size(); ++u) {
    const auto& row = r.per_user[u];
    json ju;
    ju["user_id"] = row.user_id;
    ju["gender"] = gender_code(row.gender);
    ju["age_group"] = group_label(row.age_group);
    for (auto m : measure_names()) {
      if (m == "ndcg_at_k" && row.test_items == 0) ju[std::string(m)] = nullptr;
      else ju[std::string(m)] = num(measure_value(row, m));
    }
    ju["test_items"] = row.test_items;
    ju["typicality_rank"] = row.typicality_rank;
    ju["actual"] = weights_json(r.actual[u]);
    ju["predicted"] = weights_json(r.predicted[u]);
    users.push_back(std::move(ju));
  }
  j["per_user"] = std::move(users);

  json groups = json::array();
  for (const auto& g : r.groups) {
    json jg;
    jg["attribute"] = to_string(g.attribute);
    jg["minority"] = g.minority;
    jg["majority"] = g.majority;
    json measures = json::array();
    for (const auto& m : g.measures) {
      measures.push_back({{"measure", m.measure},
                          {"minority", summary_json(m.minority)},
                          {"majority", summary_json(m.majority)},
                          {"t", num(m.welch.t)},
                          {"df", num(m.welch.df)},
                          {"p_value", num(m.welch.p_value)}});
    }
    jg["measures"] = std::move(measures);
    json sys = json::array();
    for (const auto& s : g.system) {
      sys.push_back({{"group", s.group},
                     {"users", s.users},
                     {"bias_term", num(s.bias_term)},
                     {"stereotype", num(s.stereotype)}});
    }
    jg["system"] = std::move(sys);
    groups.push_back(std::move(jg));
  }
  j["groups"] = std::move(groups);

  json bd = json::array();
  for (const auto& t : r.bias_disparity) {
    json values = json::array();
    for (const auto& row : t.values) {
      json jr = json::array();
      for (const auto& v : row) jr.push_back(v ? num(*v) : json(nullptr));
      values.push_back(std::move(jr));
    }
    bd.push_back({{"attribute", to_string(t.attribute)}, {"groups", t.groups}, {"values", values}});
  }
  j["bias_disparity"] = std::move(bd);

  write_text(dir / kJson, j.dump(2) + '\n');
}

AuditReport import_json(const std::filesystem::path& dir) {
  json j;
  try {
    j = json::parse(read_text(dir / kJson));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedLine, std::string("report.json: ") + e.what());
  }
  try {
    AuditReport r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.manifest_hash = j.at("manifest_hash").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.k = j.at("k").get<std::size_t>();
    r.ndcg_users = j.at("ndcg_users").get<std::size_t>();
    for (const auto& [k, v] : j.at("system").items()) set_system_value(r, k, get_num(v));
    r.categories = j.at("categories").get<std::vector<std::string>>();
    r.system.mean_actual = weights_from(j.at("mean_actual"));
    r.system.mean_predicted = weights_from(j.at("mean_predicted"));

    for (const auto& ju : j.at("per_user")) {
      UserAudit u;
      u.user_id = ju.at("user_id").get<std::int64_t>();
      u.gender = parse_gender(ju.at("gender").get<std::string>());
      u.age_group = parse_age_group(ju.at("age_group").get<std::string>());
      for (auto m : measure_names()) {
        const auto& v = ju.at(std::string(m));
        if (!v.is_null()) set_measure(u, m, get_num(v));
      }
      u.test_items = ju.at("test_items").get<std::size_t>();
      u.typicality_rank = ju.at("typicality_rank").get<std::size_t>();
      r.per_user.push_back(u);
      r.actual.push_back(weights_from(ju.at("actual")));
      r.predicted.push_back(weights_from(ju.at("predicted")));
    }

    for (const auto& jg : j.at("groups")) {
      GroupDisparity g;
      g.attribute = parse_attribute(jg.at("attribute").get<std::string>());
      g.minority = jg.at("minority").get<std::string>();
      g.majority = jg.at("majority").get<std::string>();
      for (const auto& jm : jg.at("measures")) {
        g.measures.push_back({jm.at("measure").get<std::string>(), summary_from(jm.at("minority")),
                              summary_from(jm.at("majority")),
                              {get_num(jm.at("t")), get_num(jm.at("df")), get_num(jm.at("p_value"))}});
      }
      for (const auto& js : jg.at("system")) {
        g.system.push_back({js.at("group").get<std::string>(), js.at("users").get<std::size_t>(),
                            get_num(js.at("bias_term")), get_num(js.at("stereotype"))});
      }
      r.groups.push_back(std::move(g));
    }

    for (const auto& jt : j.at("bias_disparity")) {
      BiasDisparityTable t;
      t.attribute = parse_attribute(jt.at("attribute").get<std::string>());
      t.groups = jt.at("groups").get<std::vector<std::string>>();
      for (const auto& jr : jt.at("values")) {
        std::vector<std::optional<double>> row;
        for (const auto& v : jr) {
          if (v.is_null()) row.emplace_back(std::nullopt);
          else row.emplace_back(get_num(v));
        }
        t.values.push_back(std::move(row));
      }
      r.bias_disparity.push_back(std::move(t));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedLine, std::string("report.json: ") + e.what());
  }
}

}  // namespace

void export_report(const AuditReport& report, const std::filesystem::path& dir, ReportFormat format) {
  if (format == ReportFormat::Tsv) {
    export_tsv(report, dir);
  } else {
    export_json(report, dir);
  }
}

AuditReport import_report(const std::filesystem::path& dir, ReportFormat format) {
  return format == ReportFormat::Tsv ? import_tsv(dir) : import_json(dir);
}

}  // namespace recaudit
