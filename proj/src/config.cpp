#include "recaudit/config.hpp"

#include <charconv>
#include <set>

#include "recaudit/error.hpp"
#include "recaudit/textio.hpp"

namespace recaudit {
namespace {

const std::set<std::string, std::less<>> kKeys = {
    "data",   "out",    "min_rating", "min_interactions", "age_cutoff",       "split_ratio",
    "k",      "alpha",  "model",      "k_neighbors",      "factors",          "learning_rate",
    "reg",    "epochs", "confidence_alpha", "iterations", "seed",             "resample_seed",
    "b",      "format"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::ConfigError, key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_f64(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const Error&) {
    throw Error(ErrorCode::ConfigError, key + ": expected a number, got '" + v + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (preprocess.min_rating < 1 || preprocess.min_rating > 5) fail("min_rating must be in [1, 5]");
  if (preprocess.min_interactions < 1) fail("min_interactions must be >= 1");
  if (age_cutoff < 1) fail("age_cutoff must be >= 1");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) fail("split_ratio must be in (0, 1)");
  if (k == 0) fail("k must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must be in (0, 1)");
  model.validate();
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(trim(line.substr(0, eq)));
    if (!kKeys.contains(key)) {
      throw Error(ErrorCode::ConfigError, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<double> parse_b_grid(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const auto item = trim(text.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(to_f64("b", std::string(item)));
    pos = comma + 1;
  }
  return out;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& values) {
  for (const auto& [key, v] : values) {
    if (key == "data") cfg.data_dir = v;
    else if (key == "out") cfg.out_dir = v;
    else if (key == "min_rating") cfg.preprocess.min_rating = static_cast<int>(to_u64(key, v));
    else if (key == "min_interactions") cfg.preprocess.min_interactions = to_u64(key, v);
    else if (key == "age_cutoff") cfg.age_cutoff = static_cast<int>(to_u64(key, v));
    else if (key == "split_ratio") cfg.split_ratio = to_f64(key, v);
    else if (key == "k") cfg.k = to_u64(key, v);
    else if (key == "alpha") cfg.alpha = to_f64(key, v);
    else if (key == "model") cfg.model.kind = parse_model_kind(v);
    else if (key == "k_neighbors") cfg.model.k_neighbors = to_u64(key, v);
    else if (key == "factors") cfg.model.factors = to_u64(key, v);
    else if (key == "learning_rate") cfg.model.learning_rate = to_f64(key, v);
    else if (key == "reg") cfg.model.reg = to_f64(key, v);
    else if (key == "epochs") cfg.model.epochs = to_u64(key, v);
    else if (key == "confidence_alpha") cfg.model.confidence_alpha = to_f64(key, v);
    else if (key == "iterations") cfg.model.iterations = to_u64(key, v);
    else if (key == "seed") cfg.model.seed = to_u64(key, v);
    else if (key == "resample_seed") cfg.resample_seed = to_u64(key, v);
    else if (key == "b") cfg.b_grid = parse_b_grid(v);
    else if (key == "format") {
      if (v == "tsv") cfg.format = ReportFormat::Tsv;
      else if (v == "json") cfg.format = ReportFormat::Json;
      else throw Error(ErrorCode::ConfigError, "format must be tsv or json");
    } else {
      throw Error(ErrorCode::ConfigError, "unknown key '" + key + "'");
    }
  }
}

std::string data_config_hash(const RunConfig& cfg) {
  const std::string canon = "min_rating=" + std::to_string(cfg.preprocess.min_rating) +
                            "\nmin_interactions=" + std::to_string(cfg.preprocess.min_interactions) +
                            "\nage_cutoff=" + std::to_string(cfg.age_cutoff) + "\n";
  return hex64(fnv1a64(canon));
}

std::string audit_config_hash(const RunConfig& cfg) {
  const std::string canon = "data=" + data_config_hash(cfg) + "\nsplit_ratio=" +
                            format_double(cfg.split_ratio) + "\nk=" + std::to_string(cfg.k) +
                            "\nalpha=" + format_double(cfg.alpha) + "\n" + cfg.model.serialize();
  return hex64(fnv1a64(canon));
}

}  // namespace recaudit
