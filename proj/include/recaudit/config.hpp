#pragma once

// Run configuration: flat key=value file, overridable from the command line.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "recaudit/dataio.hpp"
#include "recaudit/evalreport.hpp"
#include "recaudit/recsys.hpp"

namespace recaudit {

struct RunConfig {
  std::filesystem::path data_dir;  // ratings.dat, movies.dat, users.dat
  std::filesystem::path out_dir = "out";
  PreprocessOptions preprocess;
  int age_cutoff = kDefaultAgeCutoff;
  double split_ratio = 0.8;
  std::size_t k = 20;
  double alpha = kDefaultSmoothing;
  ModelConfig model;
  std::uint64_t resample_seed = 7;
  std::vector<double> b_grid;
  ReportFormat format = ReportFormat::Tsv;

  /// Throws ConfigError for values outside their documented ranges.
  void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys are a ConfigError.
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Applies parsed keys on top of cfg. Keys: data, out, min_rating, min_interactions,
/// age_cutoff, split_ratio, k, alpha, model, k_neighbors, factors, learning_rate, reg, epochs,
/// confidence_alpha, iterations, seed, resample_seed, b, format.
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& values);

std::vector<double> parse_b_grid(std::string_view text);

/// Hash of the settings that shape the prepared snapshot.
std::string data_config_hash(const RunConfig& cfg);

/// Hash of everything that shapes an audit: data settings, split, k, alpha and the model.
std::string audit_config_hash(const RunConfig& cfg);

}  // namespace recaudit
