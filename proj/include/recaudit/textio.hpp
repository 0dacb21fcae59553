#pragma once

// Helpers shared by the TSV/JSON writers: lossless number formatting, FNV-1a hashing,
// whole-file IO and a tab-separated table reader.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace recaudit {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// Tab-separated table with one header row. Lines starting with '#' are metadata of the
// form "# key=value" and are collected separately.
struct TsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws if absent
  std::optional<std::string> meta_value(std::string_view key) const;
};

TsvTable read_tsv(const std::filesystem::path& path);

}  // namespace recaudit
