#pragma once

// Canonical on-disk form of a preprocessed dataset: interactions.tsv, catalog.tsv, users.tsv
// plus manifest.json recording counts, the data-config hash and a content hash.

#include <filesystem>
#include <string>

#include "recaudit/dataio.hpp"

namespace recaudit {

struct SnapshotManifest {
  std::size_t interactions = 0;
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t categories = 0;
  std::string config_hash;   // hash of the preprocessing configuration
  std::string content_hash;  // hash over the three data files, in order
};

SnapshotManifest write_snapshot(const Dataset& dataset, const std::filesystem::path& dir,
                                const std::string& config_hash);

struct Snapshot {
  Dataset dataset;
  SnapshotManifest manifest;
};

/// Reads a snapshot back and verifies the content hash against the manifest.
Snapshot read_snapshot(const std::filesystem::path& dir);

SnapshotManifest read_manifest(const std::filesystem::path& dir);

}  // namespace recaudit
