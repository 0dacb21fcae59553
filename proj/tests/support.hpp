#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <unistd.h>

#include "recaudit/dataio.hpp"
#include "recaudit/error.hpp"

namespace testing {

inline std::filesystem::path toy_dir() { return RECAUDIT_TOY_DIR; }
inline std::filesystem::path golden_dir() { return RECAUDIT_GOLDEN_DIR; }

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("recaudit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::optional<recaudit::ErrorCode> thrown_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const recaudit::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline recaudit::Dataset load_toy_dataset() {
  const auto dir = toy_dir();
  const auto interactions = recaudit::parse_interactions(dir / "ratings.dat");
  const auto catalog = recaudit::parse_catalog(dir / "movies.dat");
  const auto users = recaudit::parse_users(dir / "users.dat");
  return recaudit::preprocess(interactions, catalog, users);
}

inline recaudit::SplitDataset load_toy_split() {
  return recaudit::chronological_split(load_toy_dataset(), 0.8);
}

}  // namespace testing
