#pragma once

// Model checkpoint files.
//
// Layout (all integers and doubles little-endian, doubles IEEE-754 binary64):
//   magic        8 bytes  "RAUDMODL"
//   version      u8       1
//   kind         u8       ModelKind value
//   config       u32 length + bytes (ModelConfig::serialize text)
//   seed         u64
//   training     u32 n_users, i64[n_users] user ids,
//                u32 n_items, i64[n_items] item ids,
//                u64 nnz, u64[n_users + 1] row_ptr, u32[nnz] item index, f64[nnz] count
//   params       kind-specific:
//     userknn / itemknn:  u32 rows, u64[rows + 1] row_ptr, {u32 index, f64 similarity}[entries]
//     bpr / wrmf:         u32 dim, f64[n_users*dim] user factors, f64[n_items*dim] item factors,
//                         f64[n_items] item bias, u32 n_trace, f64[n_trace] objective trace
//     identity-oracle:    u32 categories, f64[n_items*categories] item weights

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "recaudit/recsys.hpp"

namespace recaudit {

inline constexpr char kCheckpointMagic[8] = {'R', 'A', 'U', 'D', 'M', 'O', 'D', 'L'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

class BinaryWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
  void f64(double v);
  void raw(std::string_view s) { bytes_.append(s); }
  void str(std::string_view s);

  const std::string& bytes() const noexcept { return bytes_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string bytes_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint8_t u8();
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
  double f64();
  std::string raw(std::size_t n);
  std::string str();
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::uint64_t get(int n);
  void need(std::size_t n) const;
  std::string bytes_;
  std::size_t pos_ = 0;
};

std::string serialize_model(const Model& model);
std::unique_ptr<Model> deserialize_model(std::string bytes);

void save_model(const Model& model, const std::filesystem::path& path);
std::unique_ptr<Model> load_model(const std::filesystem::path& path);

}  // namespace recaudit
