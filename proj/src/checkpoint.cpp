#include "recaudit/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "recaudit/error.hpp"
#include "recaudit/textio.hpp"

namespace recaudit {

void BinaryWriter::f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }

void BinaryWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  raw(s);
}

void BinaryReader::need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) throw Error(ErrorCode::MalformedLine, "checkpoint truncated");
}

std::uint64_t BinaryReader::get(int n) {
  need(static_cast<std::size_t>(n));
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
  }
  pos_ += static_cast<std::size_t>(n);
  return v;
}

std::uint8_t BinaryReader::u8() { return static_cast<std::uint8_t>(get(1)); }

double BinaryReader::f64() { return std::bit_cast<double>(get(8)); }

std::string BinaryReader::raw(std::size_t n) {
  need(n);
  std::string s = bytes_.substr(pos_, n);
  pos_ += n;
  return s;
}

std::string BinaryReader::str() { return raw(u32()); }

namespace {

void write_neighbors(BinaryWriter& out, const NeighborLists& nb) {
  out.u32(static_cast<std::uint32_t>(nb.size()));
  for (auto p : nb.row_ptr) out.u64(p);
  for (const auto& e : nb.entries) {
    out.u32(e.index);
    out.f64(e.similarity);
  }
}

NeighborLists read_neighbors(BinaryReader& in) {
  NeighborLists nb;
  const std::uint32_t rows = in.u32();
  nb.row_ptr.resize(std::size_t{rows} + 1);
  for (auto& p : nb.row_ptr) p = in.u64();
  nb.entries.resize(nb.row_ptr.back());
  for (auto& e : nb.entries) {
    e.index = in.u32();
    e.similarity = in.f64();
  }
  return nb;
}

void write_doubles(BinaryWriter& out, std::span<const double> v) {
  for (double x : v) out.f64(x);
}

std::vector<double> read_doubles(BinaryReader& in, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = in.f64();
  return v;
}

}  // namespace

void UserKnnModel::write_params(BinaryWriter& out) const { write_neighbors(out, neighbors_); }

void ItemKnnModel::write_params(BinaryWriter& out) const { write_neighbors(out, neighbors_); }

void FactorModel::write_params(BinaryWriter& out) const {
  out.u32(static_cast<std::uint32_t>(dim_));
  write_doubles(out, user_factors_);
  write_doubles(out, item_factors_);
  write_doubles(out, item_bias_);
  out.u32(static_cast<std::uint32_t>(objective_trace_.size()));
  write_doubles(out, objective_trace_);
}

void IdentityOracleModel::write_params(BinaryWriter& out) const {
  out.u32(static_cast<std::uint32_t>(categories_));
  write_doubles(out, item_weights_);
}

std::string serialize_model(const Model& model) {
  BinaryWriter out;
  out.raw(std::string_view(kCheckpointMagic, sizeof(kCheckpointMagic)));
  out.u8(kCheckpointVersion);
  out.u8(static_cast<std::uint8_t>(model.kind()));
  out.str(model.config().serialize());
  out.u64(model.config().seed);

  const auto& t = model.training();
  out.u32(static_cast<std::uint32_t>(t.user_count()));
  for (auto id : t.user_ids()) out.i64(id);
  out.u32(static_cast<std::uint32_t>(t.item_count()));
  for (auto id : t.item_ids()) out.i64(id);
  out.u64(t.nnz());
  for (auto p : t.row_ptr()) out.u64(p);
  for (auto c : t.cols()) out.u32(c);
  write_doubles(out, t.counts());

  model.write_params(out);
  return out.bytes();
}

std::unique_ptr<Model> deserialize_model(std::string bytes) {
  BinaryReader in(std::move(bytes));
  if (in.raw(sizeof(kCheckpointMagic)) != std::string_view(kCheckpointMagic, sizeof(kCheckpointMagic))) {
    throw Error(ErrorCode::MalformedLine, "not a model checkpoint (bad magic)");
  }
  if (const auto v = in.u8(); v != kCheckpointVersion) {
    throw Error(ErrorCode::MalformedLine, "unsupported checkpoint version " + std::to_string(v));
  }
  const auto kind = static_cast<ModelKind>(in.u8());
  ModelConfig config = ModelConfig::deserialize(in.str());
  config.seed = in.u64();
  if (config.kind != kind) throw Error(ErrorCode::MalformedLine, "checkpoint kind/config mismatch");

  std::vector<UserId> users(in.u32());
  for (auto& u : users) u = in.i64();
  std::vector<ItemId> items(in.u32());
  for (auto& i : items) i = in.i64();
  const std::size_t nnz = in.u64();
  std::vector<std::size_t> row_ptr(users.size() + 1);
  for (auto& p : row_ptr) p = in.u64();
  std::vector<std::uint32_t> cols(nnz);
  for (auto& c : cols) c = in.u32();
  auto counts = read_doubles(in, nnz);
  auto train = TrainingMatrix::from_parts(std::move(users), std::move(items), std::move(row_ptr),
                                          std::move(cols), std::move(counts));

  std::unique_ptr<Model> model;
  switch (kind) {
    case ModelKind::UserKnn:
      model = std::make_unique<UserKnnModel>(config, std::move(train), read_neighbors(in));
      break;
    case ModelKind::ItemKnn:
      model = std::make_unique<ItemKnnModel>(config, std::move(train), read_neighbors(in));
      break;
    case ModelKind::Bpr:
    case ModelKind::Wrmf: {
      const std::size_t dim = in.u32();
      auto uf = read_doubles(in, train.user_count() * dim);
      auto itf = read_doubles(in, train.item_count() * dim);
      auto bias = read_doubles(in, train.item_count());
      auto trace = read_doubles(in, in.u32());
      model = std::make_unique<FactorModel>(config, std::move(train), dim, std::move(uf),
                                            std::move(itf), std::move(bias), std::move(trace));
      break;
    }
    case ModelKind::IdentityOracle: {
      const std::size_t cats = in.u32();
      auto w = read_doubles(in, train.item_count() * cats);
      model = std::make_unique<IdentityOracleModel>(config, std::move(train), cats, std::move(w));
      break;
    }
    default:
      throw Error(ErrorCode::MalformedLine, "unknown model kind in checkpoint");
  }
  if (!in.at_end()) throw Error(ErrorCode::MalformedLine, "trailing bytes in checkpoint");
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_text(path, serialize_model(model));
}

std::unique_ptr<Model> load_model(const std::filesystem::path& path) {
  return deserialize_model(read_text(path));
}

}  // namespace recaudit
