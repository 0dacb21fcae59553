#include <cmath>
#include <cstring>

#include "doctest.h"
#include "recaudit/checkpoint.hpp"
#include "recaudit/error.hpp"
#include "recaudit/kernels.hpp"
#include "support.hpp"

using namespace recaudit;
using testing::thrown_code;

namespace {

ModelConfig config_for(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.factors = 8;
  c.epochs = 3;
  c.iterations = 3;
  return c;
}

}  // namespace

TEST_CASE("checkpoint round trip reproduces recommendations") {
  const auto split = testing::load_toy_split();
  for (auto kind : {ModelKind::UserKnn, ModelKind::ItemKnn, ModelKind::Bpr, ModelKind::Wrmf,
                    ModelKind::IdentityOracle}) {
    CAPTURE(to_string(kind));
    const auto model = train_model(split, config_for(kind));
    const auto bytes = serialize_model(*model);
    CHECK(std::memcmp(bytes.data(), kCheckpointMagic, 8) == 0);
    const auto back = deserialize_model(bytes);
    CHECK(back->kind() == kind);
    CHECK(back->config() == model->config());
    CHECK(back->training() == model->training());
    CHECK(serialize_model(*back) == bytes);
    CHECK(kernels::recommend_all(*back, 20) == kernels::recommend_all(*model, 20));
  }
}

TEST_CASE("checkpoint file IO") {
  const auto split = testing::load_toy_split();
  const auto model = train_model(split, config_for(ModelKind::UserKnn));
  testing::TempDir tmp("checkpoint");
  save_model(*model, tmp.path() / "m.bin");
  const auto back = load_model(tmp.path() / "m.bin");
  CHECK(serialize_model(*back) == serialize_model(*model));
}

TEST_CASE("corrupt checkpoints are rejected") {
  const auto split = testing::load_toy_split();
  const auto bytes = serialize_model(*train_model(split, config_for(ModelKind::ItemKnn)));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(thrown_code([&] { deserialize_model(bad_magic); }) == ErrorCode::MalformedLine);
  auto bad_version = bytes;
  bad_version[8] = 9;
  CHECK(thrown_code([&] { deserialize_model(bad_version); }) == ErrorCode::MalformedLine);
  CHECK(thrown_code([&] { deserialize_model(bytes.substr(0, bytes.size() - 3)); }) == ErrorCode::MalformedLine);
  CHECK(thrown_code([&] { deserialize_model(bytes + "x"); }) == ErrorCode::MalformedLine);
}

TEST_CASE("binary primitives are little-endian") {
  BinaryWriter w;
  w.u32(0x01020304u);
  w.f64(-0.0);
  w.str("ab");
  CHECK(w.bytes().substr(0, 4) == std::string("\x04\x03\x02\x01", 4));
  BinaryReader r(w.bytes());
  CHECK(r.u32() == 0x01020304u);
  CHECK(std::signbit(r.f64()));
  CHECK(r.str() == "ab");
  CHECK(r.at_end());
}
