#include "doctest.h"
#include "recaudit/error.hpp"
#include "recaudit/snapshot.hpp"
#include "recaudit/textio.hpp"
#include "support.hpp"

using namespace recaudit;
using testing::TempDir;
using testing::thrown_code;

TEST_CASE("snapshot round trip") {
  const auto d = testing::load_toy_dataset();
  TempDir tmp("snapshot");
  const auto m = write_snapshot(d, tmp.path(), "cafe0000cafe0000");
  CHECK(m.interactions == 1250);
  CHECK(m.users == 50);
  CHECK(m.categories == 8);

  const auto back = read_snapshot(tmp.path());
  CHECK(back.dataset == d);
  CHECK(back.manifest.content_hash == m.content_hash);
  CHECK(back.manifest.config_hash == "cafe0000cafe0000");
}

TEST_CASE("snapshot is deterministic") {
  const auto d = testing::load_toy_dataset();
  TempDir a("snapshot"), b("snapshot");
  write_snapshot(d, a.path(), "h");
  write_snapshot(d, b.path(), "h");
  for (const char* f : {"interactions.tsv", "catalog.tsv", "users.tsv", "manifest.json"}) {
    CHECK(read_text(a.path() / f) == read_text(b.path() / f));
  }
}

TEST_CASE("tampered snapshot is refused") {
  const auto d = testing::load_toy_dataset();
  TempDir tmp("snapshot");
  write_snapshot(d, tmp.path(), "h");
  auto text = read_text(tmp.path() / "users.tsv");
  text.back() = ' ';
  write_text(tmp.path() / "users.tsv", text + "\n");
  CHECK(thrown_code([&] { read_snapshot(tmp.path()); }) == ErrorCode::ConfigMismatch);
}
