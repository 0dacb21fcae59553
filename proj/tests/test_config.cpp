#include "doctest.h"
#include "recaudit/config.hpp"
#include "recaudit/error.hpp"
#include "support.hpp"

using namespace recaudit;
using testing::thrown_code;

TEST_CASE("config text") {
  const auto v = parse_config_text("# run\nmodel = wrmf\n\nk=10   # top-k\r\nb = 0.05, 0.1,0.2\n");
  CHECK(v.size() == 3);
  CHECK(v.at("model") == "wrmf");
  CHECK(v.at("k") == "10");
  RunConfig cfg;
  apply_config(cfg, v);
  CHECK(cfg.model.kind == ModelKind::Wrmf);
  CHECK(cfg.k == 10);
  CHECK(cfg.b_grid == std::vector<double>{0.05, 0.1, 0.2});
  CHECK_NOTHROW(cfg.validate());

  CHECK(thrown_code([] { parse_config_text("colour = red\n"); }) == ErrorCode::ConfigError);
  CHECK(thrown_code([] { parse_config_text("k 10\n"); }) == ErrorCode::ConfigError);
  RunConfig bad;
  CHECK(thrown_code([&] { apply_config(bad, {{"k", "-3"}}); }) == ErrorCode::ConfigError);
  CHECK(thrown_code([&] { apply_config(bad, {{"format", "xml"}}); }) == ErrorCode::ConfigError);
  CHECK(thrown_code([&] { apply_config(bad, {{"alpha", "x"}}); }) == ErrorCode::ConfigError);
}

TEST_CASE("validation ranges") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.split_ratio = 1.0;
  CHECK(thrown_code([&] { cfg.validate(); }) == ErrorCode::ConfigError);
  cfg = {};
  cfg.alpha = 0.0;
  CHECK(thrown_code([&] { cfg.validate(); }) == ErrorCode::ConfigError);
  cfg = {};
  cfg.k = 0;
  CHECK(thrown_code([&] { cfg.validate(); }) == ErrorCode::ConfigError);
}

TEST_CASE("hashes track the settings they cover") {
  RunConfig a, b;
  CHECK(data_config_hash(a) == data_config_hash(b));
  CHECK(audit_config_hash(a) == audit_config_hash(b));
  b.k = 10;
  CHECK(data_config_hash(a) == data_config_hash(b));
  CHECK(audit_config_hash(a) != audit_config_hash(b));
  b = {};
  b.preprocess.min_rating = 3;
  CHECK(data_config_hash(a) != data_config_hash(b));
  CHECK(audit_config_hash(a) != audit_config_hash(b));
  b = {};
  b.model.seed = 1;
  CHECK(audit_config_hash(a) != audit_config_hash(b));
  // Output location and the mitigation grid do not change what an audit computes.
  b = {};
  b.out_dir = "elsewhere";
  b.b_grid = {0.1};
  CHECK(audit_config_hash(a) == audit_config_hash(b));
}
