#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "recaudit/error.hpp"
#include "recaudit/recsys.hpp"
#include "support.hpp"

using namespace recaudit;
using testing::thrown_code;

namespace {

using Pairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

// Users 0-2 share items 0-2; user 3 consumed 3-4 only.
TrainingMatrix small_matrix() {
  const Pairs pairs = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 3}, {3, 4}};
  return TrainingMatrix::from_pairs(4, 6, pairs);
}

bool ranked_properly(const TopKList& l) {
  for (std::size_t r = 1; r < l.items.size(); ++r) {
    const auto& a = l.items[r - 1];
    const auto& b = l.items[r];
    if (a.score < b.score || (a.score == b.score && a.item > b.item)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("training matrix") {
  const Pairs pairs = {{0, 2}, {0, 2}, {1, 0}, {0, 1}};
  const auto m = TrainingMatrix::from_pairs(2, 3, pairs);
  CHECK(m.nnz() == 3);
  CHECK(m.items_of(0).size() == 2);
  CHECK(m.item_counts_of(0)[1] == 2.0);  // duplicated row counts twice
  CHECK(m.has(0, 2));
  CHECK(!m.has(1, 2));
  CHECK(m.users_of(2).size() == 1);
  CHECK(m.user_counts_of(2)[0] == 2.0);
}

TEST_CASE("model config") {
  ModelConfig c;
  CHECK_NOTHROW(c.validate());
  c.kind = ModelKind::Bpr;
  c.factors = 0;
  CHECK(thrown_code([&] { c.validate(); }) == ErrorCode::ConfigError);
  c.factors = 8;
  c.learning_rate = 0.125;
  CHECK(ModelConfig::deserialize(c.serialize()) == c);
  for (auto k : {ModelKind::UserKnn, ModelKind::ItemKnn, ModelKind::Bpr, ModelKind::Wrmf, ModelKind::IdentityOracle}) {
    CHECK(parse_model_kind(to_string(k)) == k);
  }
  CHECK(thrown_code([] { parse_model_kind("neumf"); }) == ErrorCode::ConfigError);
}

TEST_CASE("select_topk ordering and exclusions") {
  const std::vector<double> scores = {0.5, 0.9, 0.5, 0.1, 0.9};
  const std::vector<ItemId> ids = {10, 11, 12, 13, 14};
  const std::vector<std::uint32_t> seen = {1};
  const auto l = select_topk(7, scores, ids, seen, 3);
  REQUIRE(l.items.size() == 3);
  CHECK(l.items[0].item == 14);
  CHECK(l.items[1].item == 10);  // tie at 0.5 broken by id
  CHECK(l.items[2].item == 12);
  CHECK(!l.truncated);
  const auto all = select_topk(7, scores, ids, seen, 10);
  CHECK(all.items.size() == 4);
  CHECK(all.truncated);
}

TEST_CASE("UserKNN") {
  ModelConfig cfg;
  cfg.k_neighbors = 2;
  const auto model = train_userknn(small_matrix(), cfg);
  // User 0 = {0,1}; neighbors 1 {0,1,2} and 2 {1,2}. Item 2 scores sim(0,1) + sim(0,2).
  const double s01 = 2.0 / (std::sqrt(2.0) * std::sqrt(3.0));
  const double s02 = 1.0 / 2.0;
  std::vector<double> scores(6);
  model.score_user(0, scores);
  CHECK(scores[2] == doctest::Approx(s01 + s02));
  CHECK(scores[3] == 0.0);
  const auto l = recommend_topk(model, 0, 2);
  CHECK(l.items[0].item == 2);
  CHECK(ranked_properly(l));
  // Seen items never come back.
  for (const auto& s : l.items) CHECK((s.item != 0 && s.item != 1));
  CHECK(thrown_code([&] { recommend_topk(model, 99, 2); }) == ErrorCode::UnknownUser);
  CHECK(thrown_code([&] { recommend_topk(model, 0, 0); }) == ErrorCode::ConfigError);
}

TEST_CASE("ItemKNN") {
  ModelConfig cfg;
  cfg.kind = ModelKind::ItemKnn;
  cfg.k_neighbors = 5;
  const auto model = train_itemknn(small_matrix(), cfg);
  std::vector<double> scores(6);
  model.score_user(2, scores);  // user 2 = {1, 2}
  // Item 0 is co-consumed with 1 (users 0,1) and 2 (user 1).
  const double s01 = 2.0 / (std::sqrt(2.0) * std::sqrt(3.0));
  const double s02 = 1.0 / (std::sqrt(2.0) * std::sqrt(2.0));
  CHECK(scores[0] == doctest::Approx(s01 + s02));
  CHECK(scores[3] == 0.0);
  CHECK(recommend_topk(model, 2, 1).items[0].item == 0);
}

TEST_CASE("BPR is seeded and learns") {
  const auto split = testing::load_toy_split();
  const auto train = TrainingMatrix::build(split.users, split.catalog, split.train);
  ModelConfig cfg;
  cfg.kind = ModelKind::Bpr;
  cfg.factors = 16;
  cfg.epochs = 10;
  const auto a = train_bpr(train, cfg);
  const auto b = train_bpr(train, cfg);
  CHECK(std::equal(a.user_factors().begin(), a.user_factors().end(), b.user_factors().begin()));
  CHECK(std::equal(a.item_bias().begin(), a.item_bias().end(), b.item_bias().begin()));
  cfg.seed = 43;
  const auto c = train_bpr(train, cfg);
  CHECK(!std::equal(a.user_factors().begin(), a.user_factors().end(), c.user_factors().begin()));

  // Observed items outrank unobserved ones on average.
  double pos = 0, neg = 0;
  std::size_t npos = 0, nneg = 0;
  std::vector<double> s(train.item_count());
  for (std::size_t u = 0; u < train.user_count(); ++u) {
    a.score_user(u, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (train.has(u, i)) {
        pos += s[i];
        ++npos;
      } else {
        neg += s[i];
        ++nneg;
      }
    }
  }
  CHECK(pos / npos > neg / nneg);

  cfg.learning_rate = 1e200;
  CHECK(thrown_code([&] { train_bpr(train, cfg); }) == ErrorCode::DivergedTraining);
}

TEST_CASE("WRMF objective never increases") {
  const auto split = testing::load_toy_split();
  const auto train = TrainingMatrix::build(split.users, split.catalog, split.train);
  ModelConfig cfg;
  cfg.kind = ModelKind::Wrmf;
  cfg.factors = 8;
  cfg.iterations = 6;
  const auto m = train_wrmf(train, cfg);
  const auto trace = m.objective_trace();
  REQUIRE(trace.size() == 7);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] * (1 + 1e-12));
  const auto serial = train_wrmf(train, cfg, Exec::Serial);
  CHECK(std::equal(m.user_factors().begin(), m.user_factors().end(), serial.user_factors().begin()));
}

TEST_CASE("identity oracle reproduces the training mix") {
  const auto split = testing::load_toy_split();
  ModelConfig cfg;
  cfg.kind = ModelKind::IdentityOracle;
  const auto model = train_model(split, cfg);
  const auto p = actual_preferences(split);
  for (std::size_t u = 0; u < split.users.size(); ++u) {
    const auto l = recommend_topk(*model, split.users[u].id, 20);
    REQUIRE(l.items.size() == 20);
    CHECK(ranked_properly(l));
    const auto q = predicted_preference(l, split.catalog);
    for (std::size_t c = 0; c < q.size(); ++c) CHECK(std::abs(q[c] - p[u][c]) < 1e-12);
  }
}

TEST_CASE("predicted preference") {
  const ItemCatalog catalog({"A", "B"}, {1, 2, 3}, {1, 0, 0, 1, 0.5, 0.5});
  TopKList l;
  l.items = {{1, 3.0}, {3, 2.0}};
  const auto q = predicted_preference(l, catalog);
  CHECK(q[0] == doctest::Approx(0.75));
  l.items.clear();
  CHECK(thrown_code([&] { predicted_preference(l, catalog); }) == ErrorCode::EmptyList);
}
