#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "recaudit/error.hpp"
#include "recaudit/metrics.hpp"
#include "support.hpp"

using namespace recaudit;
using testing::thrown_code;

namespace {

PreferenceDistribution D(std::vector<double> w) { return PreferenceDistribution(std::move(w)); }

oracle::Vec V(const PreferenceDistribution& d) { return oracle::Vec(d.begin(), d.end()); }

}  // namespace

TEST_CASE("miscalibration") {
  CHECK(miscalibration_user(D({0.3, 0.7}), D({0.3, 0.7})) == doctest::Approx(0.0).epsilon(1e-9));
  // Smoothed (1,0) vs (0.5,0.5); 40-digit oracle.
  CHECK(miscalibration_user(D({1, 0}), D({0.5, 0.5})) == doctest::Approx(0.6616681146127785654).epsilon(1e-14));
  // alpha -> 0 approaches ln 2.
  CHECK(miscalibration_user(D({1, 0}), D({0.5, 0.5}), 1e-12) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("bias and variance effects") {
  const auto p = D({0.7, 0.2, 0.1});
  const auto q = D({0.3, 0.3, 0.4});
  const auto pb = D({0.5, 0.3, 0.2});
  const auto qb = D({0.4, 0.35, 0.25});
  SUBCASE("oracle values") {
    const auto fx = effects_user(p, q, pb, qb);
    CHECK(fx.bias_effect == doctest::Approx(0.10100702450659288826).epsilon(1e-13));
    CHECK(fx.variance_effect == doctest::Approx(0.18151821697900836305).epsilon(1e-13));
  }
  SUBCASE("q_bar = p_bar cancels the bias effect") {
    CHECK(std::abs(effects_user(p, q, pb, pb).bias_effect) < 1e-15);
  }
  SUBCASE("q = q_bar cancels the variance effect") {
    CHECK(std::abs(effects_user(p, qb, pb, qb).variance_effect) < 1e-15);
  }
}

TEST_CASE("system decomposition") {
  const std::vector P = {D({0.7, 0.2, 0.1}), D({0.1, 0.6, 0.3}), D({0.2, 0.2, 0.6})};
  SUBCASE("perfect system") {
    const auto s = decompose_system(P, P);
    CHECK(s.miscalibration_mean == doctest::Approx(0.0));
    CHECK(s.bias_term == doctest::Approx(0.0));
    CHECK(s.variance_term > 0.0);  // Q_bar vs the q_u still differ
    CHECK(stereotype_system(P, P) == doctest::Approx(0.0));
  }
  SUBCASE("constant predictor at the true mean") {
    const auto pb = mean_distribution(P);
    const std::vector Q(3, pb);
    const auto s = decompose_system(P, Q);
    CHECK(s.bias_term == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.variance_term == doctest::Approx(0.0).epsilon(1e-15));
    long double mc = 0;
    for (const auto& p : P) mc += oracle::kl_s(V(p), V(pb), 0.01L);
    CHECK(s.miscalibration_mean == doctest::Approx(static_cast<double>(mc / 3)).epsilon(1e-13));
    CHECK(s.decomposition_residual == doctest::Approx(s.miscalibration_mean));
    CHECK(stereotype_system(P, Q) == doctest::Approx(1.0));
  }
  SUBCASE("errors") {
    CHECK(thrown_code([] { decompose_system({}, {}); }) == ErrorCode::EmptyInput);
    CHECK(thrown_code([&] { decompose_system(P, std::vector{P[0]}); }) == ErrorCode::LengthMismatch);
    const std::vector same(3, P[0]);
    CHECK(thrown_code([&] { stereotype_system(same, P); }) == ErrorCode::ZeroActualSpread);
  }
}

TEST_CASE("individual stereotype") {
  const auto p = D({0.9, 0.1});
  const auto half = D({0.5, 0.5});
  CHECK(stereotype_user(half, half, half, half) == 0.0);
  CHECK(stereotype_user(p, half, half, half) > 0.0);
  CHECK(stereotype_user(p, D({0.6, 0.4}), half, half) == doctest::Approx(0.40653844528400487766).epsilon(1e-13));
}

TEST_CASE("inflated diversity") {
  CHECK(inflated_diversity_user(D({0.3, 0.7}), D({0.3, 0.7})) == 0.0);
  CHECK(inflated_diversity_user(D({1, 0, 0}), D({1.0 / 3, 1.0 / 3, 1.0 / 3})) == doctest::Approx(-1.0));
  CHECK(inflated_diversity_user(D({0.25, 0.75}), D({0.5, 0.5})) ==
        doctest::Approx(0.81127812445913286391 - 1.0).epsilon(1e-13));
}

TEST_CASE("bias disparity") {
  CHECK(bias_disparity(D({0.4, 0.6}), D({0.4, 0.6}), 0) == 0.0);
  CHECK(bias_disparity(D({0.4, 0.6}), D({0.5, 0.5}), 0) == doctest::Approx(-0.25));
  CHECK(bias_disparity(D({0.4, 0.6}), D({0.2, 0.8}), 0) == doctest::Approx(0.5));
  CHECK(thrown_code([] { bias_disparity(D({0, 1}), D({0.5, 0.5}), 0); }) == ErrorCode::ZeroActualMass);
  const std::vector P = {D({0.2, 0.8}), D({0.6, 0.4})};
  const std::vector Q = {D({0.1, 0.9}), D({0.3, 0.7})};
  CHECK(bias_disparity(P, Q, 0) == doctest::Approx(0.5));
}

TEST_CASE("atypicality and diversity") {
  CHECK(atypicality_user(D({0.3, 0.7}), D({0.3, 0.7})) == 0.0);
  CHECK(atypicality_user(D({0.9, 0.1}), D({0.5, 0.5})) == doctest::Approx(0.42640280373904444573).epsilon(1e-13));
  CHECK(diversity_user(D({0.5, 0.5})) == doctest::Approx(1.0));
  CHECK(diversity_user(D({0, 1})) == 0.0);
  CHECK(diversity_user(D({0.25, 0.75})) == doctest::Approx(0.81127812445913286391).epsilon(1e-14));
}

TEST_CASE("fused audit matches the oracle on random tuples") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 17;
    const auto p = D(oracle::random_distribution(rng, n, true));
    const auto q = D(oracle::random_distribution(rng, n, true));
    const auto pb = D(oracle::random_distribution(rng, n, false));
    const auto qb = D(oracle::random_distribution(rng, n, false));
    const auto row = audit_user(p, q, pb, qb);
    const auto ref = oracle::measures(V(p), V(q), V(pb), V(qb), 0.01L);
    CHECK(row.miscalibration == doctest::Approx(static_cast<double>(ref.mc)).epsilon(1e-11));
    CHECK(std::abs(row.bias_effect - static_cast<double>(ref.be)) < 1e-11);
    CHECK(std::abs(row.variance_effect - static_cast<double>(ref.ve)) < 1e-11);
    CHECK(std::abs(row.stereotype - static_cast<double>(ref.st)) < 1e-11);
    CHECK(std::abs(row.inflated_diversity - static_cast<double>(ref.idv)) < 1e-12);
    CHECK(std::abs(row.atypicality - static_cast<double>(ref.at)) < 1e-11);
    CHECK(std::abs(row.diversity - static_cast<double>(ref.dv)) < 1e-12);
    // Per-user identity: BE + VE = KL(p||q) - KL(p||p_bar).
    CHECK(std::abs(row.bias_effect + row.variance_effect -
                   (row.miscalibration - static_cast<double>(oracle::kl_s(V(p), V(pb), 0.01L)))) < 1e-11);
  }
}
