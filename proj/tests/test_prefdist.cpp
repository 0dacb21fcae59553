#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "recaudit/error.hpp"
#include "recaudit/prefdist.hpp"
#include "support.hpp"

using namespace recaudit;
using testing::thrown_code;

namespace {
PreferenceDistribution D(std::vector<double> w) { return PreferenceDistribution(std::move(w)); }
}  // namespace

TEST_CASE("normalize") {
  CHECK(normalize(std::vector<double>{2, 2}) == D({0.5, 0.5}));
  CHECK(normalize(std::vector<double>{1, 0, 0, 0}) == D({1, 0, 0, 0}));
  auto d = normalize(std::vector<double>{1, 3});
  CHECK(d[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d[1] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(thrown_code([] { normalize(std::vector<double>{0, 0}); }) == ErrorCode::AllZero);
  CHECK(thrown_code([] { normalize(std::vector<double>{1, -0.5}); }) == ErrorCode::NegativeWeight);
  CHECK(thrown_code([] { normalize(std::vector<double>{}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("validating constructor") {
  CHECK(thrown_code([] { D({0.5, 0.4}); }) == ErrorCode::InvalidDistribution);
  CHECK(thrown_code([] { D({1.2, -0.2}); }).has_value());
  CHECK_NOTHROW(D({0.3, 0.7}));
}

TEST_CASE("smooth") {
  CHECK(smooth(D({0.25, 0.25, 0.25, 0.25}), 0.01) == D({0.25, 0.25, 0.25, 0.25}));
  auto s = smooth(D({1, 0}), 0.01);
  CHECK(s[0] == doctest::Approx(0.995).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(0.005).epsilon(1e-15));
  auto h = smooth(D({0.5, 0.5}), 0.5);
  CHECK(h[0] == doctest::Approx(0.5));
  CHECK(thrown_code([] { smooth(D({1, 0}), 0.0); }) == ErrorCode::InvalidAlpha);
  CHECK(thrown_code([] { smooth(D({1, 0}), 1.0); }) == ErrorCode::InvalidAlpha);
}

TEST_CASE("kl divergence") {
  CHECK(kl_divergence(D({0.3, 0.7}), D({0.3, 0.7})) == 0.0);
  // Oracle values from 40-digit term-by-term summation.
  CHECK(kl_divergence(D({0.5, 0.5}), D({0.25, 0.75})) == doctest::Approx(0.14384103622589046372).epsilon(1e-14));
  CHECK(kl_divergence(D({1, 0}), D({0.5, 0.5})) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(thrown_code([] { kl_divergence(D({0.5, 0.5}), D({1, 0})); }) == ErrorCode::ZeroInQ);
  CHECK(thrown_code([] { kl_divergence(D({0.5, 0.5}), D({0.2, 0.3, 0.5})); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("symmetrized divergence") {
  CHECK(js_divergence(D({0.25, 0.25, 0.25, 0.25}), D({0.25, 0.25, 0.25, 0.25})) == 0.0);
  CHECK(js_divergence(D({0.5, 0.5}), D({0.25, 0.75})) == doctest::Approx(0.13732653608351371142).epsilon(1e-14));
}

TEST_CASE("mean distribution") {
  CHECK(mean_distribution(std::vector{D({1, 0}), D({0, 1})}) == D({0.5, 0.5}));
  CHECK(mean_distribution(std::vector{D({0.2, 0.8})}) == D({0.2, 0.8}));
  auto m = mean_distribution(std::vector{D({0.1, 0.9}), D({0.3, 0.7}), D({0.5, 0.5})});
  CHECK(m[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(m[1] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(thrown_code([] { mean_distribution(std::vector<PreferenceDistribution>{}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("normalized entropy") {
  for (std::size_t c = 2; c <= 18; ++c) {
    CHECK(entropy_normalized(PreferenceDistribution(std::vector<double>(c, 1.0 / c))) == doctest::Approx(1.0));
  }
  CHECK(entropy_normalized(D({0, 1, 0})) == 0.0);
  CHECK(entropy_normalized(D({0.25, 0.75})) == doctest::Approx(0.81127812445913286391).epsilon(1e-14));
  CHECK(thrown_code([] { entropy_normalized(D({1})); }) == ErrorCode::SingleCategory);
}

TEST_CASE("properties on random distributions") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + trial % 17;
    const auto p = smooth(D(oracle::random_distribution(rng, n, true)));
    const auto q = smooth(D(oracle::random_distribution(rng, n, true)));
    const double kpq = kl_divergence(p, q);
    CHECK(kpq >= 0.0);
    CHECK(kpq == doctest::Approx(static_cast<double>(oracle::kl(oracle::widen({p.begin(), p.end()}),
                                                                oracle::widen({q.begin(), q.end()}))))
                     .epsilon(1e-12));
    CHECK(js_divergence(p, q) == js_divergence(q, p));
    const double h = entropy_normalized(p);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
    double s = 0.0;
    for (double w : p) s += w;
    CHECK(std::abs(s - 1.0) < kSumTolerance);
  }
}
