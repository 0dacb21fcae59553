#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "recaudit/error.hpp"
#include "recaudit/stats.hpp"
#include "support.hpp"

using namespace recaudit;
using testing::thrown_code;

namespace {

double boost_two_sided(double t, double df) {
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

TEST_CASE("summary uses the sample standard deviation") {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = summarize(v);
  CHECK(s.count == 8);
  CHECK(s.mean == doctest::Approx(5.0));
  CHECK(s.stddev == doctest::Approx(std::sqrt(32.0 / 7.0)));
}

TEST_CASE("incomplete beta against closed forms") {
  // I_x(1, b) = 1 - (1 - x)^b and I_x(a, 1) = x^a.
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    CHECK(regularized_incomplete_beta(1.0, 3.0, x) == doctest::Approx(1.0 - std::pow(1.0 - x, 3.0)).epsilon(1e-13));
    CHECK(regularized_incomplete_beta(2.5, 1.0, x) == doctest::Approx(std::pow(x, 2.5)).epsilon(1e-13));
  }
}

TEST_CASE("Student t tail matches Boost.Math") {
  for (double df : {1.0, 2.5, 7.0, 30.0, 211.3, 5000.0}) {
    for (double t : {0.0, 0.3, 1.0, 1.96, 3.5, 8.0}) {
      CHECK(student_t_two_sided(t, df) == doctest::Approx(boost_two_sided(t, df)).epsilon(1e-10));
      CHECK(student_t_two_sided(-t, df) == student_t_two_sided(t, df));
    }
  }
}

TEST_CASE("Welch test") {
  SUBCASE("identical groups") {
    const std::vector<double> a = {0.1, 0.4, 0.2, 0.9};
    const auto r = welch_t_test(a, a);
    CHECK(r.t == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0));
  }
  SUBCASE("constant groups with different means") {
    const std::vector<double> a = {0, 0, 0, 0};
    const std::vector<double> b = {1, 1, 1, 1};
    const auto r = welch_t_test(a, b);
    CHECK(std::isinf(r.t));
    CHECK(r.t < 0);
    CHECK(r.p_value < 0.01);
  }
  SUBCASE("hand computed case") {
    // means 2 and 5, variances 1 and 4, n = 3 and 4:
    // se^2 = 1/3 + 1 = 4/3, t = -3 / sqrt(4/3), df = (4/3)^2 / ((1/3)^2/2 + 1/3).
    const std::vector<double> a = {1, 2, 3};
    const std::vector<double> b = {2, 4, 6, 8};
    const auto r = welch_t_test(a, b);
    const double b_var = (9.0 + 1.0 + 1.0 + 9.0) / 3.0;  // 20/3
    const double se2 = 1.0 / 3.0 + b_var / 4.0;
    const double df = se2 * se2 / ((1.0 / 9.0) / 2.0 + (b_var / 4.0) * (b_var / 4.0) / 3.0);
    CHECK(r.t == doctest::Approx(-3.0 / std::sqrt(se2)).epsilon(1e-14));
    CHECK(r.df == doctest::Approx(df).epsilon(1e-14));
    CHECK(r.p_value == doctest::Approx(boost_two_sided(r.t, df)).epsilon(1e-10));
  }
  SUBCASE("antisymmetric in the groups") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> a(17), b(23);
    for (auto& x : a) x = n(rng);
    for (auto& x : b) x = n(rng) + 0.4;
    const auto ab = welch_t_test(a, b);
    const auto ba = welch_t_test(b, a);
    CHECK(ab.t == -ba.t);
    CHECK(ab.df == ba.df);
    CHECK(ab.p_value == ba.p_value);
    CHECK(ab.p_value == doctest::Approx(boost_two_sided(ab.t, ab.df)).epsilon(1e-10));
  }
  SUBCASE("degenerate groups") {
    const std::vector<double> one = {1.0};
    const std::vector<double> two = {1.0, 2.0};
    CHECK(thrown_code([&] { welch_t_test(one, two); }) == ErrorCode::DegenerateGroup);
    CHECK(thrown_code([&] { welch_t_test(two, one); }) == ErrorCode::DegenerateGroup);
  }
}
