#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "testutil.hpp"
#include "wishratio/errors.hpp"
#include "wishratio/series.hpp"

using namespace wishratio::mhg;
using wishratio::parameter_error;

namespace {
double transformed_value(const KummerTransform& t, int max_degree = 300,
                         double series_error = 1e-13) {
  return pfq_truncated(t.params, t.argument, max_degree, series_error).value;
}
}  // namespace

TEST_CASE("value is 1 at the origin") {
  HyperParams p{{1.3, 0.7}, {2.9}};
  std::vector<double> x = {0.0, 0.0, 0.0};
  const auto r = pfq_truncated(p, x);
  CHECK(r.value == 1.0);
  CHECK(r.converged);
}

TEST_CASE("scalar log identity 2F1(1,1;2;z) = -ln(1-z)/z") {
  HyperParams p{{1.0, 1.0}, {2.0}};
  std::vector<double> x = {0.5};
  const auto r = pfq_truncated(p, x, 400, 1e-14);
  CHECK(r.value == doctest::Approx(1.3862943611198906).epsilon(1e-10));
  CHECK(r.converged);
}

TEST_CASE("m=1 agrees with the classical scalar series") {
  auto rng = testutil::rng(5);
  std::uniform_real_distribution<double> par(0.4, 3.5);
  std::uniform_real_distribution<double> arg(-0.5, 0.5);
  for (int trial = 0; trial < 25; ++trial) {
    const double a = par(rng), b = par(rng), c = par(rng) + 0.6;
    const double z = arg(rng);
    std::vector<double> x = {z};
    const auto r = pfq_truncated({{a, b}, {c}}, x, 500, 1e-14);
    const double ref = testutil::scalar_2f1(a, b, c, z);
    CHECK(std::abs(r.value - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("non-positive integer numerator parameter terminates the series") {
  HyperParams p{{-2.0, 1.7}, {3.2}};
  std::vector<double> x = {0.6, 0.35};
  const auto r = pfq_truncated(p, x, 200, 1e-15);
  CHECK(r.converged);
  CHECK(r.truncation_degree == 4);  // (-a) * m
  // Beyond the bound nothing changes.
  const auto r2 = pfq_truncated(p, x, 60, 1e-15);
  CHECK(r.value == r2.value);
  // A cap below the bound reports non-convergence at the relative rule...
  const auto r3 = pfq_truncated(p, x, 2, 1e-15);
  CHECK(r3.truncation_degree == 2);
}

TEST_CASE("derivative vector at zero argument") {
  HyperParams p{{1.1, 2.3}, {3.7}};
  std::vector<double> x = {0.0, 0.0};
  const auto d = pfq_with_derivs(p, x);
  CHECK(d.partials[0] == 1.0);
  const double expect = 1.1 * 2.3 / 3.7;
  CHECK(d.partials[1] == doctest::Approx(expect).epsilon(1e-14));
  CHECK(d.partials[2] == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("derivatives match central finite differences") {
  HyperParams p{{1.1, 2.3}, {3.7}};
  std::vector<double> x = {0.22, 0.13};
  const auto d = pfq_with_derivs(p, x, 200, 1e-13);
  const double h = 1e-5;

  auto value_at = [&](std::vector<double> pt) {
    return pfq_truncated(p, pt, 200, 1e-13).value;
  };
  for (int j = 0; j < 2; ++j) {
    auto xp = x, xm = x;
    xp[static_cast<size_t>(j)] += h;
    xm[static_cast<size_t>(j)] -= h;
    const double fd = (value_at(xp) - value_at(xm)) / (2.0 * h);
    CHECK(std::abs(d.partials[size_t{1} << j] - fd) <=
          1e-5 * std::max(1.0, std::abs(fd)));
  }
  // Mixed partial via nested differences.
  auto xpp = x, xpm = x, xmp = x, xmm = x;
  xpp[0] += h; xpp[1] += h;
  xpm[0] += h; xpm[1] -= h;
  xmp[0] -= h; xmp[1] += h;
  xmm[0] -= h; xmm[1] -= h;
  const double fd12 =
      (value_at(xpp) - value_at(xpm) - value_at(xmp) + value_at(xmm)) / (4.0 * h * h);
  CHECK(std::abs(d.partials[3] - fd12) <= 1e-4 * std::max(1.0, std::abs(fd12)));
}

TEST_CASE("derivative entry for the empty subset equals the plain value bit for bit") {
  HyperParams p{{2.0, 7.5}, {4.5}};
  std::vector<double> x = {0.31, 0.18, 0.07};
  const auto v = pfq_truncated(p, x);
  const auto d = pfq_with_derivs(p, x);
  CHECK(d.partials[0] == v.value);
  CHECK(d.series.truncation_degree == v.truncation_degree);
}

TEST_CASE("permutation symmetry of the value is exact") {
  HyperParams p{{2.0, 7.5}, {4.5}};
  std::vector<double> x = {0.31, 0.18, 0.07};
  std::vector<double> perm = {0.07, 0.31, 0.18};
  CHECK(pfq_truncated(p, x).value == pfq_truncated(p, perm).value);
  // And the derivative entries permute with the coordinates.
  const auto dx = pfq_with_derivs(p, x);
  const auto dp = pfq_with_derivs(p, perm);
  CHECK(dx.partials[0b001] == dp.partials[0b010]);  // x1 -> slot 2
  CHECK(dx.partials[0b010] == dp.partials[0b100]);  // x2 -> slot 3
  CHECK(dx.partials[0b100] == dp.partials[0b001]);  // x3 -> slot 1
  CHECK(dx.partials[0b011] == dp.partials[0b110]);
}

TEST_CASE("partial sums are monotone for a non-negative-term parameter set") {
  // Parameters of the positive series form with m = 2, n1 = 5, n2 = 7.
  HyperParams p{{1.5, 6.0}, {4.0}};
  std::vector<double> x = {0.55, 0.2};
  const auto r = pfq_truncated(p, x, 150, 1e-12);
  for (size_t i = 1; i < r.partial_sums_by_degree.size(); ++i)
    CHECK(r.partial_sums_by_degree[i] >= r.partial_sums_by_degree[i - 1]);
}

TEST_CASE("denominator poles are rejected") {
  std::vector<double> x = {0.1, 0.1};
  CHECK_THROWS_AS(pfq_truncated({{1.0}, {0.5}}, x), parameter_error);   // row 2
  std::vector<double> x3 = {0.1, 0.1, 0.1};
  CHECK_THROWS_AS(pfq_truncated({{1.0}, {1.0}}, x3), parameter_error);  // row 3
  CHECK_NOTHROW(pfq_truncated({{1.0}, {0.75}}, x));
  CHECK_THROWS_AS(pfq_truncated({{1.0}, {-2.0}}, x), parameter_error);
}

TEST_CASE("Euler-type transform holds under series evaluation") {
  auto rng = testutil::rng(31);
  std::uniform_real_distribution<double> par(0.5, 4.0);
  std::uniform_real_distribution<double> cpar(2.6, 8.0);
  std::uniform_real_distribution<double> arg(0.02, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = par(rng), b = par(rng), c = cpar(rng);
    std::vector<double> x = {arg(rng), arg(rng)};
    const double lhs = pfq_truncated({{a, b}, {c}}, x, 300, 1e-13).value;
    const auto t = kummer_transform_1(a, b, c, x);
    double pref = 1.0;
    for (double v : x) pref *= std::pow(1.0 - v, t.det_power);
    const double rhs = pref * transformed_value(t);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("Euler-type transform with a+b=c collapses the prefactor") {
  const double a = 1.2, b = 2.2, c = a + b;
  std::vector<double> x = {0.15, 0.22};
  const auto t = kummer_transform_1(a, b, c, x);
  CHECK(t.det_power == doctest::Approx(0.0));
  CHECK(t.params.numerator[0] == doctest::Approx(c - a));
  const double lhs = pfq_truncated({{a, b}, {c}}, x, 300, 1e-13).value;
  CHECK(std::abs(lhs - transformed_value(t)) <= 1e-8 * lhs);
}

TEST_CASE("Pfaff-type transform holds on both sides of zero") {
  auto rng = testutil::rng(37);
  std::uniform_real_distribution<double> par(0.5, 4.0);
  std::uniform_real_distribution<double> cpar(2.6, 8.0);
  std::uniform_real_distribution<double> arg(0.02, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = par(rng), b = par(rng), c = cpar(rng);
    for (double sign : {1.0, -1.0}) {
      std::vector<double> x = {sign * arg(rng), sign * arg(rng)};
      const double lhs = pfq_truncated({{a, b}, {c}}, x, 300, 1e-13).value;
      const auto t = kummer_transform_2(a, b, c, x);
      double pref = 1.0;
      for (double v : x) pref *= std::pow(1.0 - v, t.det_power);
      const double rhs = pref * transformed_value(t);
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("transforms at x = 0 are the identity") {
  std::vector<double> x = {0.0, 0.0};
  const auto t1 = kummer_transform_1(1.3, 0.9, 3.1, x);
  const auto t2 = kummer_transform_2(1.3, 0.9, 3.1, x);
  CHECK(transformed_value(t1) == 1.0);
  CHECK(transformed_value(t2) == 1.0);
}

TEST_CASE("transforms reject arguments at or beyond 1") {
  std::vector<double> x = {0.5, 1.0};
  CHECK_THROWS_AS(kummer_transform_1(1.0, 1.0, 3.0, x), parameter_error);
  CHECK_THROWS_AS(kummer_transform_2(1.0, 1.0, 3.0, x), parameter_error);
}

TEST_CASE("transform chain: alternating form to positive form to finite form") {
  // Max-root parameter set with m = 2, n1 = 5, n2 = 7 at argument
  // X = diag(-x/beta_i): the Pfaff transform produces the non-negative form
  // with argument x/(beta_i+x); the Euler transform then yields the form that
  // terminates when (n2-m-1)/2 is a non-negative integer.
  const int m = 2;
  const double n1 = 5.0, n2 = 7.0, xq = 0.8;
  const double a = 0.5 * n1, b = 0.5 * (n1 + n2), c = 0.5 * (n1 + m + 1);
  std::vector<double> beta = {1.0, 2.5};
  std::vector<double> X(beta.size());
  for (size_t i = 0; i < beta.size(); ++i) X[i] = -xq / beta[i];

  const double direct = pfq_truncated({{a, b}, {c}}, X, 400, 1e-14).value;

  const auto pfaff = kummer_transform_2(a, b, c, X);
  for (size_t i = 0; i < beta.size(); ++i)
    CHECK(pfaff.argument[i] == doctest::Approx(xq / (beta[i] + xq)).epsilon(1e-15));
  CHECK(pfaff.params.numerator[0] == doctest::Approx(0.5 * (m + 1)));
  double pref1 = 1.0;
  for (double v : X) pref1 *= std::pow(1.0 - v, pfaff.det_power);
  const double positive_form = pref1 * transformed_value(pfaff, 400, 1e-14);
  CHECK(std::abs(direct - positive_form) <= 1e-9 * std::abs(direct));

  const auto euler = kummer_transform_1(pfaff.params.numerator[0],
                                        pfaff.params.numerator[1],
                                        pfaff.params.denominator[0],
                                        pfaff.argument);
  CHECK(euler.params.numerator[0] == doctest::Approx(0.5 * n1));
  CHECK(euler.params.numerator[1] == doctest::Approx(0.5 * (m + 1) - 0.5 * n2));
  const auto fin = pfq_truncated(euler.params, euler.argument, 400, 1e-14);
  CHECK(fin.converged);
  CHECK(fin.truncation_degree == 2 * m);  // r = (n2-m-1)/2 = 2
  double pref2 = 1.0;
  for (double v : pfaff.argument) pref2 *= std::pow(1.0 - v, euler.det_power);
  const double finite_form = pref1 * pref2 * fin.value;
  CHECK(std::abs(direct - finite_form) <= 1e-9 * std::abs(direct));
}
