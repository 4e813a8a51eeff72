#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "testutil.hpp"
#include "wishratio/dist.hpp"
#include "wishratio/errors.hpp"
#include "wishratio/hgm.hpp"

using namespace wishratio;
using namespace wishratio::dist;

TEST_CASE("log multivariate gamma") {
  CHECK(log_multigamma(1, 2.7) == doctest::Approx(std::lgamma(2.7)).epsilon(1e-15));
  // Gamma_2(3/2) = sqrt(pi) Gamma(3/2) Gamma(1) = pi/2.
  CHECK(log_multigamma(2, 1.5) ==
        doctest::Approx(std::log(M_PI / 2.0)).epsilon(1e-14));
  // Recurrence Gamma_m(a) = pi^{(m-1)/2} Gamma(a - (m-1)/2) Gamma_{m-1}(a).
  for (int m = 2; m <= 5; ++m) {
    const double a = 0.5 * (m - 1) + 1.7;
    const double lhs = log_multigamma(m, a);
    const double rhs = 0.5 * (m - 1) * std::log(M_PI) +
                       std::lgamma(a - 0.5 * (m - 1)) + log_multigamma(m - 1, a);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }
  CHECK_THROWS_AS(log_multigamma(3, 1.0), parameter_error);
}

TEST_CASE("ratio density: scalar closed form and normalization") {
  const ProblemSpec spec{1, 2.0, 2.0, {1.0}};
  const auto sigma2 = SpdMatrix::identity(1);
  auto density = [&](double u) {
    auto U = SpdMatrix(1);
    U.set(0, 0, u);
    return ratio_density(spec, U, sigma2);
  };
  for (double u : {0.3, 1.0, 4.0})
    CHECK(density(u) == doctest::Approx(std::pow(1.0 + u, -2.0)).epsilon(1e-12));
  // Quadrature over (0, inf) via the substitution u = t/(1-t).
  const double total = testutil::integrate(
      [&](double t) {
        const double u = t / (1.0 - t);
        return density(u) / ((1.0 - t) * (1.0 - t));
      },
      1e-12, 1.0 - 1e-12, 1e-9);
  CHECK(std::abs(total - 1.0) <= 1e-6);
}

TEST_CASE("ratio density is invariant under simultaneous orthogonal conjugation") {
  const ProblemSpec spec{3, 7.0, 9.0, {1.0, 1.0, 1.0}};
  Eigen::MatrixXd u0(3, 3), s0(3, 3);
  u0 << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.1;
  s0 << 1.4, 0.2, 0.0, 0.2, 2.2, 0.5, 0.0, 0.5, 0.9;
  Eigen::MatrixXd rnd = Eigen::MatrixXd::Random(3, 3);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(rnd).householderQ();
  const Eigen::MatrixXd u1 = Q * u0 * Q.transpose();
  const Eigen::MatrixXd s1 = Q * s0 * Q.transpose();

  auto pack = [](const Eigen::MatrixXd& a) {
    std::vector<double> v(a.data(), a.data() + a.size());
    return SpdMatrix::from_rowmajor(static_cast<int>(a.rows()), v);
  };
  const double d0 = ratio_density(spec, pack(u0), pack(s0));
  const double d1 = ratio_density(spec, pack(u1), pack(s1));
  CHECK(d0 == doctest::Approx(d1).epsilon(1e-11));
}

TEST_CASE("ratio cdf series: limits, quadrature oracle, and the xI specialization") {
  const ProblemSpec spec{1, 3.0, 5.0, {1.0}};
  const auto sigma2 = SpdMatrix::identity(1);

  auto omega = [](double w) {
    SpdMatrix o(1);
    o.set(0, 0, w);
    return o;
  };
  CHECK(ratio_cdf_series(spec, omega(1e-9), sigma2).value ==
        doctest::Approx(0.0).epsilon(1e-10));

  // m=1: P(U <= w) by quadrature of the density.
  const double w = 0.8;
  const double by_series = ratio_cdf_series(spec, omega(w), sigma2).value;
  const double by_quad = testutil::integrate(
      [&](double u) {
        SpdMatrix U(1);
        U.set(0, 0, u);
        return ratio_density(spec, U, sigma2);
      },
      1e-12, w, 1e-10);
  CHECK(std::abs(by_series - by_quad) <= 1e-7);

  // Omega = xI reproduces the largest-root CDF.
  const ProblemSpec spec2{2, 5.0, 7.0, {1.0, 1.0}};
  const double x = 0.45;
  const auto r = ratio_cdf_series(spec2, SpdMatrix::diagonal(std::vector<double>{x, x}),
                                  SpdMatrix::identity(2));
  CHECK(r.converged);
  CHECK(r.value ==
        doctest::Approx(max_root_cdf(spec2, x, CdfMethod::series)).epsilon(1e-8));
}

TEST_CASE("ratio cdf series respects the eigenvalue-only dependence") {
  // Similarity transforms of (Omega, Sigma2) preserving eig(Sigma2 Omega)
  // leave the value unchanged: conjugate both by an orthogonal matrix.
  const ProblemSpec spec{2, 6.0, 8.0, {1.0, 1.0}};
  Eigen::MatrixXd om(2, 2), s2(2, 2);
  om << 0.5, 0.1, 0.1, 0.3;
  s2 << 1.2, -0.2, -0.2, 0.8;
  Eigen::MatrixXd rnd = Eigen::MatrixXd::Random(2, 2);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(rnd).householderQ();
  auto pack = [](const Eigen::MatrixXd& a) {
    std::vector<double> v(a.data(), a.data() + a.size());
    return SpdMatrix::from_rowmajor(static_cast<int>(a.rows()), v);
  };
  const double v0 = ratio_cdf_series(spec, pack(om), pack(s2)).value;
  const double v1 = ratio_cdf_series(spec, pack(Q * om * Q.transpose()),
                                     pack(Q * s2 * Q.transpose()))
                        .value;
  CHECK(v0 == doctest::Approx(v1).epsilon(1e-10));
}

TEST_CASE("max root cdf: small-x limit and the printed null polynomial value") {
  const ProblemSpec null3{3, 6.0, 10.0, {1.0, 1.0, 1.0}};
  CHECK(max_root_cdf(null3, 1e-4, CdfMethod::series) < 1e-10);
  // Frozen evaluation of the degree-9 null polynomial at x = 1.
  CHECK(max_root_cdf(null3, 1.0, CdfMethod::series) ==
        doctest::Approx(0.17198181152343750).epsilon(1e-12));
  CHECK(max_root_cdf(null3, 1.0, CdfMethod::auto_select) ==
        doctest::Approx(0.17198181152343750).epsilon(1e-12));
  // Tied beta with the hgm method must refuse.
  CHECK_THROWS_AS(max_root_cdf(null3, 1.0, CdfMethod::hgm), singularity_error);
}

TEST_CASE("max root cdf: series and hgm agree off the null case") {
  const ProblemSpec spec{2, 5.5, 8.5, {0.9, 2.1}};
  for (double x : {0.6, 1.0, 1.4}) {
    const double s = max_root_cdf(spec, x, CdfMethod::series);
    const double h = max_root_cdf(spec, x, CdfMethod::hgm);
    CHECK(std::abs(s - h) <= 1e-6);
  }
}

TEST_CASE("min root upper probability") {
  // m=1: the smallest root is the largest root, so the upper probability is
  // one minus the CDF.
  const ProblemSpec spec1{1, 3.0, 4.0, {1.7}};
  for (double x : {0.5, 1.0, 3.0}) {
    const double up = min_root_upper(spec1, x);
    const double cdf = max_root_cdf(spec1, x, CdfMethod::series,
                                    IntegratorConfig{.series_error = 1e-12});
    CHECK(up + cdf == doctest::Approx(1.0).epsilon(1e-7));
  }
  // x -> 0+: the smallest root is positive almost surely.
  const ProblemSpec spec2{2, 5.0, 7.0, {1.0, 2.0}};
  CHECK(min_root_upper(spec2, 1e-4) == doctest::Approx(1.0).epsilon(1e-6));
  // Duality with the swapped problem.
  const double x = 0.8;
  CHECK(min_root_upper(spec2, x) ==
        max_root_cdf(spec2.swapped(), 1.0 / x, CdfMethod::auto_select, {}));
}

TEST_CASE("null closed form: limits and the scalar F-distribution check") {
  CHECK(null_constantine(3, 6.0, 10.0, 0.0) == 0.0);
  // m=1, non-terminating parameters: compare with quadrature of the scalar
  // density  c u^{n1/2-1} (1+u)^{-(n1+n2)/2}.
  const double n1 = 3.0, n2 = 5.0;
  const double logc = std::lgamma(0.5 * (n1 + n2)) - std::lgamma(0.5 * n1) -
                      std::lgamma(0.5 * n2);
  for (double x : {0.4, 1.3, 3.0}) {
    const double quad = testutil::integrate(
        [&](double u) {
          return std::exp(logc + (0.5 * n1 - 1.0) * std::log(u) -
                          0.5 * (n1 + n2) * std::log1p(u));
        },
        1e-13, x, 1e-10);
    CHECK(std::abs(null_constantine(1, n1, n2, x) - quad) <= 1e-7);
  }
}

TEST_CASE("finite null series: the printed coefficient sequence is exact") {
  const auto a = venables_coefficients(3, 6, 10);
  const std::vector<double> expect = {1, 9, 45, 165, 360, 531, 539, 330, 135, 30};
  REQUIRE(a.size() == expect.size());
  for (size_t k = 0; k < a.size(); ++k) CHECK(a[k] == expect[k]);
}

TEST_CASE("finite null series: values, limit, and agreement with the 2F1 form") {
  CHECK(null_venables(3, 6, 10, 1.0) ==
        doctest::Approx(0.17198181152343750).epsilon(1e-14));
  CHECK(null_venables(3, 6, 10, 0.5) ==
        doctest::Approx(0.014713586818068365).epsilon(1e-13));
  CHECK(null_venables(3, 6, 10, 1e7) == doctest::Approx(1.0).epsilon(1e-5));
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    CHECK(std::abs(null_venables(3, 6, 10, x) - null_constantine(3, 6, 10, x)) <=
          1e-12);
  }
  CHECK_THROWS_AS(null_venables(3, 6, 7, 1.0), parameter_error);  // r = 3/2
  CHECK_THROWS_AS(venables_coefficients(2, 5, 4), parameter_error);
}

TEST_CASE("largest-root density: scalar closed form") {
  // m=1: f(l) = c b^{-n1/2} l^{n1/2-1} (1 + l/b)^{-(n1+n2)/2}, the scaled
  // beta-prime density.
  const ProblemSpec spec{1, 4.0, 6.0, {1.6}};
  for (double l : {0.5, 1.5, 4.0}) {
    const double c = std::exp(std::lgamma(0.5 * (spec.n1 + spec.n2)) -
                              std::lgamma(0.5 * spec.n1) -
                              std::lgamma(0.5 * spec.n2));
    const double expect = c * std::pow(spec.beta[0], -0.5 * spec.n1) *
                          std::pow(l, 0.5 * spec.n1 - 1.0) *
                          std::pow(1.0 + l / spec.beta[0],
                                   -0.5 * (spec.n1 + spec.n2));
    CHECK(l1_density_khatri(spec, l) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("largest-root density matches the derivative and the integral of the CDF") {
  const ProblemSpec spec{2, 6.0, 8.0, {1.0, 2.0}};
  IntegratorConfig cfg;
  // Density vs centred difference of the CDF.
  for (double x : {1.0, 2.0}) {
    const double h = 1e-3 * x;
    const double cp = max_root_cdf(spec, x + h, CdfMethod::series,
                                   IntegratorConfig{.series_error = 1e-12});
    const double cm = max_root_cdf(spec, x - h, CdfMethod::series,
                                   IntegratorConfig{.series_error = 1e-12});
    const double fd = (cp - cm) / (2.0 * h);
    const double f = l1_density_khatri(spec, x, cfg);
    CHECK(std::abs(f - fd) <= 1e-4 * std::abs(fd));
  }
  // Integral of the density up to X vs the CDF at X.
  const double X = 1.5;
  const double integral = testutil::integrate(
      [&](double t) { return t < 1e-12 ? 0.0 : l1_density_khatri(spec, t, cfg); },
      1e-12, X, 1e-8);
  const double cdf = max_root_cdf(spec, X, CdfMethod::series,
                                  IntegratorConfig{.series_error = 1e-12});
  CHECK(std::abs(integral - cdf) <= 1e-4);
  // Small-x power behavior: vanishes when m n1 / 2 > 1.
  CHECK(l1_density_khatri(spec, 1e-8, cfg) < 1e-12);
}
