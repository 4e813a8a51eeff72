#include "wishratio/dist.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "detail/zonal_build.hpp"
#include "wishratio/errors.hpp"
#include "wishratio/hgm.hpp"
#include "wishratio/zonal.hpp"

namespace wishratio::dist {

namespace {

Eigen::MatrixXd to_eigen(const SpdMatrix& a) {
  Eigen::MatrixXd out(a.dim(), a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) out(i, j) = a(i, j);
  return out;
}

}  // namespace

SpdMatrix::SpdMatrix(int dim) : dim_(dim) {
  if (dim < 1) throw parameter_error("matrix dimension must be positive");
  lower_.assign(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0);
}

SpdMatrix SpdMatrix::identity(int dim) {
  SpdMatrix a(dim);
  for (int i = 0; i < dim; ++i) a.set(i, i, 1.0);
  return a;
}

SpdMatrix SpdMatrix::diagonal(std::span<const double> d) {
  SpdMatrix a(static_cast<int>(d.size()));
  for (int i = 0; i < a.dim(); ++i) a.set(i, i, d[static_cast<size_t>(i)]);
  return a;
}

SpdMatrix SpdMatrix::from_rowmajor(int dim, std::span<const double> a) {
  if (static_cast<int>(a.size()) != dim * dim)
    throw parameter_error("from_rowmajor: size mismatch");
  SpdMatrix out(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j)
      out.set(i, j, 0.5 * (a[static_cast<size_t>(i * dim + j)] +
                           a[static_cast<size_t>(j * dim + i)]));
  return out;
}

double SpdMatrix::operator()(int i, int j) const {
  if (j > i) std::swap(i, j);
  return lower_[static_cast<size_t>(i) * (i + 1) / 2 + static_cast<size_t>(j)];
}

void SpdMatrix::set(int i, int j, double v) {
  if (j > i) std::swap(i, j);
  lower_[static_cast<size_t>(i) * (i + 1) / 2 + static_cast<size_t>(j)] = v;
}

std::vector<double> SpdMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(*this),
                                                    Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + dim_);
  return ev;
}

double log_multigamma(int m, double a) {
  if (m < 1) throw parameter_error("log_multigamma: m must be >= 1");
  if (!(a > 0.5 * (m - 1)))
    throw parameter_error("log_multigamma: a must exceed (m-1)/2");
  double s = 0.25 * m * (m - 1) * std::log(M_PI);
  for (int i = 1; i <= m; ++i) s += std::lgamma(a - 0.5 * (i - 1));
  return s;
}

double ratio_density(const ProblemSpec& spec, const SpdMatrix& U,
                     const SpdMatrix& Sigma2) {
  spec.validate();
  const int m = spec.m;
  if (U.dim() != m || Sigma2.dim() != m)
    throw parameter_error("ratio_density: dimension mismatch");

  const Eigen::MatrixXd s2 = to_eigen(Sigma2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(s2);
  if (es2.eigenvalues().minCoeff() <= 0.0)
    throw parameter_error("Sigma2 must be positive definite");
  const double logdet_s2 = es2.eigenvalues().array().log().sum();

  // |I + Sigma2 U| through the symmetric similar form S^{1/2} U S^{1/2}.
  const Eigen::MatrixXd shalf = es2.operatorSqrt();
  const Eigen::MatrixXd sym = shalf * to_eigen(U) * shalf;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esm(sym, Eigen::EigenvaluesOnly);

  const double expo = 0.5 * (spec.n1 - m - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esu(to_eigen(U), Eigen::EigenvaluesOnly);
  const double umin = esu.eigenvalues().minCoeff();
  if (umin < 0.0) throw parameter_error("U must be positive semidefinite");
  if (umin == 0.0) {
    if (expo > 0.0) return 0.0;
    if (expo < 0.0) throw parameter_error("singular U with n1 < m+1: density diverges");
  }

  double lg = log_multigamma(m, 0.5 * (spec.n1 + spec.n2)) + 0.5 * spec.n1 * logdet_s2 -
              log_multigamma(m, 0.5 * spec.n1) - log_multigamma(m, 0.5 * spec.n2);
  for (int i = 0; i < m; ++i) {
    lg -= 0.5 * (spec.n1 + spec.n2) * std::log1p(esm.eigenvalues()[i]);
    if (expo != 0.0) lg += expo * std::log(esu.eigenvalues()[i]);
  }
  return std::exp(lg);
}

SeriesCdfResult ratio_cdf_series(const ProblemSpec& spec, const SpdMatrix& Omega,
                                 const SpdMatrix& Sigma2, const IntegratorConfig& cfg) {
  spec.validate();
  const int m = spec.m;
  if (Omega.dim() != m || Sigma2.dim() != m)
    throw parameter_error("ratio_cdf_series: dimension mismatch");

  // Eigenvalues of Sigma2*Omega via the Cholesky similar form L' Sigma2 L,
  // Omega = L L'; any square root works here.
  const Eigen::MatrixXd om = to_eigen(Omega);
  Eigen::LLT<Eigen::MatrixXd> llt(om);
  if (llt.info() != Eigen::Success)
    throw parameter_error("Omega must be positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd sym = L.transpose() * to_eigen(Sigma2) * L;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);

  std::vector<double> arg(static_cast<size_t>(m));
  double logdet = 0.0;
  for (int i = 0; i < m; ++i) {
    const double ev = es.eigenvalues()[i];
    if (!(ev > 0.0)) throw parameter_error("Sigma2*Omega must have positive eigenvalues");
    logdet += std::log(ev);
    arg[static_cast<size_t>(i)] = -ev;
  }

  mhg::HyperParams params{{0.5 * spec.n1, 0.5 * (spec.n1 + spec.n2)},
                          {0.5 * (spec.n1 + m + 1)}};
  const auto f = mhg::pfq_truncated(params, arg, cfg.max_degree,
                                    std::min(cfg.series_error, 1e-10));
  const double logc = log_multigamma(m, 0.5 * (m + 1)) +
                      log_multigamma(m, 0.5 * (spec.n1 + spec.n2)) -
                      log_multigamma(m, 0.5 * (spec.n1 + m + 1)) -
                      log_multigamma(m, 0.5 * spec.n2);
  const double value = std::exp(logc + 0.5 * spec.n1 * logdet) * f.value;
  return {value, f.converged, f.truncation_degree};
}

namespace {

// Direct evaluation of the non-negative series form at one x.
double max_root_cdf_series(const ProblemSpec& spec, double x,
                           const IntegratorConfig& cfg) {
  const auto y = hgm::curve_point(spec, x);
  const auto f = mhg::pfq_truncated(hgm::gauss_params(spec), y, cfg.max_degree,
                                    cfg.series_error);
  if (!f.converged)
    throw parameter_error(
        "series for the largest-root CDF did not converge within the degree "
        "cap; use the hgm method");
  const double v = std::exp(hgm::log_prefactor(spec, x) + std::log(f.value));
  return std::clamp(v, 0.0, 1.0);
}

bool all_equal(std::span<const double> v, double tol) {
  for (size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i] - v[0]) > tol) return false;
  return true;
}

}  // namespace

double max_root_cdf(const ProblemSpec& spec, double x, CdfMethod method,
                    const IntegratorConfig& cfg) {
  spec.validate();
  if (!(x > 0.0)) throw parameter_error("max_root_cdf requires x > 0");

  const bool tied = spec.m > 1 && spec.min_beta_gap() < cfg.min_coord_gap;
  if (method == CdfMethod::hgm) {
    if (tied)
      throw singularity_error(
          "tied beta eigenvalues: the Pfaffian system is singular on the "
          "diagonal; use the series method or the null-case closed forms");
    const auto curve = hgm::integrate_cdf(spec, cfg, std::vector<double>{x});
    return curve.prob.front();
  }
  if (method == CdfMethod::series) {
    // All-equal beta reduces exactly to the null case at x/beta.
    if (spec.m >= 1 && all_equal(spec.beta, 0.0))
      return null_constantine(spec.m, spec.n1, spec.n2, x / spec.beta[0], cfg);
    return max_root_cdf_series(spec, x, cfg);
  }
  // auto_select
  if (tied) {
    if (all_equal(spec.beta, 0.0))
      return null_constantine(spec.m, spec.n1, spec.n2, x / spec.beta[0], cfg);
    return max_root_cdf_series(spec, x, cfg);
  }
  const double bmin = *std::min_element(spec.beta.begin(), spec.beta.end());
  const double ymax = x / (bmin + x);
  if (ymax <= 0.7) return max_root_cdf_series(spec, x, cfg);
  const auto curve = hgm::integrate_cdf(spec, cfg, std::vector<double>{x});
  return curve.prob.front();
}

double min_root_upper(const ProblemSpec& spec, double x, const IntegratorConfig& cfg,
                      CdfMethod method) {
  spec.validate();
  if (!(x > 0.0)) throw parameter_error("min_root_upper requires x > 0");
  return max_root_cdf(spec.swapped(), 1.0 / x, method, cfg);
}

double null_constantine(int m, double n1, double n2, double x,
                        const IntegratorConfig& cfg) {
  if (m < 1 || !(n1 >= m) || !(n2 >= m))
    throw parameter_error("null_constantine: need m >= 1 and n1, n2 >= m");
  if (x < 0.0) throw parameter_error("null_constantine requires x >= 0");
  if (x == 0.0) return 0.0;

  const double z = x / (1.0 + x);
  std::vector<double> arg(static_cast<size_t>(m), z);
  mhg::HyperParams params{{0.5 * n1, 0.5 * (m + 1) - 0.5 * n2}, {0.5 * (n1 + m + 1)}};
  const auto f = mhg::pfq_truncated(params, arg, cfg.max_degree,
                                    std::min(cfg.series_error, 1e-12));
  const double logc = log_multigamma(m, 0.5 * (n1 + n2)) +
                      log_multigamma(m, 0.5 * (m + 1)) -
                      log_multigamma(m, 0.5 * n2) -
                      log_multigamma(m, 0.5 * (n1 + m + 1));
  const double v = std::exp(logc + 0.5 * n1 * m * std::log(z)) * f.value;
  return std::clamp(v, 0.0, 1.0);
}

namespace {

// Exact a_k coefficients, cached per (m, n1, n2).
const std::vector<double>& venables_coefficients_cached(int m, int n1, int n2) {
  static std::mutex mtx;
  static std::map<std::tuple<int, int, int>, std::vector<double>> cache;
  std::lock_guard lock(mtx);
  auto& slot = cache[{m, n1, n2}];
  if (!slot.empty()) return slot;

  const int r2 = n2 - m - 1;
  if (r2 < 0 || r2 % 2 != 0)
    throw parameter_error(
        "the finite null-case series requires r = (n2-m-1)/2 to be a "
        "non-negative integer");
  const int r = r2 / 2;

  using symfun::detail::Rational;
  const Rational a_half(n1, 2);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(r) * m + 1);
  Rational kfact(1);
  for (int k = 0; k <= r * m; ++k) {
    if (k > 0) kfact *= k;
    const auto block = symfun::detail::build_weight_block<Rational>(k, m);
    Rational sum(0);
    for (size_t i = 0; i < block.partitions.size(); ++i) {
      const auto& kappa = block.partitions[i];
      if (kappa.part(0) > r) continue;
      sum += symfun::detail::gen_pochhammer_exact(a_half, kappa) *
             symfun::detail::zonal_ones_exact(block, static_cast<int>(i), m);
    }
    out.push_back(symfun::detail::to_double(sum / kfact));
  }
  return slot = std::move(out), slot;
}

}  // namespace

std::vector<double> venables_coefficients(int m, int n1, int n2) {
  return venables_coefficients_cached(m, n1, n2);
}

double null_venables(int m, int n1, int n2, double x) {
  if (m < 1 || n1 < m || n2 < m)
    throw parameter_error("null_venables: need m >= 1 and n1, n2 >= m");
  if (x < 0.0) throw parameter_error("null_venables requires x >= 0");
  const auto& a = venables_coefficients_cached(m, n1, n2);
  if (x == 0.0) return 0.0;
  const double u = 1.0 / (1.0 + x);
  // Horner over u: sum_k a_k u^k.
  double s = 0.0;
  for (size_t k = a.size(); k-- > 0;) s = s * u + a[k];
  const double z = x / (1.0 + x);
  return std::exp(0.5 * n1 * m * std::log(z)) * s;
}

double l1_density_khatri(const ProblemSpec& spec, double x,
                         const IntegratorConfig& cfg) {
  spec.validate();
  if (!(x > 0.0)) throw parameter_error("l1_density_khatri requires x > 0");
  const int m = spec.m;

  // Lambda = Sigma1 Sigma2^{-1} has the same eigenvalues beta as
  // Sigma2^{-1} Sigma1; the 3F2 argument x (Lambda + x I)^{-1} therefore has
  // eigenvalues x / (beta_i + x), the same curve as the CDF formula.
  const auto arg = hgm::curve_point(spec, x);

  mhg::HyperParams params{
      {0.5 * (spec.n1 + spec.n2), 0.5 * m + 1.0, 0.5 * (m - 1)},
      {0.5 * m, 0.5 * (spec.n1 + m + 1)}};
  const auto f = mhg::pfq_truncated(params, arg, cfg.max_degree,
                                    std::min(cfg.series_error, 1e-10));
  if (!f.converged)
    throw parameter_error("3F2 series did not converge within the degree cap");

  double lg = std::lgamma(0.5) + log_multigamma(m, 0.5 * (spec.n1 + spec.n2)) -
              std::lgamma(0.5 * m) - std::lgamma(0.5 * spec.n1) -
              log_multigamma(m, 0.5 * spec.n2);
  if (m >= 2) {
    lg += log_multigamma(m - 1, 0.5 * m + 1.0);
    lg -= log_multigamma(m - 1, 0.5 * (spec.n1 + m + 1));
  }
  lg += (0.5 * m * spec.n1 - 1.0) * std::log(x);
  for (double b : spec.beta) {
    lg -= 0.5 * spec.n1 * std::log(b);                          // |Lambda|^{-n1/2}
    lg -= 0.5 * (spec.n1 + spec.n2) * std::log1p(x / b);        // |I + x Lambda^{-1}|
  }
  return std::exp(lg) * f.value;
}

}  // namespace wishratio::dist
