#pragma once

#include <span>
#include <vector>

#include "wishratio/series.hpp"
#include "wishratio/types.hpp"

namespace wishratio::dist {

/// Symmetric positive (semi)definite matrix; only the lower triangle is
/// stored, so symmetry is exact by construction.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(int dim);

  static SpdMatrix identity(int dim);
  static SpdMatrix diagonal(std::span<const double> d);
  /// Builds from a full row-major matrix, averaging to enforce symmetry.
  static SpdMatrix from_rowmajor(int dim, std::span<const double> a);

  int dim() const { return dim_; }
  double operator()(int i, int j) const;
  void set(int i, int j, double v);

  /// Eigenvalues in ascending order.
  std::vector<double> eigenvalues() const;

 private:
  int dim_ = 0;
  std::vector<double> lower_;  // packed rows: (0,0), (1,0), (1,1), ...
};

/// log Gamma_m(a) = (m(m-1)/4) log pi + sum_{i=1..m} log Gamma(a - (i-1)/2);
/// requires a > (m-1)/2.
double log_multigamma(int m, double a);

/// Density of U = W2^{-1/2} W1 W2^{-1/2} under Sigma1 = I:
///   const * |I + Sigma2 U|^{-(n1+n2)/2} |U|^{(n1-m-1)/2}.
double ratio_density(const ProblemSpec& spec, const SpdMatrix& U,
                     const SpdMatrix& Sigma2);

struct SeriesCdfResult {
  double value = 0.0;
  bool converged = false;
  int truncation_degree = 0;
};

/// P(U <= Omega) by the alternating direct series
///   const * |Sigma2 Omega|^{n1/2} 2F1(n1/2, (n1+n2)/2; (n1+m+1)/2; -Sigma2 Omega).
/// Slow to converge; intended as a small-argument oracle.
SeriesCdfResult ratio_cdf_series(const ProblemSpec& spec, const SpdMatrix& Omega,
                                 const SpdMatrix& Sigma2,
                                 const IntegratorConfig& cfg = {});

enum class CdfMethod { hgm, series, auto_select };

/// Pr(l1(W1 W2^{-1}) <= x). auto_select uses the series for small arguments
/// or tied beta and the holonomic integration otherwise. Tied beta with the
/// hgm method raises singularity_error.
double max_root_cdf(const ProblemSpec& spec, double x,
                    CdfMethod method = CdfMethod::auto_select,
                    const IntegratorConfig& cfg = {});

/// Pr(l_m(W1 W2^{-1}) >= x) via the duality with the largest root of the
/// swapped problem at 1/x.
double min_root_upper(const ProblemSpec& spec, double x,
                      const IntegratorConfig& cfg = {},
                      CdfMethod method = CdfMethod::auto_select);

/// Null-case (Sigma1 = Sigma2) CDF of the largest root by the beta-matrix
/// closed form at the tied argument (x/(1+x)) I_m.
double null_constantine(int m, double n1, double n2, double x,
                        const IntegratorConfig& cfg = {});

/// Coefficients a_0..a_{rm} of the finite null-case series
///   Pr = (x/(1+x))^{n1 m/2} sum_k a_k (1+x)^{-k},
/// a_k = (1/k!) sum*_{kappa |- k, kappa_1 <= r} (n1/2)_kappa C_kappa(I_m),
/// computed in exact rational arithmetic. Requires r = (n2-m-1)/2 to be a
/// non-negative integer.
std::vector<double> venables_coefficients(int m, int n1, int n2);

/// The finite null-case series itself.
double null_venables(int m, int n1, int n2, double x);

/// Density of the largest root by the 3F2 formula (nonnull case);
/// Lambda = Sigma1 Sigma2^{-1} shares the eigenvalues beta of Sigma2^{-1} Sigma1.
double l1_density_khatri(const ProblemSpec& spec, double x,
                         const IntegratorConfig& cfg = {});

}  // namespace wishratio::dist
