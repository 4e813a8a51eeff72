#pragma once

#include <span>
#include <string>
#include <vector>

#include "wishratio/series.hpp"
#include "wishratio/types.hpp"

namespace wishratio::hgm {

/// State of the holonomic evaluation at quantile x: the curve point
/// y_i = x / (beta_i + x) and the 2^m vector F of the 2F1 value and its
/// mixed first-order partials in SubsetIndex order.
struct HgmState {
  double x = 0.0;
  std::vector<double> y;
  std::vector<double> F;
};

struct InitResult {
  HgmState state;
  double log_pref = 0.0;        // log prefactor at the accepted x0
  double prob0 = 0.0;           // Pr(l1 <= x0) = exp(log_pref) * F[0]
  double series_gap_rel = 0.0;  // |f_K - f_{K-1}| / f_K of the series stage
  int truncation_degree = 0;
  std::vector<std::string> notes;  // retry log
};

/// The 2F1 parameter triple of the non-negative series form:
/// a = (m+1)/2, b = (n1+n2)/2, c = (n1+m+1)/2.
mhg::HyperParams gauss_params(const ProblemSpec& spec);

/// y_i(x) = x / (beta_i + x).
std::vector<double> curve_point(const ProblemSpec& spec, double x);

/// Natural log of the prefactor
///   C * x^{n1 m / 2} * prod beta_i^{n2/2} * prod (beta_i + x)^{-(n1+n2)/2}
/// with C the multivariate-gamma constant; requires x > 0.
double log_prefactor(const ProblemSpec& spec, double x);

/// Series evaluation at the starting point with the retry heuristics:
/// doubles x0 while the starting probability is below x0value_min, halves x0
/// while any y_i exceeds the slow-convergence guard. Conflicting demands or
/// exhausted retries raise initialization_error.
InitResult initial_vector(const ProblemSpec& spec, const IntegratorConfig& cfg);

/// Integrates the Pfaffian system along x with an embedded adaptive
/// Runge-Kutta pair (Dormand-Prince 5(4)), emitting Pr(l1 <= x) at each
/// target. Targets must be ascending and above the accepted x0.
/// The integrated vector is the prefactor-scaled G(x) = exp(log_prefactor) F,
/// whose first component is the probability itself; this keeps the absolute
/// error control meaningful for very small starting values.
CdfCurve integrate_cdf(const ProblemSpec& spec, const IntegratorConfig& cfg,
                       std::span<const double> targets);

}  // namespace wishratio::hgm
