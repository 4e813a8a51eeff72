#pragma once

#include <span>
#include <vector>

#include "wishratio/types.hpp"

namespace wishratio::mhg {

/// Parameter lists (a_1..a_p; b_1..b_q) of a matrix-argument pFq.
struct HyperParams {
  std::vector<double> numerator;
  std::vector<double> denominator;

  /// Pole-free requirement: no b_j with b_j - (i-1)/2 a non-positive integer
  /// for i <= m. Throws parameter_error.
  void validate(int m) const;
};

struct SeriesResult {
  double value = 0.0;
  /// partial_sums_by_degree[k] = sum of all terms of total degree <= k.
  std::vector<double> partial_sums_by_degree;
  int truncation_degree = 0;
  bool converged = false;
};

/// Truncated hypergeometric series of a matrix argument,
///   sum_k sum_{kappa |- k} [prod (a_i)_kappa / prod (b_j)_kappa] C_kappa(x) / k!,
/// stopped at the first K with |(f_K - f_{K-1}) / f_{K-1}| < series_error
/// (denominator floored at machine epsilon), at a detected finite-series
/// termination bound, or at max_degree with converged = false.
SeriesResult pfq_truncated(const HyperParams& params, std::span<const double> x,
                           int max_degree = 200, double series_error = 1e-5);

struct PfqDerivatives {
  SeriesResult series;
  /// partials[J] = (prod_{j in J} d/dx_j) pFq at x, SubsetIndex order, all
  /// truncated at series.truncation_degree; partials[0] == series.value.
  std::vector<double> partials;
};

PfqDerivatives pfq_with_derivs(const HyperParams& params, std::span<const double> x,
                               int max_degree = 200, double series_error = 1e-5);

/// A parameter/argument transform of 2F1 preserving the value up to a
/// determinant prefactor:
///   2F1(a,b;c;diag(x)) = prod_i (1-x_i)^det_power * 2F1(params; argument).
struct KummerTransform {
  HyperParams params;
  std::vector<double> argument;
  double det_power = 0.0;
};

/// Euler-type relation: parameters (c-a, c-b; c), same argument, prefactor
/// exponent c-a-b. Requires all x_i < 1.
KummerTransform kummer_transform_1(double a, double b, double c,
                                   std::span<const double> x);

/// Pfaff-type relation: parameters (c-a, b; c), argument -x_i/(1-x_i),
/// prefactor exponent -b. Requires all x_i < 1.
KummerTransform kummer_transform_2(double a, double b, double c,
                                   std::span<const double> x);

}  // namespace wishratio::mhg
