#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "wishratio/types.hpp"

namespace wishratio::pfaffian {

/// Gauss parameters (a, b; c) of the 2F1 whose Pfaffian system is built.
struct GaussParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Coefficient functions of Muirhead's operators
///   g_i = d_i^2 + [p(x_i) + sum_{j != i} q2(x_i,x_j)] d_i
///         - sum_{j != i} q(x_i,x_j) d_j - r(x_i).
/// All are singular at x_i in {0,1} or x_i = x_j and throw singularity_error
/// there.
double coeff_p(double xi, double a, double b, double c, int m);
double coeff_q2(double xi, double xj);
double coeff_q(double xi, double xj);
double coeff_r(double xi, double a, double b);
/// Closed-form partials d q2 / d x_j and d q / d x_j used by the reduction.
double coeff_dq2_dxj(double xi, double xj);
double coeff_dq_dxj(double xi, double xj);

/// Sparse row over the subset basis: (column bits, coefficient) pairs with
/// strictly ascending columns.
using SparseRow = std::vector<std::pair<std::uint32_t, double>>;

/// Direction matrix P_i with d_i F = P_i(x) F on the 2^m basis of mixed
/// first-order partials. Rows for subsets not containing i are unit rows.
struct PfaffianMatrix {
  int direction = 0;  // 0-based variable index
  std::vector<double> point;
  std::vector<SparseRow> rows;

  int dim() const { return static_cast<int>(rows.size()); }
  void apply(std::span<const double> f, std::span<double> out) const;
  void accumulate(double weight, std::span<const double> f, std::span<double> out) const;
};

/// Builds direction matrices at one evaluation point, memoizing the inductive
/// reduction of d_i^2 d_J per (i, J). The point must have pairwise coordinate
/// gaps of at least min_gap and coordinates inside (0,1).
class PfaffianBuilder {
 public:
  PfaffianBuilder(std::span<const double> point, GaussParams params,
                  double min_gap = 1e-8);
  ~PfaffianBuilder();

  PfaffianBuilder(const PfaffianBuilder&) = delete;
  PfaffianBuilder& operator=(const PfaffianBuilder&) = delete;

  int nvars() const { return m_; }

  /// Coefficients {c_S} with d_i^2 d_J = sum_S c_S d_S modulo the ideal;
  /// i is 0-based and must not lie in J.
  const SparseRow& reduce_second_derivative(int i, std::uint32_t j_bits);

  PfaffianMatrix build(int i);

 private:
  struct Impl;
  int m_;
  std::unique_ptr<Impl> impl_;
};

/// One-shot construction of P_i at a point.
PfaffianMatrix build_pfaffian(int i, std::span<const double> point,
                              GaussParams params, double min_gap = 1e-8);

}  // namespace wishratio::pfaffian
