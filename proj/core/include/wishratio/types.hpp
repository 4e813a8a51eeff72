#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wishratio {

/// The two-Wishart eigenvalue problem: W1 ~ W_m(n1, Sigma1), W2 ~ W_m(n2, Sigma2),
/// with beta the eigenvalues of Sigma2^{-1} Sigma1. Only the eigenvalues enter
/// any of the distribution formulas.
struct ProblemSpec {
  int m = 1;
  double n1 = 1.0;
  double n2 = 1.0;
  std::vector<double> beta;

  /// Throws parameter_error unless m >= 1, n1 >= m, n2 >= m, beta has m
  /// positive entries.
  void validate() const;

  /// Smallest pairwise |beta_i - beta_j|; +inf for m = 1.
  double min_beta_gap() const;

  /// The dual problem: n1 <-> n2 and beta -> 1/beta (eigenvalues of
  /// Sigma1^{-1} Sigma2). Pr(l_m >= x) of the original equals
  /// Pr(l_1 <= 1/x) of the swap.
  ProblemSpec swapped() const;
};

/// Tolerances and knobs shared by the series stage and the ODE stage.
struct IntegratorConfig {
  double q0 = 0.3;             // initial evaluation point
  double series_error = 1e-5;  // relative-change stopping rule for the series
  double x0value_min = 1e-60;  // smallest acceptable starting probability
  double abs_err = 1e-10;      // absolute error for the adaptive Runge-Kutta
  bool abs_err_auto = false;   // derive abs_err from the series gap instead
  double rel_err = 1e-10;      // relative error for the adaptive Runge-Kutta
  int max_degree = 200;        // hard cap on the series truncation degree
  double min_coord_gap = 1e-8; // reject points closer than this to the diagonal
  double y_guard = 0.97;       // shrink x0 when any y_i exceeds this
  int max_retries = 20;        // bound on x0 doublings / halvings
  double h_init = 0.0;         // 0 = choose automatically
  double h_max = 0.0;          // 0 = unbounded
};

/// A computed CDF curve plus any diagnostics produced along the way.
/// Probabilities are clamped to [0,1] at output only; clamped_beyond_tol
/// records whether clamping exceeded rel_err.
struct CdfCurve {
  std::vector<double> x;
  std::vector<double> prob;
  std::vector<std::string> warnings;
  bool clamped_beyond_tol = false;
};

/// Subset-of-[m] index in the basis convention of the Pfaffian system:
/// bit k-1 of `bits` is set iff variable k is in the subset.
struct SubsetIndex {
  std::uint32_t bits = 0;

  constexpr bool contains(int var) const { return (bits >> (var - 1)) & 1u; }
  constexpr SubsetIndex with(int var) const { return {bits | (1u << (var - 1))}; }
  constexpr SubsetIndex without(int var) const { return {bits & ~(1u << (var - 1))}; }
  int size() const { return __builtin_popcount(bits); }
  constexpr bool operator==(const SubsetIndex&) const = default;
};

}  // namespace wishratio
