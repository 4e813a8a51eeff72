#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wishratio/dist.hpp"
#include "wishratio/types.hpp"

namespace wishratio::mc {

struct McEstimate {
  double probability = 0.0;
  double standard_error = 0.0;  // sqrt(p (1-p) / n)
  long n_samples = 0;
  std::uint64_t seed = 0;
};

/// One W_m(n, diag(scale_eigs)) draw by the Bartlett decomposition:
/// lower-triangular factor with chi-distributed diagonal (real df supported)
/// and standard-normal subdiagonal, scaled on both sides. Requires n >= m.
dist::SpdMatrix sample_wishart(double n, std::span<const double> scale_eigs,
                               std::mt19937_64& rng);

/// Largest eigenvalues of W1 W2^{-1} for n_samples independent pairs
/// W1 ~ W_m(n1, diag(beta)), W2 ~ W_m(n2, I), sorted ascending. Samples are
/// drawn in fixed-size batches with per-batch derived seeds, so the result is
/// independent of scheduling and bit-identical for a fixed seed.
std::vector<double> sample_max_roots(const ProblemSpec& spec, long n_samples,
                                     std::uint64_t seed);

/// Empirical CDF of the largest root at each x, all estimates from one shared
/// sample set (common random numbers).
std::vector<McEstimate> empirical_max_root_cdf(const ProblemSpec& spec,
                                               std::span<const double> xs,
                                               long n_samples, std::uint64_t seed);

}  // namespace wishratio::mc
