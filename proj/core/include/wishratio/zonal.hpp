#pragma once

#include <memory>
#include <span>
#include <vector>

#include "wishratio/partition.hpp"
#include "wishratio/types.hpp"

namespace wishratio::symfun {

/// Generalized Pochhammer symbol (a)_kappa = prod_i (a - (i-1)/2)_{kappa_i}
/// with (.)_k the rising factorial. Computed factor by factor so a vanishing
/// factor yields exactly 0 (this is what terminates the finite series).
double gen_pochhammer(double a, const Partition& kappa);

/// Monomial symmetric function m_lambda at x; 0 when lambda has more nonzero
/// parts than x has coordinates.
double monomial_sym_eval(const Partition& lambda, std::span<const double> x);

/// (prod_{j in J} d/dx_j) m_lambda at x.
double monomial_sym_partial(const Partition& lambda, SubsetIndex J,
                            std::span<const double> x);

/// All 2^m mixed first-order partials of m_lambda at x, indexed by
/// SubsetIndex bits (entry 0 is the plain value).
std::vector<double> monomial_sym_partials(const Partition& lambda,
                                          std::span<const double> x);

/// Zonal polynomial C_kappa expanded in the monomial symmetric basis,
/// normalized so that sum over all kappa of weight k of C_kappa(X) equals
/// (tr X)^k. Monomials are dominated by kappa and share its weight.
struct ZonalExpansion {
  Partition kappa;
  std::vector<Partition> monomials;
  std::vector<double> coefficients;

  double eval(std::span<const double> x) const;
  double partial_eval(SubsetIndex J, std::span<const double> x) const;
};

/// One weight class of expansions: partitions in descending lexicographic
/// order, each expansion stored as (index into partitions, coefficient).
struct ZonalWeightBlock {
  int weight = 0;
  std::vector<Partition> partitions;
  std::vector<std::vector<std::pair<int, double>>> expansions;

  int index_of(const Partition& p) const;  // -1 if absent
};

/// Cache of zonal expansions restricted to partitions with at most max_parts
/// parts. The restriction is lossless for evaluation in max_parts variables
/// (monomials with more parts vanish identically there) and keeps high-degree
/// tables small. Weights up to exact_weight_limit are built in exact rational
/// arithmetic; heavier weights use double recursion, which is stable here
/// because every quantity in the recursion is positive.
///
/// Thread safety: ensure/lookup may be called concurrently; construction is
/// single-writer behind a shared mutex and returned blocks are immutable.
class ZonalTable {
 public:
  static constexpr int kDefaultExactWeightLimit = 20;

  explicit ZonalTable(int max_parts,
                      int exact_weight_limit = kDefaultExactWeightLimit);
  ~ZonalTable();

  ZonalTable(const ZonalTable&) = delete;
  ZonalTable& operator=(const ZonalTable&) = delete;

  int max_parts() const { return max_parts_; }

  /// Builds (if needed) and returns the weight-k block.
  std::shared_ptr<const ZonalWeightBlock> weight_block(int k);

  /// Expansion of a single partition (kappa must have <= max_parts parts).
  ZonalExpansion expansion(const Partition& kappa);

 private:
  struct Impl;
  int max_parts_;
  std::unique_ptr<Impl> impl_;
};

/// Process-wide table shared by callers that agree on max_parts.
ZonalTable& shared_zonal_table(int max_parts);

/// Convenience wrappers over the shared tables.
ZonalExpansion zonal_expansion(const Partition& kappa);
double zonal_eval(const Partition& kappa, std::span<const double> x);
double zonal_partial_eval(const Partition& kappa, SubsetIndex J,
                          std::span<const double> x);

}  // namespace wishratio::symfun
