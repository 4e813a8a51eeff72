#include "wishratio/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>

#include "wishratio/errors.hpp"
#include "wishratio/zonal.hpp"

namespace wishratio::mhg {

namespace {

bool is_nonpositive_integer(double v) {
  return v <= 0.0 && std::abs(v - std::round(v)) < 1e-9;
}

// Per-partition series coefficient prod_i (a_i)_kappa / prod_j (b_j)_kappa / k!,
// accumulated box by box so intermediates stay scaled and an exactly vanishing
// Pochhammer factor yields an exact 0.
double partition_coefficient(const HyperParams& p, const symfun::Partition& kappa) {
  double coef = 1.0;
  int box = 0;
  for (int i = 0; i < kappa.size(); ++i) {
    const double off = -0.5 * i;
    for (int j = 0; j < kappa.part(i); ++j) {
      ++box;
      double num = 1.0;
      for (double a : p.numerator) num *= a + off + j;
      if (num == 0.0) return 0.0;
      double den = static_cast<double>(box);
      for (double b : p.denominator) den *= b + off + j;
      coef *= num / den;
    }
  }
  return coef;
}

// Smallest finite-series bound implied by a non-positive-integer numerator
// parameter: (a)_kappa = 0 whenever kappa_1 > -a, so total degree is capped
// at (-a) * nvars.
std::optional<int> termination_bound(const HyperParams& p, int nvars) {
  std::optional<int> bound;
  for (double a : p.numerator) {
    if (is_nonpositive_integer(a)) {
      const int r = static_cast<int>(std::llround(-a));
      const int b = r * nvars;
      if (!bound || b < *bound) bound = b;
    }
  }
  return bound;
}

struct EngineResult {
  SeriesResult series;
  std::vector<double> partials;  // empty unless requested
};

EngineResult run_series(const HyperParams& params, std::span<const double> x_in,
                        int max_degree, double series_error, bool want_derivs) {
  const int m = static_cast<int>(x_in.size());
  if (m < 1) throw parameter_error("pFq needs at least one variable");
  if (max_degree < 0) throw parameter_error("max_degree must be >= 0");
  if (!(series_error > 0.0)) throw parameter_error("series_error must be positive");
  params.validate(m);

  // Canonical coordinate order: the value is a symmetric function, so sorting
  // makes permutation invariance exact; derivative entries are permuted back
  // at the end.
  std::vector<int> order(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x_in[static_cast<size_t>(a)] > x_in[static_cast<size_t>(b)]; });
  std::vector<double> xs(static_cast<size_t>(m));
  for (int t = 0; t < m; ++t) xs[static_cast<size_t>(t)] = x_in[static_cast<size_t>(order[static_cast<size_t>(t)])];
  std::span<const double> x(xs);

  auto& table = symfun::shared_zonal_table(m);
  const auto bound = termination_bound(params, m);
  const int cap = bound ? std::min(max_degree, *bound) : max_degree;

  EngineResult out;
  auto& sr = out.series;

  // Collapsed monomial weights across the whole truncated series, used for
  // the derivative pass: weight_terms[k][lambda index] = sum over kappa of
  // coef(kappa) * c_{kappa,lambda}.
  std::vector<std::vector<double>> weight_terms;

  double f_prev = 0.0;
  for (int k = 0; k <= cap; ++k) {
    const auto block = table.weight_block(k);
    const size_t P = block->partitions.size();
    std::vector<double> mval(P, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> collapsed;
    if (want_derivs) collapsed.assign(P, 0.0);

    double term = 0.0;
    for (size_t a = 0; a < P; ++a) {
      const double coef = partition_coefficient(params, block->partitions[a]);
      if (coef == 0.0) continue;
      double ck = 0.0;
      for (const auto& [idx, c] : block->expansions[a]) {
        auto& mv = mval[static_cast<size_t>(idx)];
        if (std::isnan(mv))
          mv = symfun::monomial_sym_eval(block->partitions[static_cast<size_t>(idx)], x);
        ck += c * mv;
        if (want_derivs) collapsed[static_cast<size_t>(idx)] += coef * c;
      }
      term += coef * ck;
    }
    if (want_derivs) weight_terms.push_back(std::move(collapsed));

    const double f_k = (k == 0) ? term : f_prev + term;
    sr.partial_sums_by_degree.push_back(f_k);
    sr.truncation_degree = k;
    sr.value = f_k;

    if (!std::isfinite(f_k)) {
      sr.converged = false;
      break;
    }
    if (bound && k == *bound && *bound <= max_degree) {
      sr.converged = true;
      break;
    }
    if (k >= 1) {
      const double gap = std::abs(f_k - f_prev);
      const double denom = std::max(std::abs(f_prev), std::numeric_limits<double>::epsilon());
      if (gap / denom < series_error) {
        sr.converged = true;
        break;
      }
    }
    f_prev = f_k;
  }
  if (!sr.converged && bound && sr.truncation_degree == *bound) sr.converged = true;

  if (want_derivs) {
    std::vector<double> sorted_partials(size_t{1} << m, 0.0);
    for (int k = 0; k <= sr.truncation_degree && k < static_cast<int>(weight_terms.size()); ++k) {
      const auto block = table.weight_block(k);
      const auto& collapsed = weight_terms[static_cast<size_t>(k)];
      for (size_t idx = 0; idx < collapsed.size(); ++idx) {
        if (collapsed[idx] == 0.0) continue;
        const auto partials = symfun::monomial_sym_partials(block->partitions[idx], x);
        for (size_t j = 0; j < sorted_partials.size(); ++j)
          sorted_partials[j] += collapsed[idx] * partials[j];
      }
    }
    // Undo the canonical ordering: bit t of the sorted index is original
    // coordinate order[t].
    out.partials.assign(size_t{1} << m, 0.0);
    for (std::uint32_t j = 0; j < out.partials.size(); ++j) {
      std::uint32_t js = 0;
      for (int t = 0; t < m; ++t)
        if ((j >> order[static_cast<size_t>(t)]) & 1u) js |= 1u << t;
      out.partials[j] = sorted_partials[js];
    }
    // The value entry comes from the value accumulation so both paths agree
    // bit for bit.
    out.partials[0] = sr.value;
  }
  return out;
}

}  // namespace

void HyperParams::validate(int m) const {
  for (double b : denominator) {
    for (int i = 1; i <= m; ++i) {
      const double v = b - 0.5 * (i - 1);
      if (is_nonpositive_integer(v))
        throw parameter_error("denominator parameter hits a pole: b = " +
                              std::to_string(b) + " at row " + std::to_string(i));
    }
  }
}

SeriesResult pfq_truncated(const HyperParams& params, std::span<const double> x,
                           int max_degree, double series_error) {
  return run_series(params, x, max_degree, series_error, false).series;
}

PfqDerivatives pfq_with_derivs(const HyperParams& params, std::span<const double> x,
                               int max_degree, double series_error) {
  auto r = run_series(params, x, max_degree, series_error, true);
  return {std::move(r.series), std::move(r.partials)};
}

namespace {
void require_below_one(std::span<const double> x) {
  for (double v : x)
    if (!(v < 1.0)) throw parameter_error("Kummer transforms require all x_i < 1");
}
}  // namespace

KummerTransform kummer_transform_1(double a, double b, double c,
                                   std::span<const double> x) {
  require_below_one(x);
  KummerTransform t;
  t.params.numerator = {c - a, c - b};
  t.params.denominator = {c};
  t.argument.assign(x.begin(), x.end());
  t.det_power = c - a - b;
  return t;
}

KummerTransform kummer_transform_2(double a, double b, double c,
                                   std::span<const double> x) {
  require_below_one(x);
  KummerTransform t;
  t.params.numerator = {c - a, b};
  t.params.denominator = {c};
  t.argument.reserve(x.size());
  for (double v : x) t.argument.push_back(-v / (1.0 - v));
  t.det_power = -b;
  return t;
}

}  // namespace wishratio::mhg
