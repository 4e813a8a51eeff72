#include "wishratio/pfaffian.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "wishratio/errors.hpp"

namespace wishratio::pfaffian {

namespace {

void require_interior(double x) {
  if (x == 0.0 || x == 1.0)
    throw singularity_error("operator coefficient singular at x in {0,1}");
}

void require_distinct(double xi, double xj) {
  if (xi == xj)
    throw singularity_error("operator coefficient singular on the diagonal x_i = x_j");
}

}  // namespace

double coeff_p(double xi, double a, double b, double c, int m) {
  require_interior(xi);
  const double h = 0.5 * (m - 1);
  return (c - h - (a + b + 1.0 - h) * xi) / (xi * (1.0 - xi));
}

double coeff_q2(double xi, double xj) {
  require_distinct(xi, xj);
  return 1.0 / (2.0 * (xi - xj));
}

double coeff_q(double xi, double xj) {
  require_interior(xi);
  require_distinct(xi, xj);
  return xj * (1.0 - xj) / (2.0 * xi * (1.0 - xi) * (xi - xj));
}

double coeff_r(double xi, double a, double b) {
  require_interior(xi);
  return a * b / (xi * (1.0 - xi));
}

double coeff_dq2_dxj(double xi, double xj) {
  require_distinct(xi, xj);
  const double d = xi - xj;
  return 1.0 / (2.0 * d * d);
}

double coeff_dq_dxj(double xi, double xj) {
  require_interior(xi);
  require_distinct(xi, xj);
  const double d = xi - xj;
  return (xi - 2.0 * xi * xj + xj * xj) / (2.0 * xi * (1.0 - xi) * d * d);
}

void PfaffianMatrix::apply(std::span<const double> f, std::span<double> out) const {
  for (size_t r = 0; r < rows.size(); ++r) {
    double s = 0.0;
    for (const auto& [col, v] : rows[r]) s += v * f[col];
    out[r] = s;
  }
}

void PfaffianMatrix::accumulate(double weight, std::span<const double> f,
                                std::span<double> out) const {
  for (size_t r = 0; r < rows.size(); ++r) {
    double s = 0.0;
    for (const auto& [col, v] : rows[r]) s += v * f[col];
    out[r] += weight * s;
  }
}

struct PfaffianBuilder::Impl {
  std::vector<double> x;
  GaussParams prm;
  // Precomputed coefficient values: per variable and per ordered pair.
  std::vector<double> p, r;
  std::vector<double> q2, q, dq2, dq;  // flattened (i * m + j), j != i
  std::unordered_map<std::uint64_t, SparseRow> memo;
  std::vector<double> scratch;  // dense accumulation row

  double pair(const std::vector<double>& tab, int i, int j) const {
    return tab[static_cast<size_t>(i) * x.size() + static_cast<size_t>(j)];
  }
};

PfaffianBuilder::PfaffianBuilder(std::span<const double> point, GaussParams params,
                                 double min_gap)
    : m_(static_cast<int>(point.size())), impl_(std::make_unique<Impl>()) {
  if (m_ < 1) throw parameter_error("Pfaffian point must have at least one coordinate");
  if (m_ > 20) throw parameter_error("Pfaffian basis 2^m too large");
  for (double v : point) {
    if (!(v > 0.0) || !(v < 1.0))
      throw singularity_error("Pfaffian point coordinates must lie in (0,1)");
  }
  for (int i = 0; i < m_; ++i)
    for (int j = i + 1; j < m_; ++j)
      if (std::abs(point[static_cast<size_t>(i)] - point[static_cast<size_t>(j)]) < min_gap)
        throw singularity_error(
            "coordinates too close to the diagonal singular locus x_i = x_j");

  auto& im = *impl_;
  im.x.assign(point.begin(), point.end());
  im.prm = params;
  im.p.resize(static_cast<size_t>(m_));
  im.r.resize(static_cast<size_t>(m_));
  const size_t mm = static_cast<size_t>(m_) * static_cast<size_t>(m_);
  im.q2.assign(mm, 0.0);
  im.q.assign(mm, 0.0);
  im.dq2.assign(mm, 0.0);
  im.dq.assign(mm, 0.0);
  for (int i = 0; i < m_; ++i) {
    im.p[static_cast<size_t>(i)] = coeff_p(im.x[static_cast<size_t>(i)], params.a, params.b, params.c, m_);
    im.r[static_cast<size_t>(i)] = coeff_r(im.x[static_cast<size_t>(i)], params.a, params.b);
    for (int j = 0; j < m_; ++j) {
      if (j == i) continue;
      const size_t idx = static_cast<size_t>(i) * static_cast<size_t>(m_) + static_cast<size_t>(j);
      im.q2[idx] = coeff_q2(im.x[static_cast<size_t>(i)], im.x[static_cast<size_t>(j)]);
      im.q[idx] = coeff_q(im.x[static_cast<size_t>(i)], im.x[static_cast<size_t>(j)]);
      im.dq2[idx] = coeff_dq2_dxj(im.x[static_cast<size_t>(i)], im.x[static_cast<size_t>(j)]);
      im.dq[idx] = coeff_dq_dxj(im.x[static_cast<size_t>(i)], im.x[static_cast<size_t>(j)]);
    }
  }
  im.scratch.assign(size_t{1} << m_, 0.0);
}

PfaffianBuilder::~PfaffianBuilder() = default;

// d_i^2 d_J  =  -[p(x_i) + sum_{k != i} q2(x_i,x_k)] d_{J u {i}}
//              - sum_{k in J} dq2/dx_k (x_i,x_k) d_{(J u {i}) \ {k}}
//              + sum_{k not in J, k != i} q(x_i,x_k) d_{J u {k}}
//              + sum_{k in J} q(x_i,x_k) [d_k^2 d_{J \ {k}}]   (recurse)
//              + sum_{k in J} dq/dx_k (x_i,x_k) d_J
//              + r(x_i) d_J                       (mod the ideal)
const SparseRow& PfaffianBuilder::reduce_second_derivative(int i, std::uint32_t j_bits) {
  auto& im = *impl_;
  if (i < 0 || i >= m_) throw parameter_error("direction index out of range");
  if ((j_bits >> i) & 1u) throw parameter_error("J must not contain the direction i");

  const std::uint64_t key = (static_cast<std::uint64_t>(i) << m_) | j_bits;
  if (auto it = im.memo.find(key); it != im.memo.end()) return it->second;

  const std::uint32_t ibit = 1u << i;
  const std::uint32_t full_i = j_bits | ibit;

  auto& dense = im.scratch;
  std::fill(dense.begin(), dense.end(), 0.0);

  double diag = im.p[static_cast<size_t>(i)];
  for (int k = 0; k < m_; ++k)
    if (k != i) diag += im.pair(im.q2, i, k);
  dense[full_i] -= diag;

  dense[j_bits] += im.r[static_cast<size_t>(i)];

  for (int k = 0; k < m_; ++k) {
    if (k == i) continue;
    const std::uint32_t kbit = 1u << k;
    if (j_bits & kbit) {
      dense[full_i & ~kbit] -= im.pair(im.dq2, i, k);
      dense[j_bits] += im.pair(im.dq, i, k);
    } else {
      dense[j_bits | kbit] += im.pair(im.q, i, k);
    }
  }

  // Recursive terms collected after the direct ones so the dense scratch can
  // be reused by the recursion.
  SparseRow direct;
  for (std::uint32_t col = 0; col < dense.size(); ++col)
    if (dense[col] != 0.0) direct.emplace_back(col, dense[col]);

  std::unordered_map<std::uint32_t, double> acc;
  for (const auto& [col, v] : direct) acc[col] += v;
  for (int k = 0; k < m_; ++k) {
    const std::uint32_t kbit = 1u << k;
    if (k == i || !(j_bits & kbit)) continue;
    const double w = im.pair(im.q, i, k);
    const SparseRow& sub = reduce_second_derivative(k, j_bits & ~kbit);
    for (const auto& [col, v] : sub) acc[col] += w * v;
  }

  SparseRow row;
  row.reserve(acc.size());
  for (const auto& [col, v] : acc)
    if (v != 0.0) row.emplace_back(col, v);
  std::sort(row.begin(), row.end(),
            [](const auto& u, const auto& v) { return u.first < v.first; });
  return im.memo.emplace(key, std::move(row)).first->second;
}

PfaffianMatrix PfaffianBuilder::build(int i) {
  auto& im = *impl_;
  if (i < 0 || i >= m_) throw parameter_error("direction index out of range");
  PfaffianMatrix P;
  P.direction = i;
  P.point = im.x;
  const std::uint32_t n = 1u << m_;
  P.rows.resize(n);
  const std::uint32_t ibit = 1u << i;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!(s & ibit)) {
      P.rows[s] = {{s | ibit, 1.0}};
    } else {
      P.rows[s] = reduce_second_derivative(i, s & ~ibit);
    }
  }
  return P;
}

PfaffianMatrix build_pfaffian(int i, std::span<const double> point,
                              GaussParams params, double min_gap) {
  PfaffianBuilder builder(point, params, min_gap);
  return builder.build(i);
}

}  // namespace wishratio::pfaffian
