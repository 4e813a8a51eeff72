#pragma once

// Internal: the James recursion for zonal polynomial coefficients in the
// monomial symmetric basis, templated over the coefficient ring so the same
// code runs in exact rational arithmetic (low weights, certification) and in
// double (high weights). Not installed.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <functional>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wishratio/partition.hpp"

namespace wishratio::symfun::detail {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <class Num>
struct BuiltWeight {
  int weight = 0;
  std::vector<Partition> partitions;  // descending lex, <= max_parts parts
  // expansions[i]: sorted (index into partitions, coefficient) pairs for
  // C_{partitions[i]}; indices ascend and include the diagonal entry.
  std::vector<std::vector<std::pair<int, Num>>> expansions;
};

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }
inline double to_double(double d) { return d; }

template <class Num>
Num num_from_bigint(const BigInt& v) {
  if constexpr (std::is_same_v<Num, Rational>) {
    return Rational(v);
  } else {
    return v.template convert_to<double>();
  }
}

inline BigInt multinomial(int k, const Partition& lambda) {
  BigInt num = 1;
  for (int i = 2; i <= k; ++i) num *= i;
  for (int part : lambda.parts()) {
    BigInt d = 1;
    for (int i = 2; i <= part; ++i) d *= i;
    num /= d;
  }
  return num;
}

// Coefficients of the zonal polynomials of weight k in the monomial basis,
// restricted to partitions with at most max_parts parts (the recursion is
// closed under that restriction: single-box moves never increase the part
// count, and normalization only couples partitions downward in dominance).
template <class Num>
BuiltWeight<Num> build_weight_block(int k, int max_parts) {
  BuiltWeight<Num> out;
  out.weight = k;
  out.partitions = enumerate_partitions(k, max_parts);
  const int P = static_cast<int>(out.partitions.size());
  out.expansions.resize(static_cast<size_t>(P));
  if (k == 0) {
    out.expansions[0] = {{0, Num(1)}};
    return out;
  }

  std::unordered_map<Partition, int, PartitionHash> index;
  index.reserve(static_cast<size_t>(P) * 2);
  for (int i = 0; i < P; ++i) index.emplace(out.partitions[i], i);

  std::vector<long> rho(static_cast<size_t>(P));
  for (int i = 0; i < P; ++i) rho[static_cast<size_t>(i)] = out.partitions[static_cast<size_t>(i)].rho();

  // Unnormalized coefficients c~[a]: map from partition index to value,
  // with c~[a][a] = 1. Only indices b > a (lex-below, dominated) appear.
  std::vector<std::unordered_map<int, Num>> raw(static_cast<size_t>(P));
  std::vector<int> mu_parts;
  for (int a = 0; a < P; ++a) {
    auto& row = raw[static_cast<size_t>(a)];
    row.emplace(a, Num(1));
    const Partition& kappa = out.partitions[static_cast<size_t>(a)];
    for (int b = a + 1; b < P; ++b) {
      const Partition& lambda = out.partitions[static_cast<size_t>(b)];
      if (!kappa.dominates(lambda)) continue;
      const auto& lp = lambda.parts();
      const int len = lambda.size();
      Num sum(0);
      bool any = false;
      for (int i = 0; i < len; ++i) {
        for (int j = i + 1; j < len; ++j) {
          const int lj = lp[static_cast<size_t>(j)];
          for (int t = 1; t <= lj; ++t) {
            mu_parts.assign(lp.begin(), lp.end());
            mu_parts[static_cast<size_t>(i)] += t;
            mu_parts[static_cast<size_t>(j)] -= t;
            std::sort(mu_parts.begin(), mu_parts.end(), std::greater<int>());
            while (!mu_parts.empty() && mu_parts.back() == 0) mu_parts.pop_back();
            auto it = index.find(Partition(mu_parts));
            if (it == index.end()) continue;  // cannot happen within the class
            auto cit = row.find(it->second);
            if (cit == row.end()) continue;  // mu not dominated by kappa
            const int w = lp[static_cast<size_t>(i)] - lj + 2 * t;
            sum += Num(w) * cit->second;
            any = true;
          }
        }
      }
      if (any) row.emplace(b, sum / Num(static_cast<long>(rho[static_cast<size_t>(a)] - rho[static_cast<size_t>(b)])));
    }
  }

  // Normalize so that sum_kappa C_kappa = (tr X)^k: solve the triangular
  // system sum_{a <= b} s[a] c~[a][b] = multinomial(b) top-down.
  std::vector<Num> scale(static_cast<size_t>(P));
  std::vector<Num> acc(static_cast<size_t>(P), Num(0));
  for (int a = 0; a < P; ++a) {
    Num s = num_from_bigint<Num>(multinomial(k, out.partitions[static_cast<size_t>(a)])) - acc[static_cast<size_t>(a)];
    scale[static_cast<size_t>(a)] = s;
    for (const auto& [b, c] : raw[static_cast<size_t>(a)]) {
      if (b != a) acc[static_cast<size_t>(b)] += s * c;
    }
  }

  for (int a = 0; a < P; ++a) {
    auto& terms = out.expansions[static_cast<size_t>(a)];
    terms.reserve(raw[static_cast<size_t>(a)].size());
    for (auto& [b, c] : raw[static_cast<size_t>(a)]) {
      terms.emplace_back(b, scale[static_cast<size_t>(a)] * c);
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& u, const auto& v) { return u.first < v.first; });
  }
  return out;
}

// (a)_kappa in exact arithmetic; a is rational (half-integers in practice).
inline Rational gen_pochhammer_exact(const Rational& a, const Partition& kappa) {
  Rational prod(1);
  for (int i = 0; i < kappa.size(); ++i) {
    const Rational base = a - Rational(i, 2);
    for (int j = 0; j < kappa.part(i); ++j) prod *= base + j;
  }
  return prod;
}

// m_lambda(1,...,1) = number of distinct permutations of lambda padded to m.
inline BigInt monomial_count_ones(const Partition& lambda, int m) {
  if (lambda.size() > m) return 0;
  BigInt num = 1;
  for (int i = 2; i <= m; ++i) num *= i;
  int run = 1;
  const auto& p = lambda.parts();
  for (size_t i = 1; i <= p.size(); ++i) {
    if (i < p.size() && p[i] == p[i - 1]) {
      ++run;
    } else {
      BigInt d = 1;
      for (int t = 2; t <= run; ++t) d *= t;
      num /= d;
      run = 1;
    }
  }
  const int zeros = m - lambda.size();
  BigInt dz = 1;
  for (int t = 2; t <= zeros; ++t) dz *= t;
  num /= dz;
  return num;
}

// Exact C_kappa(I_m) from the weight block containing kappa.
inline Rational zonal_ones_exact(const BuiltWeight<Rational>& block, int kappa_index, int m) {
  Rational v(0);
  for (const auto& [idx, c] : block.expansions[static_cast<size_t>(kappa_index)]) {
    v += c * Rational(monomial_count_ones(block.partitions[static_cast<size_t>(idx)], m));
  }
  return v;
}

}  // namespace wishratio::symfun::detail
