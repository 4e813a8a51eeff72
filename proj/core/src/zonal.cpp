#include "wishratio/zonal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "detail/zonal_build.hpp"
#include "wishratio/errors.hpp"

namespace wishratio::symfun {

double gen_pochhammer(double a, const Partition& kappa) {
  double prod = 1.0;
  for (int i = 0; i < kappa.size(); ++i) {
    const double base = a - 0.5 * i;
    for (int j = 0; j < kappa.part(i); ++j) prod *= base + j;
  }
  return prod;
}

namespace {

// Key for the remaining-parts multiset (values <= 255, descending order).
std::string multiset_key(const std::vector<int>& parts) {
  std::string s;
  s.reserve(parts.size());
  for (int p : parts) s.push_back(static_cast<char>(p));
  return s;
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

// Sum over assignments of the part multiset to coordinates t..m-1 of the
// product of x_c^{p_c}; classic multiset DP, memoized on the remaining
// multiset (the coordinate index is implied by its size).
class MonomialEvaluator {
 public:
  explicit MonomialEvaluator(std::span<const double> x) : x_(x) {}

  double value(std::vector<int> rem) {
    std::sort(rem.begin(), rem.end(), std::greater<int>());
    return value_rec(rem);
  }

  // Entry J of the result differentiates coordinate c iff bit c of J is set.
  std::vector<double> partials(std::vector<int> rem) {
    std::sort(rem.begin(), rem.end(), std::greater<int>());
    return partials_rec(rem);
  }

  double partial_fixed(std::vector<int> rem, std::uint32_t jbits) {
    std::sort(rem.begin(), rem.end(), std::greater<int>());
    jbits_ = jbits;
    return fixed_rec(rem);
  }

 private:
  double value_rec(const std::vector<int>& rem) {
    if (rem.empty()) return 1.0;
    const auto key = multiset_key(rem);
    if (auto it = val_memo_.find(key); it != val_memo_.end()) return it->second;
    const size_t t = x_.size() - rem.size();
    double sum = 0.0;
    std::vector<int> next;
    for (size_t i = 0; i < rem.size(); ++i) {
      if (i > 0 && rem[i] == rem[i - 1]) continue;  // distinct values only
      next = rem;
      next.erase(next.begin() + static_cast<long>(i));
      sum += ipow(x_[t], rem[i]) * value_rec(next);
    }
    val_memo_.emplace(key, sum);
    return sum;
  }

  std::vector<double> partials_rec(const std::vector<int>& rem) {
    if (rem.empty()) return {1.0};
    const auto key = multiset_key(rem);
    if (auto it = vec_memo_.find(key); it != vec_memo_.end()) return it->second;
    const size_t t = x_.size() - rem.size();
    const size_t child_size = size_t{1} << (rem.size() - 1);
    std::vector<double> out(child_size * 2, 0.0);
    std::vector<int> next;
    for (size_t i = 0; i < rem.size(); ++i) {
      if (i > 0 && rem[i] == rem[i - 1]) continue;
      next = rem;
      next.erase(next.begin() + static_cast<long>(i));
      const auto child = partials_rec(next);
      const int p = rem[i];
      const double w0 = ipow(x_[t], p);
      const double w1 = p == 0 ? 0.0 : p * ipow(x_[t], p - 1);
      // Bit 0 of the output index is coordinate t; child bits shift up.
      for (size_t j = 0; j < child_size; ++j) {
        out[j << 1] += w0 * child[j];
        out[(j << 1) | 1] += w1 * child[j];
      }
    }
    vec_memo_.emplace(key, out);
    return out;
  }

  double fixed_rec(const std::vector<int>& rem) {
    if (rem.empty()) return 1.0;
    const auto key = multiset_key(rem);
    if (auto it = fix_memo_.find(key); it != fix_memo_.end()) return it->second;
    const size_t t = x_.size() - rem.size();
    const bool diff = (jbits_ >> t) & 1u;
    double sum = 0.0;
    std::vector<int> next;
    for (size_t i = 0; i < rem.size(); ++i) {
      if (i > 0 && rem[i] == rem[i - 1]) continue;
      const int p = rem[i];
      const double w = diff ? (p == 0 ? 0.0 : p * ipow(x_[t], p - 1)) : ipow(x_[t], p);
      if (w == 0.0) continue;
      next = rem;
      next.erase(next.begin() + static_cast<long>(i));
      sum += w * fixed_rec(next);
    }
    fix_memo_.emplace(key, sum);
    return sum;
  }

  std::span<const double> x_;
  std::uint32_t jbits_ = 0;
  std::unordered_map<std::string, double> val_memo_;
  std::unordered_map<std::string, double> fix_memo_;
  std::unordered_map<std::string, std::vector<double>> vec_memo_;
};

std::vector<int> padded_parts(const Partition& lambda, size_t m) {
  std::vector<int> parts(lambda.parts());
  parts.resize(m, 0);
  return parts;
}

}  // namespace

double monomial_sym_eval(const Partition& lambda, std::span<const double> x) {
  if (lambda.size() > static_cast<int>(x.size())) return 0.0;
  if (lambda.weight() > 255) throw parameter_error("monomial weight too large");
  MonomialEvaluator ev(x);
  return ev.value(padded_parts(lambda, x.size()));
}

double monomial_sym_partial(const Partition& lambda, SubsetIndex J,
                            std::span<const double> x) {
  if (lambda.size() > static_cast<int>(x.size())) return 0.0;
  MonomialEvaluator ev(x);
  return ev.partial_fixed(padded_parts(lambda, x.size()), J.bits);
}

std::vector<double> monomial_sym_partials(const Partition& lambda,
                                          std::span<const double> x) {
  const size_t m = x.size();
  if (m >= 26) throw parameter_error("too many variables for subset partials");
  if (lambda.size() > static_cast<int>(m))
    return std::vector<double>(size_t{1} << m, 0.0);
  MonomialEvaluator ev(x);
  return ev.partials(padded_parts(lambda, m));
}

double ZonalExpansion::eval(std::span<const double> x) const {
  double s = 0.0;
  for (size_t i = 0; i < monomials.size(); ++i)
    s += coefficients[i] * monomial_sym_eval(monomials[i], x);
  return s;
}

double ZonalExpansion::partial_eval(SubsetIndex J, std::span<const double> x) const {
  double s = 0.0;
  for (size_t i = 0; i < monomials.size(); ++i)
    s += coefficients[i] * monomial_sym_partial(monomials[i], J, x);
  return s;
}

int ZonalWeightBlock::index_of(const Partition& p) const {
  auto it = std::lower_bound(partitions.begin(), partitions.end(), p,
                             [](const Partition& a, const Partition& b) { return b < a; });
  if (it == partitions.end() || *it != p) return -1;
  return static_cast<int>(it - partitions.begin());
}

struct ZonalTable::Impl {
  int exact_limit;
  std::shared_mutex mtx;
  std::vector<std::shared_ptr<const ZonalWeightBlock>> blocks;  // by weight
};

ZonalTable::ZonalTable(int max_parts, int exact_weight_limit)
    : max_parts_(max_parts), impl_(std::make_unique<Impl>()) {
  if (max_parts < 1) throw parameter_error("max_parts must be positive");
  impl_->exact_limit = exact_weight_limit;
}

ZonalTable::~ZonalTable() = default;

std::shared_ptr<const ZonalWeightBlock> ZonalTable::weight_block(int k) {
  if (k < 0) throw parameter_error("weight must be non-negative");
  {
    std::shared_lock lock(impl_->mtx);
    if (k < static_cast<int>(impl_->blocks.size()) && impl_->blocks[static_cast<size_t>(k)])
      return impl_->blocks[static_cast<size_t>(k)];
  }
  std::unique_lock lock(impl_->mtx);
  if (k >= static_cast<int>(impl_->blocks.size())) impl_->blocks.resize(static_cast<size_t>(k) + 1);
  if (!impl_->blocks[static_cast<size_t>(k)]) {
    auto block = std::make_shared<ZonalWeightBlock>();
    block->weight = k;
    if (k <= impl_->exact_limit) {
      auto built = detail::build_weight_block<detail::Rational>(k, max_parts_);
      block->partitions = std::move(built.partitions);
      block->expansions.resize(built.expansions.size());
      for (size_t i = 0; i < built.expansions.size(); ++i) {
        auto& dst = block->expansions[i];
        dst.reserve(built.expansions[i].size());
        for (const auto& [idx, c] : built.expansions[i])
          dst.emplace_back(idx, detail::to_double(c));
      }
    } else {
      auto built = detail::build_weight_block<double>(k, max_parts_);
      block->partitions = std::move(built.partitions);
      block->expansions = std::move(built.expansions);
    }
    impl_->blocks[static_cast<size_t>(k)] = std::move(block);
  }
  return impl_->blocks[static_cast<size_t>(k)];
}

ZonalExpansion ZonalTable::expansion(const Partition& kappa) {
  if (kappa.size() > max_parts_)
    throw parameter_error("partition has more parts than the table supports");
  auto block = weight_block(kappa.weight());
  const int idx = block->index_of(kappa);
  ZonalExpansion out;
  out.kappa = kappa;
  for (const auto& [j, c] : block->expansions[static_cast<size_t>(idx)]) {
    out.monomials.push_back(block->partitions[static_cast<size_t>(j)]);
    out.coefficients.push_back(c);
  }
  return out;
}

ZonalTable& shared_zonal_table(int max_parts) {
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<ZonalTable>> tables;
  std::lock_guard lock(mtx);
  auto& slot = tables[max_parts];
  if (!slot) slot = std::make_unique<ZonalTable>(max_parts);
  return *slot;
}

ZonalExpansion zonal_expansion(const Partition& kappa) {
  return shared_zonal_table(std::max(1, kappa.weight())).expansion(kappa);
}

double zonal_eval(const Partition& kappa, std::span<const double> x) {
  if (kappa.size() > static_cast<int>(x.size())) return 0.0;
  const int m = std::max(1, static_cast<int>(x.size()));
  return shared_zonal_table(m).expansion(kappa).eval(x);
}

double zonal_partial_eval(const Partition& kappa, SubsetIndex J,
                          std::span<const double> x) {
  if (kappa.size() > static_cast<int>(x.size())) return 0.0;
  const int m = std::max(1, static_cast<int>(x.size()));
  return shared_zonal_table(m).expansion(kappa).partial_eval(J, x);
}

}  // namespace wishratio::symfun
