#include "wishratio/partition.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "wishratio/errors.hpp"

namespace wishratio::symfun {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  for (size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 0) throw parameter_error("partition parts must be non-negative");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw parameter_error("partition parts must be weakly decreasing");
  }
  while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
  weight_ = std::accumulate(parts_.begin(), parts_.end(), 0);
}

bool Partition::dominates(const Partition& other) const {
  if (weight_ != other.weight_) return false;
  int a = 0, b = 0;
  const int n = std::max(size(), other.size());
  for (int i = 0; i < n; ++i) {
    a += part(i);
    b += other.part(i);
    if (a < b) return false;
  }
  return true;
}

long Partition::rho() const {
  long s = 0;
  for (int i = 0; i < size(); ++i) {
    const long ki = parts_[static_cast<size_t>(i)];
    s += ki * (ki - (i + 1));
  }
  return s;
}

std::string Partition::to_string() const {
  std::string s = "(";
  for (int i = 0; i < size(); ++i) {
    if (i) s += ",";
    s += std::to_string(parts_[static_cast<size_t>(i)]);
  }
  return s + ")";
}

std::vector<Partition> enumerate_partitions(int k, int max_parts,
                                            std::optional<int> max_part) {
  if (k < 0) throw parameter_error("partition weight must be non-negative");
  if (max_parts < 1) throw parameter_error("max_parts must be positive");
  std::vector<Partition> out;
  if (k == 0) {
    out.emplace_back();
    return out;
  }
  const int cap = max_part.value_or(k);
  std::vector<int> cur;
  cur.reserve(static_cast<size_t>(max_parts));

  // Descending lex: always try the largest feasible next part first.
  std::function<void(int, int)> rec = [&](int remaining, int largest) {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    if (static_cast<int>(cur.size()) == max_parts) return;
    const int slots = max_parts - static_cast<int>(cur.size());
    for (int p = std::min(remaining, largest); p >= 1; --p) {
      if (static_cast<long>(p) * slots < remaining) break;  // cannot finish
      cur.push_back(p);
      rec(remaining - p, p);
      cur.pop_back();
    }
  };
  rec(k, cap);
  return out;
}

}  // namespace wishratio::symfun
