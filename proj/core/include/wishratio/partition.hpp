#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wishratio::symfun {

/// Weakly decreasing tuple of positive integers (trailing zeros stripped).
/// The empty partition has weight 0.
class Partition {
 public:
  Partition() = default;

  /// Accepts any weakly decreasing sequence of non-negative integers;
  /// throws parameter_error otherwise.
  explicit Partition(std::vector<int> parts);

  int weight() const { return weight_; }
  int size() const { return static_cast<int>(parts_.size()); }  // nonzero parts
  bool empty() const { return parts_.empty(); }

  /// part(i) for i >= size() is 0.
  int part(int i) const { return i < size() ? parts_[static_cast<size_t>(i)] : 0; }
  const std::vector<int>& parts() const { return parts_; }

  /// Dominance order within a weight class: sum_{i<=t} this_i >= sum_{i<=t} other_i
  /// for all t. Requires equal weights.
  bool dominates(const Partition& other) const;

  /// rho = sum_i k_i (k_i - i), strictly increasing along dominance.
  long rho() const;

  std::string to_string() const;

  bool operator==(const Partition&) const = default;
  /// Lexicographic; within a weight class this refines dominance downward.
  std::strong_ordering operator<=>(const Partition& other) const {
    return std::lexicographical_compare_three_way(
        parts_.begin(), parts_.end(), other.parts_.begin(), other.parts_.end());
  }

 private:
  std::vector<int> parts_;
  int weight_ = 0;
};

struct PartitionHash {
  std::size_t operator()(const Partition& p) const {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (int v : p.parts()) h = h * 1099511628211ull ^ static_cast<std::size_t>(v);
    return h;
  }
};

/// All partitions of k with at most max_parts parts and (optionally) largest
/// part <= max_part, in descending lexicographic order. k = 0 yields the
/// empty partition.
std::vector<Partition> enumerate_partitions(int k, int max_parts,
                                            std::optional<int> max_part = std::nullopt);

}  // namespace wishratio::symfun
