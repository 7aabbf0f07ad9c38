#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace mlcoal {

using Size = std::uint64_t;

/// Union-find over 0..n-1 with union by size and path halving.
class DisjointSets {
 public:
  explicit DisjointSets(Size n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), Size{0});
  }

  Size find(Size x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Size of the set whose root is `root`.
  Size root_size(Size root) const { return size_[root]; }

  /// Joins two distinct roots; returns the surviving root.
  Size unite_roots(Size a, Size b) {
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

  Size elements() const { return parent_.size(); }

 private:
  std::vector<Size> parent_;
  std::vector<Size> size_;
};

}  // namespace mlcoal
