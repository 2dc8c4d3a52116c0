#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "stable_forms/errors.hpp"

namespace stable_forms {

inline constexpr int kMaxDim = 7;

/// Bit set of 0-based indices; bit i set means θ_{i+1} is a factor.
using IndexMask = std::uint32_t;

constexpr int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Lexicographic enumeration of the strictly increasing k-subsets of {0..n-1}.
struct BasisTable {
  std::vector<IndexMask> masks;
  std::array<int, 1 << kMaxDim> position{};  // -1 when the mask has the wrong popcount
};

namespace detail {

inline BasisTable build_basis(int n, int k) {
  BasisTable t;
  t.position.fill(-1);
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    IndexMask m = 0;
    for (int i : idx) m |= IndexMask{1} << i;
    t.position[m] = static_cast<int>(t.masks.size());
    t.masks.push_back(m);
    int p = k - 1;
    while (p >= 0 && idx[static_cast<std::size_t>(p)] == n - k + p) --p;
    if (p < 0) break;
    ++idx[static_cast<std::size_t>(p)];
    for (int q = p + 1; q < k; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
  }
  return t;
}

}  // namespace detail

inline const BasisTable& basis_table(int n, int k) {
  static const auto tables = [] {
    std::array<std::array<BasisTable, kMaxDim + 1>, kMaxDim + 1> all{};
    for (int n = 0; n <= kMaxDim; ++n)
      for (int k = 0; k <= n; ++k) all[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] = detail::build_basis(n, k);
    return all;
  }();
  if (n < 0 || n > kMaxDim) throw DimError("dimension " + std::to_string(n) + " out of range");
  if (k < 0 || k > n) throw DegreeError("degree " + std::to_string(k) + " out of range for dimension " + std::to_string(n));
  return tables[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// Sign of θ_A ∧ θ_B relative to θ_{A∪B} in increasing order; 0 if A and B overlap.
constexpr int wedge_sign(IndexMask a, IndexMask b) {
  if (a & b) return 0;
  int swaps = 0;
  while (b) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    swaps += std::popcount(a >> (j + 1));  // elements of A above j must pass θ_j
  }
  return (swaps & 1) ? -1 : 1;
}

/// Strictly increasing sequence of 0-based indices naming a basis monomial.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(IndexMask mask) : mask_(mask) {}

  /// Builds from 1-based indices, which must be strictly increasing.
  static MultiIndex from_one_based(const std::vector<int>& idx, int dim) {
    IndexMask m = 0;
    int prev = 0;
    for (int i : idx) {
      if (i <= prev) throw ParseError("multi-index must be strictly increasing");
      if (i > dim) throw ParseError("index " + std::to_string(i) + " exceeds dimension " + std::to_string(dim));
      m |= IndexMask{1} << (i - 1);
      prev = i;
    }
    return MultiIndex(m);
  }

  IndexMask mask() const { return mask_; }
  int size() const { return std::popcount(mask_); }

  std::vector<int> zero_based() const {
    std::vector<int> out;
    for (IndexMask m = mask_; m; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }

  std::vector<int> one_based() const {
    auto v = zero_based();
    for (auto& i : v) ++i;
    return v;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  IndexMask mask_ = 0;
};

}  // namespace stable_forms
