#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "npil/common.hpp"

namespace npil {

/// One observed cell of a third-order sparse tensor. Indices are zero-based.
struct Entry {
  Index i = 0;
  Index j = 0;
  Index k = 0;
  double value = 0.0;

  bool operator==(const Entry&) const = default;
};

/// Immutable COO store of the observed cells of an incomplete third-order
/// tensor. Validated on construction: indices in range, no duplicate
/// (i,j,k) triple, all values finite. Safe to share read-only across
/// threads once built.
class SparseTensor3 {
 public:
  static SparseTensor3 build(Index dim_i, Index dim_j, Index dim_k,
                             std::vector<Entry> records);

  Index dim_i() const { return dim_i_; }
  Index dim_j() const { return dim_j_; }
  Index dim_k() const { return dim_k_; }

  /// Total number of cells, observed or not.
  std::int64_t cell_count() const {
    return static_cast<std::int64_t>(dim_i_) * dim_j_ * dim_k_;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  SparseTensor3(Index di, Index dj, Index dk, std::vector<Entry> entries)
      : dim_i_(di), dim_j_(dj), dim_k_(dk), entries_(std::move(entries)) {}

  Index dim_i_;
  Index dim_j_;
  Index dim_k_;
  std::vector<Entry> entries_;
};

/// Fraction of cells observed, in (0, 1] for a non-empty tensor.
double density(const SparseTensor3& tensor);

/// Relative weights of the train/validation/test partition.
struct SplitRatio {
  double train = 8.0;
  double validation = 1.0;
  double test = 1.0;
};

/// Disjoint train (Λ) / validation (Ω) / test (Ψ) partition of a tensor's
/// entries. Union of the three sets equals the source entry set.
struct DataSplit {
  std::vector<Entry> train;
  std::vector<Entry> validation;
  std::vector<Entry> test;
  std::uint64_t seed = 0;
};

/// Seeded shuffle followed by a cumulative-ratio partition. Set sizes are
/// floor(n * weight / total) for validation and test; the remainder goes to
/// the training set. Deterministic for a fixed (tensor, ratio, seed).
DataSplit split(const SparseTensor3& tensor, const SplitRatio& ratio,
                std::uint64_t seed);

}  // namespace npil
