#include "npil/sparse_tensor.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "npil/rng.hpp"

namespace npil {
namespace {

std::string entry_text(const Entry& e, std::size_t position) {
  return "record " + std::to_string(position) + " (" + std::to_string(e.i) +
         "," + std::to_string(e.j) + "," + std::to_string(e.k) + ")";
}

}  // namespace

SparseTensor3 SparseTensor3::build(Index dim_i, Index dim_j, Index dim_k,
                                   std::vector<Entry> records) {
  if (dim_i <= 0 || dim_j <= 0 || dim_k <= 0) {
    throw ConfigError("tensor dimensions must be positive");
  }
  const auto cells = static_cast<__int128>(dim_i) * dim_j * dim_k;
  if (cells > (static_cast<__int128>(1) << 62)) {
    throw ConfigError("tensor dimensions too large");
  }

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(records.size());
  for (std::size_t n = 0; n < records.size(); ++n) {
    const Entry& e = records[n];
    if (e.i < 0 || e.i >= dim_i || e.j < 0 || e.j >= dim_j || e.k < 0 ||
        e.k >= dim_k) {
      throw DataError("index out of range at " + entry_text(e, n));
    }
    if (!std::isfinite(e.value)) {
      throw DataError("non-finite value at " + entry_text(e, n));
    }
    const std::uint64_t key =
        (static_cast<std::uint64_t>(e.i) * dim_j + e.j) * dim_k + e.k;
    if (!seen.insert(key).second) {
      throw DataError("duplicate triple at " + entry_text(e, n));
    }
  }
  return SparseTensor3(dim_i, dim_j, dim_k, std::move(records));
}

double density(const SparseTensor3& tensor) {
  return static_cast<double>(tensor.size()) /
         static_cast<double>(tensor.cell_count());
}

DataSplit split(const SparseTensor3& tensor, const SplitRatio& ratio,
                std::uint64_t seed) {
  if (!(ratio.train > 0.0) || !(ratio.validation > 0.0) || !(ratio.test > 0.0)) {
    throw ConfigError("split weights must be positive");
  }
  const std::size_t n = tensor.size();
  if (n < 3) {
    throw DataError("cannot split " + std::to_string(n) +
                    " entries into 3 partitions");
  }

  std::vector<Entry> shuffled = tensor.entries();
  Rng rng(seed);
  rng.shuffle(shuffled);

  // Cumulative floors over the validation and test weights keep every set
  // within one entry of its exact share; the training set takes the
  // remainder.
  const double total = ratio.train + ratio.validation + ratio.test;
  const auto n_val = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * ratio.validation / total));
  const auto n_val_test = static_cast<std::size_t>(std::floor(
      static_cast<double>(n) * (ratio.validation + ratio.test) / total));
  const std::size_t n_test = n_val_test - n_val;
  const std::size_t n_train = n - n_val_test;

  DataSplit out;
  out.seed = seed;
  out.train.assign(shuffled.begin(), shuffled.begin() + n_train);
  out.validation.assign(shuffled.begin() + n_train,
                        shuffled.begin() + n_train + n_val);
  out.test.assign(shuffled.begin() + n_train + n_val, shuffled.end());
  return out;
}

}  // namespace npil
