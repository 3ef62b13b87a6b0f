#pragma once

#include <cstdint>

#include "npil/model.hpp"
#include "npil/sparse_tensor.hpp"

namespace npil {

/// Shape of a synthetic ground-truth model: factors i.i.d. uniform on
/// (0, factor_max], biases uniform on [0, bias_max].
struct SyntheticSpec {
  Index dim_i = 50;
  Index dim_j = 8;
  Index dim_k = 30;
  Index rank = 5;
  double factor_max = 0.5;
  double bias_max = 0.1;
};

FactorModel random_ground_truth(const SyntheticSpec& spec, std::uint64_t seed);

/// Every cell of the model's reconstruction, in (i, j, k) lexicographic
/// order, with optional i.i.d. Gaussian noise.
SparseTensor3 synthesize_full(const FactorModel& truth, double noise_sigma,
                              std::uint64_t noise_seed);

}  // namespace npil
