#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "npil/sparse_tensor.hpp"

namespace npil {

inline constexpr Index kSecondsPerDay = 86400;

/// One raw meter sample: all channel readings for one second of one day.
/// A missing reading is an absent optional.
struct RawRow {
  Index day = 0;
  Index second = 0;
  std::vector<std::optional<double>> channels;
};

struct IngestStats {
  std::size_t duplicate_rows = 0;  // (day, second) retransmissions, last write wins
};

/// Map raw rows onto the (second-of-day x channel x day) tensor layout:
/// one entry per present channel value at (second, channel, day).
/// dim_i is always 86400; dim_k is max day index + 1.
SparseTensor3 timeseries_to_tensor(std::span<const RawRow> rows,
                                   Index channel_count,
                                   IngestStats* stats = nullptr);

/// Per-channel min-max statistics of the raw measurements. A channel whose
/// observed values are all equal (or that has no observations) is recorded
/// with min == max and normalizes to 0.
struct NormalizationParams {
  struct Channel {
    double min_raw = 0.0;
    double max_raw = 0.0;
  };
  std::vector<Channel> channels;

  const Channel& at(Index channel) const;
};

struct NormalizedTensor {
  SparseTensor3 tensor;
  NormalizationParams params;
};

/// Per-channel map of raw values onto [0, 1]: v' = (v - min) / (max - min).
NormalizedTensor normalize(const SparseTensor3& raw);

double normalize_value(double raw, Index channel, const NormalizationParams& params);

/// Inverse of normalize_value; exact for degenerate channels, within
/// floating round-off otherwise.
double denormalize(double value, Index channel, const NormalizationParams& params);

/// Uniform random subsample holding round(target_density * cell_count)
/// entries, in their original relative order. Deterministic per seed;
/// a target equal to the current density returns the tensor unchanged.
SparseTensor3 mask_to_density(const SparseTensor3& tensor, double target_density,
                              std::uint64_t seed);

}  // namespace npil
