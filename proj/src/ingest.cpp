#include "npil/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "npil/rng.hpp"

namespace npil {

SparseTensor3 timeseries_to_tensor(std::span<const RawRow> rows,
                                   Index channel_count, IngestStats* stats) {
  if (channel_count <= 0) throw ConfigError("channel count must be positive");
  if (rows.empty()) throw DataError("no input rows");

  IngestStats local;
  std::vector<RawRow> deduped;
  deduped.reserve(rows.size());
  std::unordered_map<std::uint64_t, std::size_t> slot_of;
  slot_of.reserve(rows.size());

  Index max_day = 0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const RawRow& row = rows[n];
    if (row.second < 0 || row.second >= kSecondsPerDay) {
      throw DataError("row " + std::to_string(n) + ": second " +
                      std::to_string(row.second) + " out of [0, 86399]");
    }
    if (row.day < 0) {
      throw DataError("row " + std::to_string(n) + ": negative day index");
    }
    if (static_cast<Index>(row.channels.size()) != channel_count) {
      throw DataError("row " + std::to_string(n) + ": expected " +
                      std::to_string(channel_count) + " channel values, got " +
                      std::to_string(row.channels.size()));
    }
    max_day = std::max(max_day, row.day);
    const std::uint64_t key =
        static_cast<std::uint64_t>(row.day) * kSecondsPerDay + row.second;
    auto [it, inserted] = slot_of.emplace(key, deduped.size());
    if (inserted) {
      deduped.push_back(row);
    } else {
      deduped[it->second] = row;  // retransmission: last write wins
      ++local.duplicate_rows;
    }
  }

  std::vector<Entry> entries;
  for (const RawRow& row : deduped) {
    for (Index j = 0; j < channel_count; ++j) {
      if (row.channels[j].has_value()) {
        entries.push_back({row.second, j, row.day, *row.channels[j]});
      }
    }
  }
  if (stats != nullptr) *stats = local;
  return SparseTensor3::build(kSecondsPerDay, channel_count, max_day + 1,
                              std::move(entries));
}

const NormalizationParams::Channel& NormalizationParams::at(Index channel) const {
  if (channel < 0 || channel >= static_cast<Index>(channels.size())) {
    throw DataError("unknown channel " + std::to_string(channel));
  }
  return channels[channel];
}

NormalizedTensor normalize(const SparseTensor3& raw) {
  if (raw.size() == 0) throw DataError("cannot normalize an empty tensor");

  NormalizationParams params;
  params.channels.assign(raw.dim_j(), {});
  std::vector<bool> seen(raw.dim_j(), false);
  for (const Entry& e : raw.entries()) {
    auto& ch = params.channels[e.j];
    if (!seen[e.j]) {
      ch.min_raw = ch.max_raw = e.value;
      seen[e.j] = true;
    } else {
      ch.min_raw = std::min(ch.min_raw, e.value);
      ch.max_raw = std::max(ch.max_raw, e.value);
    }
  }

  std::vector<Entry> scaled = raw.entries();
  for (Entry& e : scaled) e.value = normalize_value(e.value, e.j, params);
  return {SparseTensor3::build(raw.dim_i(), raw.dim_j(), raw.dim_k(),
                               std::move(scaled)),
          std::move(params)};
}

double normalize_value(double raw, Index channel,
                       const NormalizationParams& params) {
  const auto& ch = params.at(channel);
  if (ch.max_raw == ch.min_raw) return 0.0;
  return (raw - ch.min_raw) / (ch.max_raw - ch.min_raw);
}

double denormalize(double value, Index channel,
                   const NormalizationParams& params) {
  const auto& ch = params.at(channel);
  return ch.min_raw + value * (ch.max_raw - ch.min_raw);
}

SparseTensor3 mask_to_density(const SparseTensor3& tensor, double target_density,
                              std::uint64_t seed) {
  if (!(target_density > 0.0)) throw ConfigError("target density must be positive");
  const auto target = static_cast<std::size_t>(
      std::llround(target_density * static_cast<double>(tensor.cell_count())));
  const std::size_t n = tensor.size();
  if (target > n) {
    throw DataError("target density " + format_double(target_density) + " (" +
                    std::to_string(target) + " entries) exceeds current " +
                    std::to_string(n) + " entries");
  }
  if (target == n) {
    return SparseTensor3::build(tensor.dim_i(), tensor.dim_j(), tensor.dim_k(),
                                tensor.entries());
  }

  // Partial Fisher-Yates: after `target` steps the tail holds the sample.
  std::vector<std::uint32_t> index(n);
  for (std::size_t t = 0; t < n; ++t) index[t] = static_cast<std::uint32_t>(t);
  Rng rng(seed);
  std::vector<std::uint32_t> chosen(target);
  for (std::size_t t = 0; t < target; ++t) {
    const std::size_t pick = rng.below(n - t);
    chosen[t] = index[pick];
    index[pick] = index[n - 1 - t];
  }
  std::sort(chosen.begin(), chosen.end());

  std::vector<Entry> kept;
  kept.reserve(target);
  for (std::uint32_t idx : chosen) kept.push_back(tensor.entries()[idx]);
  return SparseTensor3::build(tensor.dim_i(), tensor.dim_j(), tensor.dim_k(),
                              std::move(kept));
}

}  // namespace npil
