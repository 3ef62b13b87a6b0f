#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npil/ingest.hpp"
#include "npil/model.hpp"
#include "npil/pso.hpp"
#include "npil/sparse_tensor.hpp"
#include "npil/trainer.hpp"

namespace npil {

/// COO text format: `#` comment lines (this library writes a `# dims i j k`
/// comment so dimensions survive a round trip), a `i,j,k,value` header,
/// then one record per line. UTF-8, LF newlines. Values are written as
/// shortest round-trip decimals, so a write/read cycle is bit-exact.
SparseTensor3 read_coo(const std::filesystem::path& path);
void write_coo(const std::filesystem::path& path, const SparseTensor3& tensor,
               std::span<const std::string> comments = {});

/// Versioned textual model format:
///   npil-model v1
///   dims <i> <j> <k> rank <R>
///   A, B, C row-major, one row per line; then u, f, d one line each;
///   then an optional `normalization <n>` section of `channel,min,max`
///   lines. `#` comments may appear after the version line.
struct ModelFile {
  FactorModel model;
  std::optional<NormalizationParams> params;
};

void save_model(const std::filesystem::path& path, const FactorModel& model,
                const NormalizationParams* params = nullptr,
                std::span<const std::string> comments = {});
ModelFile load_model(const std::filesystem::path& path);

/// Params sidecar: one `channel_index,min,max` line per channel.
void write_params(const std::filesystem::path& path,
                  const NormalizationParams& params,
                  std::span<const std::string> comments = {});
NormalizationParams read_params(const std::filesystem::path& path);

/// Raw meter CSV: header `day,second,<channel-name>...`, one sample per
/// line, an empty field marking a missing reading.
struct RawSeries {
  std::vector<RawRow> rows;
  std::vector<std::string> channel_names;
};
RawSeries read_raw_csv(const std::filesystem::path& path);

void write_epoch_csv(const std::filesystem::path& path,
                     std::span<const EpochReport> reports,
                     std::span<const std::string> comments = {});

void write_swarm_csv(const std::filesystem::path& path,
                     std::span<const ParticleTraceRow> trace,
                     std::span<const std::string> comments = {});

}  // namespace npil
