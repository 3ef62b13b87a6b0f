#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "npil/controller.hpp"
#include "npil/model.hpp"
#include "npil/rng.hpp"
#include "npil/sparse_tensor.hpp"

namespace npil {

enum class EpochStatus { ok, diverged };

enum class StopReason { converged, max_iters, diverged };

std::string to_string(StopReason reason);

struct EpochReport {
  int epoch = 0;
  double train_loss = 0.0;
  double val_rmse = 0.0;
  double val_mae = 0.0;
  double seconds = 0.0;  // wall clock; the one non-reproducible field
};

/// Shuffle seed for one epoch, shared by the fixed-gain trainer and the
/// swarm so their training trajectories are comparable step for step.
inline std::uint64_t epoch_order_seed(std::uint64_t order_seed, int epoch) {
  return derive_seed(order_seed, static_cast<std::uint64_t>(epoch));
}

/// One SGD pass over the training set in a seeded-shuffle order. For each
/// entry all six parameter blocks are updated simultaneously from their
/// pre-update values:
///   a_ir += η(e b_jr c_kr - λ a_ir)   (b, c analogous)
///   u_i  += η(e - λ u_i)              (f, d analogous)
/// Returns diverged as soon as a non-finite error or parameter shows up.
EpochStatus sgd_epoch_plain(FactorModel& model, std::span<const Entry> train,
                            double eta, double lambda, std::uint64_t order_seed);

/// Same pass with every instant error replaced by its NPID refinement.
/// Advances the controller's epoch counter once.
EpochStatus sgd_epoch_npid(FactorModel& model, std::span<const Entry> train,
                           double eta, double lambda, const GainVector& gains,
                           ControllerState& state, std::uint64_t order_seed);

struct SgdPlain {};

struct SgdNpid {
  GainVector gains;
};

using Optimizer = std::variant<SgdPlain, SgdNpid>;

struct TrainResult {
  FactorModel model;
  std::vector<EpochReport> reports;
  StopReason stop = StopReason::max_iters;
};

/// Run epochs until the iteration cap, until the validation RMSE moves by
/// less than `tol` between two consecutive epochs, or until divergence
/// (in which case the last finite model is returned).
TrainResult train(FactorModel initial, const DataSplit& split,
                  const HyperParams& hyper, const Optimizer& optimizer,
                  std::uint64_t order_seed);

}  // namespace npil
