#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "npil/controller.hpp"
#include "npil/model.hpp"
#include "npil/rng.hpp"
#include "npil/trainer.hpp"

namespace npil {

/// Per-dimension search box for the nine gain parameters.
struct GainBounds {
  Vec9 lower;
  Vec9 upper;

  static GainBounds defaults();  // the standard gain search ranges

  void validate() const {
    for (int d = 0; d < 9; ++d) {
      if (!(lower[d] < upper[d])) {
        throw ConfigError("gain bounds must satisfy lower < upper per dimension");
      }
    }
  }

  bool contains(const Vec9& v) const {
    return (v.array() >= lower.array()).all() &&
           (v.array() <= upper.array()).all();
  }
};

struct PsoConfig {
  int particles = 5;
  double inertia = 0.729;        // w
  double c1 = 2.0;
  double c2 = 2.0;
  double velocity_constraint = 0.2;  // m: v_max = m * (upper - lower)
  double rho = 0.5;              // RMSE weight in the fitness
  double mu = 0.5;               // MAE weight
  GainBounds bounds = GainBounds::defaults();
  std::uint64_t seed = 0;
  bool parallel = false;         // evaluate particles on worker threads

  Vec9 velocity_max() const {
    return velocity_constraint * (bounds.upper - bounds.lower);
  }

  void validate() const {
    if (particles < 1) throw ConfigError("particle count must be >= 1");
    if (!(inertia >= 0.0) || !(c1 >= 0.0) || !(c2 >= 0.0)) {
      throw ConfigError("inertia and acceleration coefficients must be >= 0");
    }
    if (!(velocity_constraint >= 0.0)) {
      throw ConfigError("velocity constraint must be >= 0");
    }
    if (!(rho >= 0.0) || !(mu >= 0.0) || !(rho + mu > 0.0)) {
      throw ConfigError("fitness weights must be >= 0 with a positive sum");
    }
    bounds.validate();
  }
};

/// One swarm member: a gain position with kinematic state, its personal
/// best, and its own model replica plus controller memory. Each particle
/// also owns an RNG stream so results stay schedule-independent.
struct Particle {
  Vec9 position;
  Vec9 velocity;
  Vec9 pbest_position;
  double pbest_fitness = std::numeric_limits<double>::infinity();
  FactorModel model;
  ControllerState controller;
  Rng rng{0};
};

struct Swarm {
  std::vector<Particle> particles;
};

/// Positions uniform within the bounds, velocities uniform within
/// [-v_max, v_max]. Every particle replicates the same initial model so
/// fitness differences reflect gains only. Stream q derives from
/// (config.seed, q); deterministic per seed.
Swarm init_swarm(const PsoConfig& config, const FactorModel& initial);

/// Generalized validation error: rho * RMSE + mu * MAE over Ω.
double fitness(const FactorModel& model, std::span<const Entry> omega,
               double rho, double mu);

/// One kinematic update: v <- w v + c1 r1 (pbest - s) + c2 r2 (gbest - s)
/// with fresh scalar r1, r2 per call, velocity clamped to [-v_max, v_max],
/// then s <- s + v clamped to the bounds.
void step_particle(Particle& particle, const Vec9& gbest_position,
                   const PsoConfig& config, Rng& rng);

struct ParticleTraceRow {
  int iteration = 0;
  int particle = 0;
  double fitness = 0.0;
  GainVector gains;
  double relative_fitness = 0.0;  // F_q; NaN on the first iteration
};

struct SwarmResult {
  GainVector best_gains;
  FactorModel best_model;
  double best_fitness = std::numeric_limits<double>::infinity();
  std::vector<double> gbest_trace;  // gbest fitness per outer iteration
  std::vector<ParticleTraceRow> particle_trace;
  std::vector<EpochReport> reports;  // for the particle holding gbest
  StopReason stop = StopReason::max_iters;
};

/// Observer invoked at the end of each outer iteration, after pbest/gbest
/// updates and before the kinematic step.
struct IterationSnapshot {
  int iteration = 0;
  const Swarm& swarm;
  double gbest_fitness = 0.0;
  int gbest_particle = 0;
};
using EvolveObserver = std::function<void(const IterationSnapshot&)>;

/// The adaptive learning scheme: each outer iteration runs, per particle,
/// one NPID SGD epoch on its replica with its current gains, a fitness
/// evaluation on Ω, pbest/gbest updates (strict improvement, lowest index
/// wins ties), then the kinematic step. A diverged particle receives +inf
/// fitness and restarts from a fresh in-bounds position with a re-cloned
/// initial model. Terminates like the fixed-gain trainer: iteration cap, or
/// the gbest holder's validation RMSE moving less than hyper.tol.
SwarmResult evolve(FactorModel initial, const DataSplit& split,
                   const HyperParams& hyper, const PsoConfig& config,
                   std::uint64_t order_seed,
                   const EvolveObserver& observer = {});

}  // namespace npil
