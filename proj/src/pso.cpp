#include "npil/pso.hpp"

#include <chrono>
#include <cmath>
#include <future>

#include "npil/metrics.hpp"

namespace npil {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec9 draw_position(const GainBounds& bounds, Rng& rng) {
  Vec9 s;
  for (int d = 0; d < 9; ++d) {
    s[d] = rng.uniform(bounds.lower[d], bounds.upper[d]);
  }
  return s;
}

Vec9 draw_velocity(const Vec9& vmax, Rng& rng) {
  Vec9 v;
  for (int d = 0; d < 9; ++d) {
    v[d] = rng.uniform(-vmax[d], vmax[d]);
  }
  return v;
}

struct Evaluation {
  double fit = kInf;
  double val_rmse = 0.0;
  double val_mae = 0.0;
  Vec9 trained_position;  // the gains this iteration actually trained with
};

}  // namespace

GainBounds GainBounds::defaults() {
  GainBounds b;
  b.lower << 2.0, 0.001, 0.001, 0.0, 0.001, 0.0, 0.001, 0.001, 0.001;
  b.upper << 6.0, 0.5, 0.01, 0.001, 0.01, 0.001, 0.01, 0.5, 0.01;
  return b;
}

Swarm init_swarm(const PsoConfig& config, const FactorModel& initial) {
  config.validate();
  const Vec9 vmax = config.velocity_max();
  Swarm swarm;
  swarm.particles.reserve(config.particles);
  for (int q = 0; q < config.particles; ++q) {
    Particle p;
    p.rng = Rng(derive_seed(config.seed, static_cast<std::uint64_t>(q)));
    p.position = draw_position(config.bounds, p.rng);
    p.velocity = draw_velocity(vmax, p.rng);
    p.pbest_position = p.position;
    p.model = initial;
    swarm.particles.push_back(std::move(p));
  }
  return swarm;
}

double fitness(const FactorModel& model, std::span<const Entry> omega,
               double rho, double mu) {
  const EvalReport ev = evaluate(model, omega);
  return rho * ev.rmse + mu * ev.mae;
}

void step_particle(Particle& particle, const Vec9& gbest_position,
                   const PsoConfig& config, Rng& rng) {
  const Vec9 vmax = config.velocity_max();
  const double r1 = rng.uniform01();
  const double r2 = rng.uniform01();
  particle.velocity =
      (config.inertia * particle.velocity +
       config.c1 * r1 * (particle.pbest_position - particle.position) +
       config.c2 * r2 * (gbest_position - particle.position))
          .cwiseMin(vmax)
          .cwiseMax(-vmax);
  particle.position = (particle.position + particle.velocity)
                          .cwiseMin(config.bounds.upper)
                          .cwiseMax(config.bounds.lower);
}

SwarmResult evolve(FactorModel initial, const DataSplit& split,
                   const HyperParams& hyper, const PsoConfig& config,
                   std::uint64_t order_seed, const EvolveObserver& observer) {
  hyper.validate();
  config.validate();
  if (split.train.empty()) throw DataError("empty training set");
  if (split.validation.empty()) throw DataError("empty validation set");

  Swarm swarm = init_swarm(config, initial);
  const int q_count = config.particles;

  SwarmResult result;
  result.best_model = initial;
  Vec9 gbest_position = swarm.particles[0].position;
  int gbest_index = 0;

  // Trains one particle for one epoch and evaluates it. On divergence the
  // particle restarts (fresh position and velocity from its own stream,
  // re-cloned initial model, cleared controller memory); the fresh replica
  // is still evaluated so reports stay finite, but its fitness this
  // iteration is +inf.
  const auto run_particle = [&](Particle& p, int iteration) -> Evaluation {
    Evaluation ev;
    ev.trained_position = p.position;
    const GainVector gains = GainVector::from_vector(p.position);
    const EpochStatus status =
        sgd_epoch_npid(p.model, split.train, hyper.eta, hyper.lambda, gains,
                       p.controller, epoch_order_seed(order_seed, iteration));
    const bool diverged = status == EpochStatus::diverged;
    if (diverged) {
      p.model = initial;
      p.controller.clear();
      p.position = draw_position(config.bounds, p.rng);
      p.velocity = draw_velocity(config.velocity_max(), p.rng);
    }
    const EvalReport report = evaluate(p.model, split.validation);
    ev.val_rmse = report.rmse;
    ev.val_mae = report.mae;
    if (!diverged) ev.fit = config.rho * report.rmse + config.mu * report.mae;
    return ev;
  };

  double prev_monitored = 0.0;
  double prev_last_fit = kInf;  // I_Q of the previous iteration
  for (int iteration = 1; iteration <= hyper.max_iters; ++iteration) {
    const auto start = std::chrono::steady_clock::now();

    std::vector<Evaluation> evals(q_count);
    if (config.parallel && q_count > 1) {
      std::vector<std::future<Evaluation>> jobs;
      jobs.reserve(q_count);
      for (int q = 0; q < q_count; ++q) {
        jobs.push_back(std::async(std::launch::async, run_particle,
                                  std::ref(swarm.particles[q]), iteration));
      }
      for (int q = 0; q < q_count; ++q) evals[q] = jobs[q].get();
    } else {
      for (int q = 0; q < q_count; ++q) {
        evals[q] = run_particle(swarm.particles[q], iteration);
      }
    }

    // Ordered reduction: pbest, then gbest by ascending particle index.
    for (int q = 0; q < q_count; ++q) {
      Particle& p = swarm.particles[q];
      if (evals[q].fit < p.pbest_fitness) {
        p.pbest_fitness = evals[q].fit;
        p.pbest_position = evals[q].trained_position;
      }
    }
    for (int q = 0; q < q_count; ++q) {
      if (evals[q].fit < result.best_fitness) {
        result.best_fitness = evals[q].fit;
        gbest_position = evals[q].trained_position;
        gbest_index = q;
        result.best_model = swarm.particles[q].model;
      }
    }
    result.gbest_trace.push_back(result.best_fitness);

    const double last_fit = evals[q_count - 1].fit;
    for (int q = 0; q < q_count; ++q) {
      const double above = q == 0 ? prev_last_fit : evals[q - 1].fit;
      ParticleTraceRow row;
      row.iteration = iteration;
      row.particle = q;
      row.fitness = evals[q].fit;
      row.gains = GainVector::from_vector(evals[q].trained_position);
      row.relative_fitness = (evals[q].fit - above) / (last_fit - prev_last_fit);
      result.particle_trace.push_back(row);
    }
    prev_last_fit = last_fit;

    EpochReport report;
    report.epoch = iteration;
    report.train_loss =
        loss(swarm.particles[gbest_index].model, split.train, hyper.lambda);
    report.val_rmse = evals[gbest_index].val_rmse;
    report.val_mae = evals[gbest_index].val_mae;
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.reports.push_back(report);

    if (observer) {
      observer(IterationSnapshot{iteration, swarm, result.best_fitness,
                                 gbest_index});
    }

    const double monitored = evals[gbest_index].val_rmse;
    if (iteration >= 2 && std::abs(monitored - prev_monitored) < hyper.tol) {
      result.stop = StopReason::converged;
      break;
    }
    prev_monitored = monitored;

    for (Particle& p : swarm.particles) {
      step_particle(p, gbest_position, config, p.rng);
    }
  }

  result.best_gains = GainVector::from_vector(gbest_position);
  return result;
}

}  // namespace npil
