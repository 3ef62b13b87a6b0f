// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Expected values marked "reference run" were produced by
// independent implementations before the library was built and are frozen
// here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "npil/controller.hpp"
#include "npil/ingest.hpp"
#include "npil/io.hpp"
#include "npil/metrics.hpp"
#include "npil/model.hpp"
#include "npil/pso.hpp"
#include "npil/rng.hpp"
#include "npil/sparse_tensor.hpp"
#include "npil/synthetic.hpp"
#include "npil/trainer.hpp"

using namespace npil;

namespace {

int g_failures = 0;

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

void run_criterion(int number, const char* label, double time_limit_s,
                   const std::function<void(Checker&)>& body) {
  Checker check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& err) {
    check.require(false, std::string("exception: ") + err.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  check.require(seconds < time_limit_s,
                "runtime " + format_double(seconds) + "s exceeds limit");
  if (check.ok) {
    std::printf("[PASS] criterion %d: %s (%.2fs)\n", number, label, seconds);
  } else {
    std::printf("[FAIL] criterion %d: %s (%.2fs) -- %s\n", number, label,
                seconds, check.detail.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

bool bits_equal(const double* a, const double* b, std::size_t n) {
  return std::memcmp(a, b, n * sizeof(double)) == 0;
}

bool bits_equal(const FactorModel& x, const FactorModel& y) {
  return x.same_shape(y) && bits_equal(x.A.data(), y.A.data(), x.A.size()) &&
         bits_equal(x.B.data(), y.B.data(), x.B.size()) &&
         bits_equal(x.C.data(), y.C.data(), x.C.size()) &&
         bits_equal(x.u.data(), y.u.data(), x.u.size()) &&
         bits_equal(x.f.data(), y.f.data(), x.f.size()) &&
         bits_equal(x.d.data(), y.d.data(), x.d.size());
}

FactorModel random_model(Index di, Index dj, Index dk, Index rank, Rng& rng) {
  FactorModel m;
  m.A.resize(di, rank);
  m.B.resize(dj, rank);
  m.C.resize(dk, rank);
  m.u.resize(di);
  m.f.resize(dj);
  m.d.resize(dk);
  for (Eigen::Index n = 0; n < m.A.size(); ++n) m.A.data()[n] = rng.uniform(-1, 1);
  for (Eigen::Index n = 0; n < m.B.size(); ++n) m.B.data()[n] = rng.uniform(-1, 1);
  for (Eigen::Index n = 0; n < m.C.size(); ++n) m.C.data()[n] = rng.uniform(-1, 1);
  for (Eigen::Index n = 0; n < di; ++n) m.u[n] = rng.uniform(-1, 1);
  for (Eigen::Index n = 0; n < dj; ++n) m.f[n] = rng.uniform(-1, 1);
  for (Eigen::Index n = 0; n < dk; ++n) m.d[n] = rng.uniform(-1, 1);
  return m;
}

SparseTensor3 random_tensor(Index di, Index dj, Index dk, std::size_t n,
                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint64_t> cells(static_cast<std::size_t>(di) * dj * dk);
  std::iota(cells.begin(), cells.end(), 0ull);
  rng.shuffle(cells);
  std::vector<Entry> entries;
  entries.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::uint64_t c = cells[t];
    entries.push_back(
        {static_cast<Index>(c / (static_cast<std::uint64_t>(dj) * dk)),
         static_cast<Index>((c / dk) % dj), static_cast<Index>(c % dk),
         rng.uniform01()});
  }
  return SparseTensor3::build(di, dj, dk, std::move(entries));
}

// Long-double scalar loss, the finite-difference oracle's evaluation core.
long double loss_oracle(const FactorModel& m, const Entry& en, double lambda) {
  long double pred = 0.0L;
  long double reg = 0.0L;
  for (Index r = 0; r < m.rank(); ++r) {
    pred += static_cast<long double>(m.A(en.i, r)) * m.B(en.j, r) * m.C(en.k, r);
    reg += static_cast<long double>(m.A(en.i, r)) * m.A(en.i, r) +
           static_cast<long double>(m.B(en.j, r)) * m.B(en.j, r) +
           static_cast<long double>(m.C(en.k, r)) * m.C(en.k, r);
  }
  pred += m.u[en.i] + m.f[en.j] + m.d[en.k];
  reg += static_cast<long double>(m.u[en.i]) * m.u[en.i] +
         static_cast<long double>(m.f[en.j]) * m.f[en.j] +
         static_cast<long double>(m.d[en.k]) * m.d[en.k];
  const long double e = en.value - pred;
  return 0.5L * (e * e + lambda * reg);
}

GainVector midrange_gains() {
  GainVector g;
  g.kp1 = 4.0;
  g.kp2 = 0.2505;
  g.kp3 = 0.0055;
  g.ki1 = 0.0005;
  g.ki2 = 0.0055;
  g.kd1 = 0.0005;
  g.kd2 = 0.0055;
  g.kd3 = 0.2505;
  g.kd4 = 0.0055;
  return g;
}

// ---------------------------------------------------------------- 1
void gradient_oracle(Checker& check) {
  Rng rng(1001);
  int instances = 0;
  while (instances < 50) {
    const Index di = 2 + static_cast<Index>(rng.below(4));
    const Index dj = 2 + static_cast<Index>(rng.below(4));
    const Index dk = 2 + static_cast<Index>(rng.below(4));
    const Index rank = 1 + static_cast<Index>(rng.below(3));
    const double lambda = instances % 2 == 0 ? 0.0 : 0.01;
    FactorModel m = random_model(di, dj, dk, rank, rng);
    ++instances;

    const Entry entry{static_cast<Index>(rng.below(di)),
                      static_cast<Index>(rng.below(dj)),
                      static_cast<Index>(rng.below(dk)), rng.uniform01()};
    const double e = instant_error(m, entry);
    const double h = 1e-6;

    const auto fd_matches = [&](double* param, double analytic) {
      const double saved = *param;
      *param = saved + h;
      const long double up = loss_oracle(m, entry, lambda);
      *param = saved - h;
      const long double down = loss_oracle(m, entry, lambda);
      *param = saved;
      const double fd = static_cast<double>((up - down) / (2.0L * h));
      const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-4});
      return std::abs(fd - analytic) < 1e-6 * scale;
    };

    bool all_ok = true;
    for (Index r = 0; r < rank; ++r) {
      all_ok &= fd_matches(&m.A(entry.i, r), -(e * m.B(entry.j, r) * m.C(entry.k, r) -
                                               lambda * m.A(entry.i, r)));
      all_ok &= fd_matches(&m.B(entry.j, r), -(e * m.A(entry.i, r) * m.C(entry.k, r) -
                                               lambda * m.B(entry.j, r)));
      all_ok &= fd_matches(&m.C(entry.k, r), -(e * m.A(entry.i, r) * m.B(entry.j, r) -
                                               lambda * m.C(entry.k, r)));
    }
    all_ok &= fd_matches(&m.u[entry.i], -(e - lambda * m.u[entry.i]));
    all_ok &= fd_matches(&m.f[entry.j], -(e - lambda * m.f[entry.j]));
    all_ok &= fd_matches(&m.d[entry.k], -(e - lambda * m.d[entry.k]));
    check.require(all_ok, "gradient mismatch in instance " +
                              std::to_string(instances));
    if (!check.ok) return;
  }
}

// ---------------------------------------------------------------- 2
void controller_identity(Checker& check) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng dims_rng(2000 + seed);
    const Index di = 4 + static_cast<Index>(dims_rng.below(8));
    const Index dj = 3 + static_cast<Index>(dims_rng.below(5));
    const Index dk = 3 + static_cast<Index>(dims_rng.below(5));
    const std::size_t cells = static_cast<std::size_t>(di) * dj * dk;
    auto tensor = random_tensor(di, dj, dk, cells / 2, 3000 + seed);
    auto data = split(tensor, {8, 1, 1}, 4000 + seed);
    auto initial = init_model(di, dj, dk, 3, 5000 + seed);

    HyperParams hyper;
    hyper.eta = 0.01;
    hyper.lambda = 0.001;
    hyper.rank = 3;
    hyper.max_iters = 20;
    hyper.tol = 1e-300;

    const auto plain = train(initial, data, hyper, SgdPlain{}, 6000 + seed);
    const auto npid = train(initial, data, hyper,
                            SgdNpid{GainVector::identity_reduction()}, 6000 + seed);

    check.require(bits_equal(plain.model, npid.model),
                  "models differ for instance " + std::to_string(seed));
    check.require(plain.reports.size() == 20 && npid.reports.size() == 20,
                  "expected 20 epochs");
    for (std::size_t n = 0; n < plain.reports.size() && check.ok; ++n) {
      check.require(plain.reports[n].train_loss == npid.reports[n].train_loss &&
                        plain.reports[n].val_rmse == npid.reports[n].val_rmse &&
                        plain.reports[n].val_mae == npid.reports[n].val_mae,
                    "epoch report differs for instance " + std::to_string(seed));
    }
    if (!check.ok) return;
  }
}

// ---------------------------------------------------------------- 3
void replay_oracle(Checker& check) {
  auto tensor = SparseTensor3::build(
      3, 3, 3, {{0, 0, 0, 0.9}, {1, 1, 1, 0.3}, {2, 2, 2, 0.6}});
  auto model = init_model(3, 3, 3, 2, 71);
  FactorModel replay = model;  // same starting point, scalar arithmetic below

  const GainVector g = midrange_gains();
  const double eta = 0.02, lambda = 0.01;
  const std::uint64_t seed = epoch_order_seed(72, 1);

  ControllerState state;
  const EpochStatus status =
      sgd_epoch_npid(model, tensor.entries(), eta, lambda, g, state, seed);
  check.require(status == EpochStatus::ok, "epoch diverged");

  // independent scalar replay of the refined-error update rules
  std::vector<std::uint32_t> order(tensor.size());
  std::iota(order.begin(), order.end(), 0u);
  Rng order_rng(seed);
  order_rng.shuffle(order);

  std::vector<double> integral(tensor.size(), 0.0);
  std::vector<double> prev(tensor.size(), 0.0);
  for (const std::uint32_t idx : order) {
    const Entry& en = tensor.entries()[idx];
    double pred = replay.u[en.i] + replay.f[en.j] + replay.d[en.k];
    for (Index r = 0; r < replay.rank(); ++r) {
      pred += replay.A(en.i, r) * replay.B(en.j, r) * replay.C(en.k, r);
    }
    const double e = en.value - pred;
    integral[idx] += e;
    const double kp =
        g.kp1 + g.kp2 * (1.0 - 2.0 / (std::exp(g.kp3 * e) + std::exp(-g.kp3 * e)));
    const double ki =
        g.ki1 * (2.0 / (std::exp(g.ki2 * e) + std::exp(-g.ki2 * e)));
    const double kd = g.kd1 + g.kd2 / (1.0 + g.kd3 * std::exp(g.kd4 * e));
    const double ee = kp * e + ki * integral[idx] + kd * (e - prev[idx]);
    prev[idx] = e;

    const Eigen::RowVectorXd a = replay.A.row(en.i);
    const Eigen::RowVectorXd b = replay.B.row(en.j);
    const Eigen::RowVectorXd c = replay.C.row(en.k);
    for (Index r = 0; r < replay.rank(); ++r) {
      replay.A(en.i, r) = a[r] + eta * (ee * b[r] * c[r] - lambda * a[r]);
      replay.B(en.j, r) = b[r] + eta * (ee * a[r] * c[r] - lambda * b[r]);
      replay.C(en.k, r) = c[r] + eta * (ee * a[r] * b[r] - lambda * c[r]);
    }
    replay.u[en.i] += eta * (ee - lambda * replay.u[en.i]);
    replay.f[en.j] += eta * (ee - lambda * replay.f[en.j]);
    replay.d[en.k] += eta * (ee - lambda * replay.d[en.k]);
  }

  const auto close = [&](const double* a, const double* b, std::size_t n) {
    for (std::size_t t = 0; t < n; ++t) {
      if (std::abs(a[t] - b[t]) > 1e-12) return false;
    }
    return true;
  };
  check.require(close(model.A.data(), replay.A.data(), model.A.size()) &&
                    close(model.B.data(), replay.B.data(), model.B.size()) &&
                    close(model.C.data(), replay.C.data(), model.C.size()) &&
                    close(model.u.data(), replay.u.data(), model.u.size()) &&
                    close(model.f.data(), replay.f.data(), model.f.size()) &&
                    close(model.d.data(), replay.d.data(), model.d.size()),
                "replayed parameters deviate by more than 1e-12");
}

// shared synthetic instance for criteria 4 and 5
struct SyntheticCase {
  SparseTensor3 tensor;
  DataSplit data;
  FactorModel initial;
};

SyntheticCase make_synthetic(std::uint64_t master) {
  SyntheticSpec spec;  // 50 x 8 x 30, rank 5
  const FactorModel truth = random_ground_truth(spec, derive_seed(master, 10));
  SparseTensor3 full = synthesize_full(truth, 0.01, derive_seed(master, 11));
  SparseTensor3 masked = mask_to_density(full, 0.10, derive_seed(master, 12));
  DataSplit data = split(masked, {8, 1, 1}, derive_seed(master, 13));
  FactorModel initial =
      init_model(spec.dim_i, spec.dim_j, spec.dim_k, 5, derive_seed(master, 14));
  return {std::move(masked), std::move(data), std::move(initial)};
}

// ---------------------------------------------------------------- 4
void synthetic_recovery(Checker& check) {
  // Target fixed from an independent reference run (see tests/README note):
  // plain SGD crosses 0.03 around epochs 3-8 across seeds, the swarm around
  // iterations 1-2.
  const double target = 0.03;

  for (std::uint64_t master : {1ull, 2ull, 3ull}) {
    SyntheticCase sc = make_synthetic(master);
    const std::uint64_t order_seed = derive_seed(master, 15);

    // plain SGD, epoch by epoch
    int plain_reach = -1;
    {
      FactorModel m = sc.initial;
      for (int epoch = 1; epoch <= 300; ++epoch) {
        if (sgd_epoch_plain(m, sc.data.train, 0.01, 0.001,
                            epoch_order_seed(order_seed, epoch)) !=
            EpochStatus::ok) {
          break;
        }
        if (rmse(m, sc.data.test) <= target) {
          plain_reach = epoch;
          break;
        }
      }
    }
    check.require(plain_reach > 0, "plain SGD missed the target in 300 epochs (seed " +
                                       std::to_string(master) + ")");
    if (!check.ok) return;

    // the gain-adapted swarm, all defaults (Q=5, w=0.729, c1=c2=2, m=0.2)
    HyperParams hyper;
    hyper.eta = 0.01;
    hyper.lambda = 0.001;
    hyper.rank = 5;
    hyper.max_iters = 300;
    hyper.tol = 1e-300;
    PsoConfig config;
    config.seed = derive_seed(master, 16);

    int swarm_reach = -1;
    evolve(sc.initial, sc.data, hyper, config, order_seed,
           [&](const IterationSnapshot& snap) {
             if (swarm_reach > 0) return;
             const FactorModel& best =
                 snap.swarm.particles[snap.gbest_particle].model;
             if (rmse(best, sc.data.test) <= target) {
               swarm_reach = snap.iteration;
             }
           });
    check.require(swarm_reach > 0, "swarm missed the target (seed " +
                                       std::to_string(master) + ")");
    if (swarm_reach > 0 && plain_reach > 0) {
      check.require(swarm_reach < plain_reach,
                    "seed " + std::to_string(master) + ": swarm needed " +
                        std::to_string(swarm_reach) + " iterations vs plain " +
                        std::to_string(plain_reach) + " epochs");
    }
    if (!check.ok) return;
  }
}

// ---------------------------------------------------------------- 5
void pso_invariants(Checker& check) {
  SyntheticCase sc = make_synthetic(9);

  HyperParams hyper;
  hyper.eta = 0.01;
  hyper.lambda = 0.001;
  hyper.rank = 5;
  hyper.max_iters = 200;
  hyper.tol = 1e-300;
  PsoConfig config;
  config.seed = 91;
  const Vec9 vmax = config.velocity_max();

  int iterations = 0;
  bool in_bounds = true;
  auto result = evolve(sc.initial, sc.data, hyper, config, 92,
                       [&](const IterationSnapshot& snap) {
                         ++iterations;
                         for (const Particle& p : snap.swarm.particles) {
                           if (!config.bounds.contains(p.position)) in_bounds = false;
                           for (int d = 0; d < 9; ++d) {
                             if (std::abs(p.velocity[d]) > vmax[d]) in_bounds = false;
                           }
                         }
                       });
  check.require(iterations == 200, "expected 200 iterations, saw " +
                                       std::to_string(iterations));
  check.require(in_bounds, "a particle left the search box or velocity clamp");
  for (std::size_t n = 1; n < result.gbest_trace.size(); ++n) {
    check.require(result.gbest_trace[n] <= result.gbest_trace[n - 1],
                  "gbest fitness increased at iteration " + std::to_string(n + 1));
    if (!check.ok) return;
  }

  // frozen single-particle swarm == fixed-gain trainer, bit for bit
  PsoConfig frozen;
  frozen.particles = 1;
  frozen.inertia = 0.0;
  frozen.c1 = 0.0;
  frozen.c2 = 0.0;
  frozen.seed = 93;
  hyper.max_iters = 40;
  const Swarm probe = init_swarm(frozen, sc.initial);
  const GainVector fixed = GainVector::from_vector(probe.particles[0].position);

  const auto swarm_run = evolve(sc.initial, sc.data, hyper, frozen, 94);
  const auto train_run = train(sc.initial, sc.data, hyper, SgdNpid{fixed}, 94);
  check.require(swarm_run.reports.size() == train_run.reports.size(),
                "reduction: epoch counts differ");
  for (std::size_t n = 0; n < swarm_run.reports.size() && check.ok; ++n) {
    check.require(
        swarm_run.reports[n].train_loss == train_run.reports[n].train_loss &&
            swarm_run.reports[n].val_rmse == train_run.reports[n].val_rmse &&
            swarm_run.reports[n].val_mae == train_run.reports[n].val_mae,
        "reduction: epoch " + std::to_string(n + 1) + " differs");
  }
}

// ---------------------------------------------------------------- 6
void metrics_oracle(Checker& check) {
  {
    const std::vector<double> residuals = {0.1, -0.1, 0.2};
    const EvalReport r = evaluate_residuals(residuals);
    check.require(std::abs(r.rmse - 0.14142135623730950488) <= 1e-12,
                  "rmse hand case");
    check.require(std::abs(r.mae - 0.13333333333333333333) <= 1e-12,
                  "mae hand case");
    const std::vector<double> single = {0.5};
    const EvalReport s = evaluate_residuals(single);
    check.require(s.rmse == 0.5 && s.mae == 0.5, "single-residual case");
  }

  Rng rng(61);
  for (int trial = 0; trial < 10000 && check.ok; ++trial) {
    std::vector<double> residuals(1 + rng.below(64));
    for (double& v : residuals) v = rng.uniform(-2.0, 2.0);
    const EvalReport r = evaluate_residuals(residuals);
    check.require(r.mae <= r.rmse + 1e-12, "mae > rmse on a random set");
  }

  // compensated accumulation vs a sorted long-double reference at 1e6
  const std::size_t n = 1000000;
  std::vector<double> residuals(n);
  for (double& v : residuals) v = rng.uniform(-1e-3, 1e-3);
  const EvalReport r = evaluate_residuals(residuals);

  std::vector<double> squares(n), absolutes(n);
  for (std::size_t t = 0; t < n; ++t) {
    squares[t] = residuals[t] * residuals[t];
    absolutes[t] = std::abs(residuals[t]);
  }
  const auto sorted_sum = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    long double acc = 0.0L;
    for (double x : v) acc += x;
    return acc;
  };
  const double want_rmse = std::sqrt(
      static_cast<double>(sorted_sum(squares) / static_cast<long double>(n)));
  const double want_mae =
      static_cast<double>(sorted_sum(absolutes) / static_cast<long double>(n));
  check.require(std::abs(r.rmse - want_rmse) <= 1e-12 * want_rmse,
                "rmse deviates from the sorted-sum oracle");
  check.require(std::abs(r.mae - want_mae) <= 1e-12 * want_mae,
                "mae deviates from the sorted-sum oracle");
}

// ---------------------------------------------------------------- 7
void round_trips(Checker& check) {
  const auto tmp = std::filesystem::temp_directory_path() / "npil_acceptance";
  std::filesystem::create_directories(tmp);

  Rng rng(71);
  for (int trial = 0; trial < 5 && check.ok; ++trial) {
    const Index di = 2 + static_cast<Index>(rng.below(20));
    const Index dj = 1 + static_cast<Index>(rng.below(6));
    const Index dk = 1 + static_cast<Index>(rng.below(10));
    const Index rank = 1 + static_cast<Index>(rng.below(8));
    FactorModel m = random_model(di, dj, dk, rank, rng);
    m.A(0, 0) = 1e-300;          // subnormal-adjacent and extreme magnitudes
    m.B(0, 0) = -1.7976931348623157e308;
    m.C(0, 0) = 2.2250738585072014e-308;

    NormalizationParams params;
    params.channels.resize(dj);
    for (Index j = 0; j < dj; ++j) {
      const double lo = rng.uniform(-1e3, 1e3);
      params.channels[j] = {lo, lo + rng.uniform01() + 0.1};
    }

    const auto path = tmp / ("model_" + std::to_string(trial) + ".npil");
    save_model(path, m, &params);
    const ModelFile back = load_model(path);
    check.require(bits_equal(back.model, m), "model round trip not bit-exact");
    check.require(back.params.has_value(), "params lost in round trip");

    const auto path2 = tmp / ("model_" + std::to_string(trial) + "b.npil");
    save_model(path2, back.model, &*back.params);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    check.require(s1.str() == s2.str(), "re-saved file is not byte-identical");

    for (int n = 0; n < 2000 && check.ok; ++n) {
      const Index j = static_cast<Index>(rng.below(dj));
      const auto& ch = params.channels[j];
      const double raw = rng.uniform(ch.min_raw, ch.max_raw);
      const double round_tripped =
          denormalize(normalize_value(raw, j, params), j, params);
      check.require(std::abs(round_tripped - raw) <=
                        1e-12 * std::max(1.0, std::abs(raw)),
                    "normalize/denormalize deviates past 1e-12");
    }
  }
  std::filesystem::remove_all(tmp);
}

// ---------------------------------------------------------------- 8
void protocol_conformance(Checker& check) {
  const Index di = 86400, dj = 3, dk = 28;
  const std::size_t cells = static_cast<std::size_t>(di) * dj * dk;

  std::vector<Entry> all;
  all.reserve(cells);
  Rng rng(81);
  for (Index i = 0; i < di; ++i) {
    for (Index j = 0; j < dj; ++j) {
      for (Index k = 0; k < dk; ++k) all.push_back({i, j, k, rng.uniform01()});
    }
  }
  const SparseTensor3 full = SparseTensor3::build(di, dj, dk, std::move(all));
  check.require(full.size() == 7257600, "full tensor size");
  check.require(full.cell_count() == 7257600, "cell count");

  const struct {
    double density;
    std::size_t entries;
  } cases[] = {{0.15, 1088640}, {0.10, 725760}, {0.05, 362880}};

  for (const auto& c : cases) {
    const SparseTensor3 masked = mask_to_density(full, c.density, 82);
    check.require(masked.size() == c.entries,
                  "masked entry count at density " + format_double(c.density) +
                      ": " + std::to_string(masked.size()));
    check.require(std::abs(density(masked) - c.density) < 1e-15,
                  "density mismatch");

    const DataSplit data = split(masked, {8, 1, 1}, 83);
    const std::size_t tenth = c.entries / 10;  // all counts divide evenly
    check.require(data.validation.size() == tenth &&
                      data.test.size() == tenth &&
                      data.train.size() == c.entries - 2 * tenth,
                  "split sizes at density " + format_double(c.density));
    if (!check.ok) return;
  }
}

}  // namespace

int main() {
  std::printf("npil acceptance suite\n");
  run_criterion(1, "analytic gradients match central finite differences", 5.0,
                gradient_oracle);
  run_criterion(2, "identity-gain NPID training is bitwise plain SGD", 10.0,
                controller_identity);
  run_criterion(3, "NPID epoch matches the independent scalar replay", 5.0,
                replay_oracle);
  run_criterion(4, "synthetic recovery: swarm beats plain SGD to RMSE 0.03",
                180.0, synthetic_recovery);
  run_criterion(5, "swarm invariants and fixed-gain reduction", 60.0,
                pso_invariants);
  run_criterion(6, "metric oracles and compensated accumulation", 10.0,
                metrics_oracle);
  run_criterion(7, "bit-exact model and normalization round trips", 30.0,
                round_trips);
  run_criterion(8, "meter-scale mask and split protocol counts", 120.0,
                protocol_conformance);
  if (g_failures == 0) {
    std::printf("all 8 criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
