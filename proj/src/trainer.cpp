#include "npil/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "npil/metrics.hpp"

namespace npil {
namespace {

// Shared inner loop. The plain and NPID passes must stay arithmetically
// identical apart from the error transform: the controller-identity
// configuration is required to reproduce plain SGD bit for bit.
template <class Refine>
EpochStatus run_epoch(FactorModel& m, std::span<const Entry> train, double eta,
                      double lambda, std::uint64_t order_seed, Refine&& refine) {
  std::vector<std::uint32_t> order(train.size());
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(order_seed);
  rng.shuffle(order);

  Eigen::RowVectorXd a_prev(m.rank());
  Eigen::RowVectorXd b_prev(m.rank());
  Eigen::RowVectorXd c_prev(m.rank());

  for (const std::uint32_t idx : order) {
    const Entry& entry = train[idx];
    const double e = entry.value - predict(m, entry.i, entry.j, entry.k);
    if (!std::isfinite(e)) return EpochStatus::diverged;
    const double ee = refine(entry, e);
    if (!std::isfinite(ee)) return EpochStatus::diverged;

    a_prev = m.A.row(entry.i);
    b_prev = m.B.row(entry.j);
    c_prev = m.C.row(entry.k);
    m.A.row(entry.i) += eta * (ee * b_prev.cwiseProduct(c_prev) - lambda * a_prev);
    m.B.row(entry.j) += eta * (ee * a_prev.cwiseProduct(c_prev) - lambda * b_prev);
    m.C.row(entry.k) += eta * (ee * a_prev.cwiseProduct(b_prev) - lambda * c_prev);
    m.u[entry.i] += eta * (ee - lambda * m.u[entry.i]);
    m.f[entry.j] += eta * (ee - lambda * m.f[entry.j]);
    m.d[entry.k] += eta * (ee - lambda * m.d[entry.k]);
  }
  return m.all_finite() ? EpochStatus::ok : EpochStatus::diverged;
}

}  // namespace

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::converged: return "converged";
    case StopReason::max_iters: return "max_iters";
    case StopReason::diverged: return "diverged";
  }
  return "unknown";
}

EpochStatus sgd_epoch_plain(FactorModel& model, std::span<const Entry> train,
                            double eta, double lambda,
                            std::uint64_t order_seed) {
  return run_epoch(model, train, eta, lambda, order_seed,
                   [](const Entry&, double e) { return e; });
}

EpochStatus sgd_epoch_npid(FactorModel& model, std::span<const Entry> train,
                           double eta, double lambda, const GainVector& gains,
                           ControllerState& state, std::uint64_t order_seed) {
  state.advance_epoch();
  return run_epoch(model, train, eta, lambda, order_seed,
                   [&](const Entry& entry, double e) {
                     return refine_error(state, entry.i, entry.j, entry.k, e,
                                         gains);
                   });
}

TrainResult train(FactorModel initial, const DataSplit& split,
                  const HyperParams& hyper, const Optimizer& optimizer,
                  std::uint64_t order_seed) {
  hyper.validate();

  TrainResult result{std::move(initial), {}, StopReason::max_iters};
  if (hyper.max_iters == 0) return result;

  if (split.train.empty()) throw DataError("empty training set");
  if (split.validation.empty()) throw DataError("empty validation set");

  ControllerState state;
  const auto* npid = std::get_if<SgdNpid>(&optimizer);
  if (npid != nullptr) state.reserve(split.train.size());

  double prev_rmse = 0.0;
  for (int epoch = 1; epoch <= hyper.max_iters; ++epoch) {
    const FactorModel snapshot = result.model;
    const auto start = std::chrono::steady_clock::now();

    const std::uint64_t seed = epoch_order_seed(order_seed, epoch);
    EpochStatus status;
    if (npid != nullptr) {
      status = sgd_epoch_npid(result.model, split.train, hyper.eta,
                              hyper.lambda, npid->gains, state, seed);
    } else {
      status = sgd_epoch_plain(result.model, split.train, hyper.eta,
                               hyper.lambda, seed);
    }
    if (status == EpochStatus::diverged) {
      result.model = snapshot;
      result.stop = StopReason::diverged;
      return result;
    }

    EpochReport report;
    report.epoch = epoch;
    report.train_loss = loss(result.model, split.train, hyper.lambda);
    const EvalReport ev = evaluate(result.model, split.validation);
    report.val_rmse = ev.rmse;
    report.val_mae = ev.mae;
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.reports.push_back(report);

    if (epoch >= 2 && std::abs(ev.rmse - prev_rmse) < hyper.tol) {
      result.stop = StopReason::converged;
      return result;
    }
    prev_rmse = ev.rmse;
  }
  result.stop = StopReason::max_iters;
  return result;
}

}  // namespace npil
