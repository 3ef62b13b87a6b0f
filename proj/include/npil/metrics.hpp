#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "npil/model.hpp"

namespace npil {

/// Neumaier compensated accumulator. Million-entry sums of ~1e-6-scale
/// squared residuals lose digits under naive accumulation.
class NeumaierSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct EvalReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t count = 0;
};

/// RMSE and MAE of a residual set in one pass.
EvalReport evaluate_residuals(std::span<const double> residuals);

/// RMSE and MAE of model predictions over a held-out entry set.
EvalReport evaluate(const FactorModel& m, std::span<const Entry> entries);

double rmse(const FactorModel& m, std::span<const Entry> entries);
double mae(const FactorModel& m, std::span<const Entry> entries);

}  // namespace npil
