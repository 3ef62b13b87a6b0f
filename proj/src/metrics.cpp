#include "npil/metrics.hpp"

#include <cassert>

namespace npil {
namespace {

EvalReport finish(const NeumaierSum& squares, const NeumaierSum& absolutes,
                  std::size_t count) {
  EvalReport report;
  report.count = count;
  report.rmse = std::sqrt(squares.value() / static_cast<double>(count));
  report.mae = absolutes.value() / static_cast<double>(count);
  // QM-AM: the mean absolute error never exceeds the quadratic mean.
  assert(report.mae <= report.rmse + 1e-12);
  return report;
}

}  // namespace

EvalReport evaluate_residuals(std::span<const double> residuals) {
  if (residuals.empty()) throw DataError("empty residual set");
  NeumaierSum squares;
  NeumaierSum absolutes;
  for (double e : residuals) {
    squares.add(e * e);
    absolutes.add(std::abs(e));
  }
  return finish(squares, absolutes, residuals.size());
}

EvalReport evaluate(const FactorModel& m, std::span<const Entry> entries) {
  if (entries.empty()) throw DataError("empty evaluation set");
  NeumaierSum squares;
  NeumaierSum absolutes;
  for (const Entry& entry : entries) {
    const double e = instant_error(m, entry);
    squares.add(e * e);
    absolutes.add(std::abs(e));
  }
  return finish(squares, absolutes, entries.size());
}

double rmse(const FactorModel& m, std::span<const Entry> entries) {
  return evaluate(m, entries).rmse;
}

double mae(const FactorModel& m, std::span<const Entry> entries) {
  return evaluate(m, entries).mae;
}

}  // namespace npil
