#include "npil/model.hpp"

#include "npil/metrics.hpp"
#include "npil/rng.hpp"

namespace npil {
namespace {

void fill_uniform(Eigen::MatrixXd& m, Rng& rng) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index r = 0; r < m.cols(); ++r) {
      m(i, r) = rng.uniform_pos(0.05);
    }
  }
}

}  // namespace

FactorModel init_model(Index dim_i, Index dim_j, Index dim_k, Index rank,
                       std::uint64_t seed) {
  if (dim_i <= 0 || dim_j <= 0 || dim_k <= 0 || rank <= 0) {
    throw ConfigError("model dimensions and rank must be positive");
  }
  FactorModel m;
  m.A.resize(dim_i, rank);
  m.B.resize(dim_j, rank);
  m.C.resize(dim_k, rank);
  Rng rng(seed);
  fill_uniform(m.A, rng);
  fill_uniform(m.B, rng);
  fill_uniform(m.C, rng);
  m.u = Eigen::VectorXd::Zero(dim_i);
  m.f = Eigen::VectorXd::Zero(dim_j);
  m.d = Eigen::VectorXd::Zero(dim_k);
  return m;
}

double loss(const FactorModel& m, std::span<const Entry> entries, double lambda) {
  NeumaierSum acc;
  for (const Entry& entry : entries) {
    const double e = instant_error(m, entry);
    const double reg = m.A.row(entry.i).squaredNorm() +
                       m.B.row(entry.j).squaredNorm() +
                       m.C.row(entry.k).squaredNorm() +
                       m.u[entry.i] * m.u[entry.i] + m.f[entry.j] * m.f[entry.j] +
                       m.d[entry.k] * m.d[entry.k];
    acc.add(0.5 * (e * e + lambda * reg));
  }
  return acc.value();
}

}  // namespace npil
