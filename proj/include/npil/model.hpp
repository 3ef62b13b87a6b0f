#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>

#include "npil/sparse_tensor.hpp"

namespace npil {

/// Biased rank-R CP factor model. A, B, C hold one latent-factor row per
/// index of the corresponding tensor mode; u, f, d are per-index linear
/// biases. A plain value type: copy it to snapshot, move it to hand off.
struct FactorModel {
  Eigen::MatrixXd A;  // dim_i x R
  Eigen::MatrixXd B;  // dim_j x R
  Eigen::MatrixXd C;  // dim_k x R
  Eigen::VectorXd u;  // dim_i
  Eigen::VectorXd f;  // dim_j
  Eigen::VectorXd d;  // dim_k

  Index dim_i() const { return static_cast<Index>(A.rows()); }
  Index dim_j() const { return static_cast<Index>(B.rows()); }
  Index dim_k() const { return static_cast<Index>(C.rows()); }
  Index rank() const { return static_cast<Index>(A.cols()); }

  bool all_finite() const {
    return A.allFinite() && B.allFinite() && C.allFinite() && u.allFinite() &&
           f.allFinite() && d.allFinite();
  }

  bool same_shape(const FactorModel& other) const {
    return dim_i() == other.dim_i() && dim_j() == other.dim_j() &&
           dim_k() == other.dim_k() && rank() == other.rank();
  }
};

/// Training hyperparameters. Defaults follow the primary experiment
/// configuration: eta 0.002, lambda 0.01, rank 20, 500-iteration cap,
/// 1e-4 convergence tolerance.
struct HyperParams {
  double eta = 0.002;
  double lambda = 0.01;
  Index rank = 20;
  int max_iters = 500;
  double tol = 1e-4;

  void validate() const {
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
    if (rank < 1) throw ConfigError("rank must be >= 1");
    if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  }
};

/// Factor entries i.i.d. uniform on (0, 0.05], biases zero. Deterministic
/// per seed; fill order is A, B, C row-major.
FactorModel init_model(Index dim_i, Index dim_j, Index dim_k, Index rank,
                       std::uint64_t seed);

inline void check_indices(const FactorModel& m, Index i, Index j, Index k) {
  if (i < 0 || i >= m.dim_i() || j < 0 || j >= m.dim_j() || k < 0 ||
      k >= m.dim_k()) {
    throw DataError("index (" + std::to_string(i) + "," + std::to_string(j) +
                    "," + std::to_string(k) + ") out of range for model dims (" +
                    std::to_string(m.dim_i()) + "," + std::to_string(m.dim_j()) +
                    "," + std::to_string(m.dim_k()) + ")");
  }
}

/// ŷ_ijk = Σ_r a_ir b_jr c_kr + u_i + f_j + d_k
inline double predict(const FactorModel& m, Index i, Index j, Index k) {
  check_indices(m, i, j, k);
  return (m.A.row(i).array() * m.B.row(j).array() * m.C.row(k).array()).sum() +
         m.u[i] + m.f[j] + m.d[k];
}

/// Instant error e_ijk = y_ijk - ŷ_ijk.
inline double instant_error(const FactorModel& m, const Entry& entry) {
  return entry.value - predict(m, entry.i, entry.j, entry.k);
}

/// Regularized objective over an entry set, accumulated per entry as
/// ½(e² + λ Σ_r(a_ir² + b_jr² + c_kr²) + λ(u_i² + f_j² + d_k²)).
double loss(const FactorModel& m, std::span<const Entry> entries, double lambda);

}  // namespace npil
