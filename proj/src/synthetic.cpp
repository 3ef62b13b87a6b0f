#include "npil/synthetic.hpp"

#include "npil/rng.hpp"

namespace npil {

FactorModel random_ground_truth(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.dim_i <= 0 || spec.dim_j <= 0 || spec.dim_k <= 0 || spec.rank <= 0) {
    throw ConfigError("synthetic dimensions and rank must be positive");
  }
  Rng rng(seed);
  FactorModel m;
  m.A.resize(spec.dim_i, spec.rank);
  m.B.resize(spec.dim_j, spec.rank);
  m.C.resize(spec.dim_k, spec.rank);
  for (Eigen::Index i = 0; i < m.A.rows(); ++i)
    for (Eigen::Index r = 0; r < m.A.cols(); ++r)
      m.A(i, r) = rng.uniform_pos(spec.factor_max);
  for (Eigen::Index i = 0; i < m.B.rows(); ++i)
    for (Eigen::Index r = 0; r < m.B.cols(); ++r)
      m.B(i, r) = rng.uniform_pos(spec.factor_max);
  for (Eigen::Index i = 0; i < m.C.rows(); ++i)
    for (Eigen::Index r = 0; r < m.C.cols(); ++r)
      m.C(i, r) = rng.uniform_pos(spec.factor_max);
  m.u.resize(spec.dim_i);
  m.f.resize(spec.dim_j);
  m.d.resize(spec.dim_k);
  for (Eigen::Index i = 0; i < m.u.size(); ++i) m.u[i] = rng.uniform(0.0, spec.bias_max);
  for (Eigen::Index i = 0; i < m.f.size(); ++i) m.f[i] = rng.uniform(0.0, spec.bias_max);
  for (Eigen::Index i = 0; i < m.d.size(); ++i) m.d[i] = rng.uniform(0.0, spec.bias_max);
  return m;
}

SparseTensor3 synthesize_full(const FactorModel& truth, double noise_sigma,
                              std::uint64_t noise_seed) {
  Rng rng(noise_seed);
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(truth.dim_i()) * truth.dim_j() *
                  truth.dim_k());
  for (Index i = 0; i < truth.dim_i(); ++i) {
    for (Index j = 0; j < truth.dim_j(); ++j) {
      for (Index k = 0; k < truth.dim_k(); ++k) {
        double v = predict(truth, i, j, k);
        if (noise_sigma > 0.0) v += noise_sigma * rng.gaussian();
        entries.push_back({i, j, k, v});
      }
    }
  }
  return SparseTensor3::build(truth.dim_i(), truth.dim_j(), truth.dim_k(),
                              std::move(entries));
}

}  // namespace npil
