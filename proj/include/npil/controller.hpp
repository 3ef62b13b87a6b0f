#pragma once

#include <Eigen/Core>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "npil/common.hpp"

namespace npil {

using Vec9 = Eigen::Matrix<double, 9, 1>;

/// The nine gain parameters shaping the nonlinear proportional, integral
/// and derivative responses.
struct GainVector {
  double kp1 = 1.0;
  double kp2 = 0.0;
  double kp3 = 0.001;
  double ki1 = 0.0;
  double ki2 = 0.001;
  double kd1 = 0.0;
  double kd2 = 0.0;
  double kd3 = 0.001;
  double kd4 = 0.001;

  bool operator==(const GainVector&) const = default;

  Vec9 to_vector() const {
    Vec9 v;
    v << kp1, kp2, kp3, ki1, ki2, kd1, kd2, kd3, kd4;
    return v;
  }

  static GainVector from_vector(const Vec9& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
  }

  /// Gains under which the refined error equals the instant error exactly,
  /// reducing NPID training to plain SGD (Kp == 1, Ki == Kd == 0).
  static GainVector identity_reduction() { return GainVector{}; }

  static const std::array<const char*, 9>& names() {
    static const std::array<const char*, 9> n = {
        "Kp1", "Kp2", "Kp3", "Ki1", "Ki2", "Kd1", "Kd2", "Kd3", "Kd4"};
    return n;
  }
};

/// sech(x) = 2/(e^x + e^-x), evaluated as 2e^-|x|/(1 + e^-2|x|) so large
/// arguments underflow to 0 instead of overflowing.
inline double sech(double x) {
  const double t = std::exp(-std::abs(x));
  return 2.0 * t / (1.0 + t * t);
}

struct NonlinearGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

/// Error-dependent gains:
///   Kp = Kp1 + Kp2(1 - sech(Kp3 e))
///   Ki = Ki1 sech(Ki2 e)
///   Kd = Kd1 + Kd2 / (1 + Kd3 exp(Kd4 e))
/// The exponential argument is capped so Kd3 * exp stays finite.
inline NonlinearGains nonlinear_gains(double e, const GainVector& g) {
  NonlinearGains out;
  out.kp = g.kp1 + g.kp2 * (1.0 - sech(g.kp3 * e));
  out.ki = g.ki1 * sech(g.ki2 * e);
  const double ex = std::exp(std::min(g.kd4 * e, 700.0));
  out.kd = g.kd1 + g.kd2 / (1.0 + g.kd3 * ex);
  assert(std::isfinite(out.kp) && std::isfinite(out.ki) && std::isfinite(out.kd));
  return out;
}

/// Per-training-entry controller memory: the running error integral and the
/// previous visit's error. Owned by exactly one trainer; never shared.
class ControllerState {
 public:
  struct Memory {
    double integral = 0.0;
    double prev_error = 0.0;
  };

  /// Entry triples are packed into 21 bits per index.
  static constexpr Index kMaxIndex = 1 << 21;

  Memory& slot(Index i, Index j, Index k) { return slots_[pack(i, j, k)]; }

  void clear() {
    slots_.clear();
    epoch_ = 0;
  }

  void advance_epoch() { ++epoch_; }
  int epoch() const { return epoch_; }
  std::size_t tracked_entries() const { return slots_.size(); }
  void reserve(std::size_t n) { slots_.reserve(n); }

  static std::uint64_t pack(Index i, Index j, Index k) {
    if (i < 0 || i >= kMaxIndex || j < 0 || j >= kMaxIndex || k < 0 ||
        k >= kMaxIndex) {
      throw DataError("controller entry index out of packing range");
    }
    return (static_cast<std::uint64_t>(i) << 42) |
           (static_cast<std::uint64_t>(j) << 21) | static_cast<std::uint64_t>(k);
  }

 private:
  std::unordered_map<std::uint64_t, Memory> slots_;
  int epoch_ = 0;
};

/// One controller step for one training entry: accumulate e into the
/// integral, evaluate the nonlinear gains at e, and return
///   ẽ = Kp e + Ki Σ_h e^(h) + Kd (e - e_prev),
/// then remember e as the entry's previous error. A never-visited entry has
/// zero integral and zero previous error.
inline double refine_error(ControllerState& state, Index i, Index j, Index k,
                           double e, const GainVector& g) {
  if (!std::isfinite(e)) throw DataError("non-finite instant error");
  auto& mem = state.slot(i, j, k);
  mem.integral += e;
  const NonlinearGains gains = nonlinear_gains(e, g);
  const double refined =
      gains.kp * e + gains.ki * mem.integral + gains.kd * (e - mem.prev_error);
  mem.prev_error = e;
  return refined;
}

inline void reset(ControllerState& state) { state.clear(); }

}  // namespace npil
