// reduced.hpp — idealized four-dimensional parity filter on the qubit basis
// {|uu⟩, |ud⟩, |du⟩, |dd⟩}, driven either by its own simulated record or by
// an externally supplied homodyne record.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qpl/params.hpp"

namespace qpl {

// Parity word Π = diag(+1, −1, −1, +1) on {uu, ud, du, dd}.
inline constexpr std::array<double, 4> kParitySign{+1.0, -1.0, -1.0, +1.0};

struct ReducedKet {
  Eigen::Vector4cd v;

  static ReducedKet uniform();  // equal weights, the default initial state
  static ReducedKet basis(int k);
};

double mean_parity(const ReducedKet& v);
// Var(Π) = 1 − ⟨Π⟩² exactly, since Π² = I.
double parity_variance(const ReducedKet& v);

// One update v ← v + (α Π dY − (α²/2) dt) v, then renormalize.
void reduced_step(ReducedKet& v, double dY, double alpha, double dt);

// Decimated output rows: t, ⟨Π⟩, Var(Π).
struct ReducedSeries {
  std::vector<double> t;
  std::vector<double> mean_pi;
  std::vector<double> var_pi;
};

struct IdealTrajectory {
  std::uint64_t params_digest = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::uint64_t n_steps = 0;
  int decimation = 0;
  std::vector<double> record;  // dY at full rate
  ReducedSeries series;
};

// Self-driven run: dY = 2 α(t) ⟨Π⟩ dt + dW with the probe ramp applied.
IdealTrajectory simulate_ideal(const ReducedKet& v0, const SystemParams& params,
                               std::uint64_t seed, int decimation = 50);

// Record-driven run through the identical stepping path; the record must hold
// one increment per step and α(t) follows the same ramp.
ReducedSeries run_on_record(const ReducedKet& v0, std::span<const double> record,
                            const SystemParams& params, int decimation = 50);

}  // namespace qpl
