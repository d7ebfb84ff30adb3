// sde.hpp — Euler–Maruyama integrator for the physical conditional filtering
// equation with one homodyne channel and two spontaneous-emission counting
// channels, plus the analytic cascade steady state used to validate signs.
//
// Per step, in order: (a) each counting channel fires with probability
// γ²⟨σ†σ⟩dt, replacing v by γσv; (b) the homodyne increment
// dY0 = ⟨L+L†⟩dt + dW drives the linear update with every drift term applied
// verbatim (including the −α²/2 identity term, a pure normalization gauge);
// (c) the state is renormalized.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpl/observables.hpp"
#include "qpl/ops.hpp"
#include "qpl/rng.hpp"
#include "qpl/space.hpp"

namespace qpl {

struct StepNoise {
  double dW = 0.0;                       // Brownian increment ~ N(0, dt)
  std::array<double, 2> jump_u{1.0, 1.0};  // uniforms tested against γ²⟨σ†σ⟩dt
};

// Noise contract: one N(0,1) (homodyne stream) and two uniforms (jump stream)
// per step index, all from the counter generator.
StepNoise draw_step_noise(const CounterRng& rng, std::uint64_t step, double dt);

struct StepOutcome {
  double dY0 = 0.0;
  std::array<bool, 2> jumped{false, false};
};

// Reference single step straight off the catalog's Eigen operators. The
// trajectory runner uses an equivalent compiled kernel; a unit test holds the
// two within roundoff of each other.
StepOutcome euler_step(Ket& v, double t, const StepNoise& noise,
                       const OperatorCatalog& catalog);

struct JumpEvent {
  double t = 0.0;
  int channel = 0;  // 0 = atom 1, 1 = atom 2
};

struct TrajectoryRecord {
  std::uint64_t params_digest = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::uint64_t n_steps = 0;
  int decimation = 0;
  std::vector<double> dY0;            // full-rate homodyne record
  std::vector<JumpEvent> jumps;
  std::vector<std::string> obs_ids;   // trajectory_observable_ids()
  std::uint64_t n_rows = 0;
  std::vector<double> obs;            // row-major [n_rows][obs_ids.size()]
  double max_top_fock_pop = 0.0;      // worst truncation leakage seen

  double obs_at(std::uint64_t row, int col) const {
    return obs[row * obs_ids.size() + static_cast<std::uint64_t>(col)];
  }
};

// Truncation leakage above this top-Fock-level population aborts the run.
inline constexpr double kTailErrorThreshold = 1e-8;

class TruncationError : public std::runtime_error {
 public:
  TruncationError(int fock_dim, double leakage, double t);
  int fock_dim;
  double leakage;
  double t;
};

class TrajectoryFailure : public std::runtime_error {
 public:
  TrajectoryFailure(std::uint64_t seed, std::uint64_t step, const std::string& what);
  std::uint64_t seed;
  std::uint64_t step;
};

// Full conditional trajectory from v0 (must be normalized). Decimated
// observable rows sample the state before steps 0, d, 2d, …; dY0 is recorded
// at every step. Throws TruncationError / TrajectoryFailure on the guards.
TrajectoryRecord simulate(const OperatorCatalog& catalog, const Ket& v0,
                          std::uint64_t seed, int decimation = 50);

struct SteadyState {
  std::complex<double> beta1;
  std::complex<double> beta2;
  double homodyne_mean_rate = 0.0;
};

// Ideal strong-coupling cascade steady state for pinned qubit configurations:
// an uncoupled (|−⟩) cavity driven by input a acquires β = −2a/κ and reflects
// −a; a coupled (|+⟩) cavity stays empty and reflects +a; cavity 2 is driven
// by cavity 1's reflection; ⟨L+L†⟩ = 2·Re(final output).
SteadyState steady_state_oracle(bool atom1_coupled, bool atom2_coupled,
                                const SystemParams& params);

}  // namespace qpl
