// params.hpp — physical parameters, probe ramp schedule, validation.
//
// Conventions: kappa2_half = κ²/2 (cavity field decay), gamma2_half = γ²/2
// (atomic decay), g the vacuum Rabi coupling, alpha_max the plateau probe
// amplitude. Time is measured in units where γ² multiplies t directly, so the
// defaults correspond to {g, κ²/2, γ²/2, α} = {20, 4.5, 0.5, 0.2}.
#pragma once

#include <cstdint>
#include <string>

namespace qpl {

enum class RampProfile { sin2, linear };

// Probe envelope: off before t_on, rises over t_rise, holds alpha_max until
// t_off, falls over t_fall, off afterwards.
struct RampSchedule {
  RampProfile profile = RampProfile::sin2;
  double t_on = 0.0;
  double t_rise = 10.0;
  double t_off = 80.0;
  double t_fall = 10.0;

  double plateau_begin() const { return t_on + t_rise; }
  double plateau_end() const { return t_off; }
  void validate() const;  // throws std::invalid_argument
};

struct SystemParams {
  double g = 20.0;
  double kappa2_half = 4.5;
  double gamma2_half = 0.5;
  double alpha_max = 0.2;
  int fock_dim = 8;
  double dt = 2e-4;
  double t_final = 95.0;
  RampSchedule ramp{};

  double kappa() const;                  // √(2·kappa2_half)
  double gamma2() const { return 2.0 * gamma2_half; }
  std::uint64_t n_steps() const;         // round(t_final / dt)
  void validate() const;                 // throws std::invalid_argument
};

// Probe amplitude α(t) for the given schedule; α ≥ 0 everywhere.
double probe_amplitude(const SystemParams& params, double t);

// Canonical text form of all physical parameters (stable field order,
// round-trippable doubles); its FNV-1a hash stamps records and CSV files.
std::string canonical_params_text(const SystemParams& params);
std::uint64_t params_digest(const SystemParams& params);

std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace qpl
