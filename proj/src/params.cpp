#include "qpl/params.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qpl {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void RampSchedule::validate() const {
  require(t_on >= 0.0, "ramp: t_on must be >= 0");
  require(t_rise >= 0.0 && t_fall >= 0.0, "ramp: rise/fall must be >= 0");
  require(t_on + t_rise <= t_off, "ramp: rise must complete before t_off");
}

double SystemParams::kappa() const { return std::sqrt(2.0 * kappa2_half); }

std::uint64_t SystemParams::n_steps() const {
  return static_cast<std::uint64_t>(std::llround(t_final / dt));
}

void SystemParams::validate() const {
  require(std::isfinite(g) && g >= 0.0, "params: g must be >= 0");
  require(std::isfinite(kappa2_half) && kappa2_half > 0.0,
          "params: kappa2_half must be > 0");
  require(std::isfinite(gamma2_half) && gamma2_half >= 0.0,
          "params: gamma2_half must be >= 0");
  require(std::isfinite(alpha_max) && alpha_max >= 0.0,
          "params: alpha_max must be >= 0");
  require(fock_dim >= 2, "params: fock_dim must be >= 2");
  require(std::isfinite(dt) && dt > 0.0, "params: dt must be > 0");
  require(dt * gamma2() < 0.01, "params: dt * gamma^2 must be < 0.01");
  require(std::isfinite(t_final) && t_final > 0.0,
          "params: t_final must be > 0");
  ramp.validate();
}

double probe_amplitude(const SystemParams& params, double t) {
  const RampSchedule& r = params.ramp;
  const double a = params.alpha_max;
  if (t <= r.t_on || a == 0.0) return 0.0;
  if (t < r.t_on + r.t_rise) {
    const double x = (t - r.t_on) / r.t_rise;  // in (0, 1)
    if (r.profile == RampProfile::linear) return a * x;
    const double s = std::sin(0.5 * M_PI * x);
    return a * s * s;
  }
  if (t <= r.t_off) return a;
  if (t < r.t_off + r.t_fall) {
    const double x = (t - r.t_off) / r.t_fall;  // in (0, 1)
    if (r.profile == RampProfile::linear) return a * (1.0 - x);
    const double c = std::cos(0.5 * M_PI * x);
    return a * c * c;
  }
  return 0.0;
}

std::string canonical_params_text(const SystemParams& p) {
  char buf[512];
  std::snprintf(
      buf, sizeof buf,
      "g=%.17g;kappa2_half=%.17g;gamma2_half=%.17g;alpha_max=%.17g;"
      "fock_dim=%d;dt=%.17g;t_final=%.17g;profile=%s;t_on=%.17g;"
      "t_rise=%.17g;t_off=%.17g;t_fall=%.17g",
      p.g, p.kappa2_half, p.gamma2_half, p.alpha_max, p.fock_dim, p.dt,
      p.t_final, p.ramp.profile == RampProfile::sin2 ? "sin2" : "linear",
      p.ramp.t_on, p.ramp.t_rise, p.ramp.t_off, p.ramp.t_fall);
  return std::string(buf);
}

std::uint64_t params_digest(const SystemParams& p) {
  const std::string s = canonical_params_text(p);
  return fnv1a64(s.data(), s.size());
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace qpl
