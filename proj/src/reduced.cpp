#include "qpl/reduced.hpp"

#include <cmath>
#include <stdexcept>

#include "qpl/rng.hpp"

namespace qpl {
namespace {

// Shared inner loop so self-driven and record-driven runs take the same code
// path: per step the caller supplies dY, the state advances, and decimated
// rows sample the pre-step state.
template <typename RecordFn>
ReducedSeries drive(ReducedKet v, const SystemParams& params, int decimation,
                    RecordFn&& next_dy) {
  if (decimation < 1) throw std::invalid_argument("decimation must be >= 1");
  const std::uint64_t n = params.n_steps();
  ReducedSeries out;
  const std::uint64_t rows = n / static_cast<std::uint64_t>(decimation);
  out.t.reserve(rows);
  out.mean_pi.reserve(rows);
  out.var_pi.reserve(rows);
  for (std::uint64_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * params.dt;
    const double alpha = probe_amplitude(params, t);
    const double m = mean_parity(v);
    if (k % static_cast<std::uint64_t>(decimation) == 0) {
      out.t.push_back(t);
      out.mean_pi.push_back(m);
      out.var_pi.push_back(1.0 - m * m);
    }
    reduced_step(v, next_dy(k, m, alpha), alpha, params.dt);
  }
  return out;
}

}  // namespace

ReducedKet ReducedKet::uniform() {
  ReducedKet r;
  r.v.setConstant(0.5);
  return r;
}

ReducedKet ReducedKet::basis(int k) {
  if (k < 0 || k > 3) throw std::invalid_argument("ReducedKet::basis: bad index");
  ReducedKet r;
  r.v.setZero();
  r.v(k) = 1.0;
  return r;
}

double mean_parity(const ReducedKet& v) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m += kParitySign[i] * std::norm(v.v(i));
  return m;
}

double parity_variance(const ReducedKet& v) {
  const double m = mean_parity(v);
  return 1.0 - m * m;
}

void reduced_step(ReducedKet& v, double dY, double alpha, double dt) {
  const double shrink = 0.5 * alpha * alpha * dt;
  for (int i = 0; i < 4; ++i)
    v.v(i) *= 1.0 + alpha * kParitySign[i] * dY - shrink;
  const double n = v.v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw std::runtime_error("reduced_step: state norm collapsed");
  v.v /= n;
}

IdealTrajectory simulate_ideal(const ReducedKet& v0, const SystemParams& params,
                               std::uint64_t seed, int decimation) {
  params.validate();
  IdealTrajectory out;
  out.params_digest = params_digest(params);
  out.seed = seed;
  out.dt = params.dt;
  out.n_steps = params.n_steps();
  out.decimation = decimation;
  out.record.reserve(out.n_steps);

  const CounterRng rng(seed);
  const double sqrt_dt = std::sqrt(params.dt);
  out.series = drive(v0, params, decimation,
                     [&](std::uint64_t k, double m, double alpha) {
                       const double dW = sqrt_dt * rng.normal(k, kStreamHomodyne);
                       const double dY = 2.0 * alpha * m * params.dt + dW;
                       out.record.push_back(dY);
                       return dY;
                     });
  return out;
}

ReducedSeries run_on_record(const ReducedKet& v0, std::span<const double> record,
                            const SystemParams& params, int decimation) {
  params.validate();
  if (record.empty()) {
    // No increments to replay: report the initial state and stop.
    ReducedSeries out;
    const double m = mean_parity(v0);
    out.t.push_back(0.0);
    out.mean_pi.push_back(m);
    out.var_pi.push_back(1.0 - m * m);
    return out;
  }
  if (record.size() != params.n_steps())
    throw std::invalid_argument("run_on_record: record length != n_steps");
  return drive(v0, params, decimation,
               [&](std::uint64_t k, double, double) { return record[k]; });
}

}  // namespace qpl
