#include "qpl/sde.hpp"

#include <cmath>
#include <utility>

namespace qpl {
namespace {

using cd = std::complex<double>;

constexpr double kNormCollapse = 1e-8;

// Real-valued CSR view of a catalog operator. Every operator the catalog
// produces is exactly real in this basis (all couplings and the drive are
// real), which the hot loop exploits; a complex entry is a logic error.
struct RealCsr {
  int rows = 0;
  std::vector<int> rowptr;
  std::vector<int> col;
  std::vector<double> val;

  void from(const SpMat& m) {
    SpMat c = m;
    c.makeCompressed();
    rows = static_cast<int>(c.rows());
    rowptr.assign(c.outerIndexPtr(), c.outerIndexPtr() + c.outerSize() + 1);
    col.assign(c.innerIndexPtr(), c.innerIndexPtr() + c.nonZeros());
    val.resize(c.nonZeros());
    const cd* cv = c.valuePtr();
    for (Eigen::Index k = 0; k < c.nonZeros(); ++k) {
      if (cv[k].imag() != 0.0)
        throw std::logic_error("stepper kernel: operator entry not real");
      val[k] = cv[k].real();
    }
  }

  void apply(const cd* x, cd* y) const {
    for (int r = 0; r < rows; ++r) {
      double re = 0.0, im = 0.0;
      for (int k = rowptr[r]; k < rowptr[r + 1]; ++k) {
        const cd& xv = x[col[k]];
        re += val[k] * xv.real();
        im += val[k] * xv.imag();
      }
      y[r] = cd(re, im);
    }
  }
};

struct Kernel {
  SystemParams p;
  SpaceSpec space;
  double gamma2 = 0.0, gamma = 0.0, dt = 0.0;
  RealCsr L0, L0d, D, XX;
  std::vector<int> e_idx[2];
  std::vector<std::pair<int, int>> jump_map[2];  // (dst, src)
  std::vector<double> zz_sign;
  std::vector<int> top_idx[2];
  Eigen::VectorXcd w, u, y, scratch;

  explicit Kernel(const OperatorCatalog& c) : p(c.params), space(c.space) {
    gamma2 = p.gamma2();
    gamma = std::sqrt(gamma2);
    dt = p.dt;
    L0.from(c.measurement_L0);
    L0d.from(SpMat(c.measurement_L0.adjoint()));
    D.from(c.drift_const);
    XX.from(c.xx);

    const int N = space.fock_dim;
    zz_sign.resize(space.dim());
    for (int a1 = 0; a1 < kAtomDim; ++a1)
      for (int n1 = 0; n1 < N; ++n1)
        for (int a2 = 0; a2 < kAtomDim; ++a2)
          for (int n2 = 0; n2 < N; ++n2) {
            const int i = space.index(a1, n1, a2, n2);
            const double z1 = a1 == kAtomMinus ? -1.0 : 1.0;
            const double z2 = a2 == kAtomMinus ? -1.0 : 1.0;
            zz_sign[i] = z1 * z2;
            if (a1 == kAtomExcited) e_idx[0].push_back(i);
            if (a2 == kAtomExcited) e_idx[1].push_back(i);
            if (n1 == N - 1) top_idx[0].push_back(i);
            if (n2 == N - 1) top_idx[1].push_back(i);
            if (a1 == kAtomExcited)
              jump_map[0].emplace_back(space.index(kAtomPlus, n1, a2, n2), i);
            if (a2 == kAtomExcited)
              jump_map[1].emplace_back(space.index(a1, n1, kAtomPlus, n2), i);
          }
    w.resize(space.dim());
    u.resize(space.dim());
    y.resize(space.dim());
    scratch.resize(space.dim());
  }

  static double population(const Eigen::VectorXcd& v, const std::vector<int>& idx) {
    double s = 0.0;
    for (int i : idx) s += std::norm(v(i));
    return s;
  }

  StepOutcome step(Eigen::VectorXcd& v, double t, const StepNoise& nz) {
    StepOutcome out;
    for (int ch = 0; ch < 2; ++ch) {
      const double p_jump = gamma2 * population(v, e_idx[ch]) * dt;
      if (nz.jump_u[ch] < p_jump) {
        scratch.setZero();
        for (const auto& [dst, src] : jump_map[ch]) scratch(dst) = gamma * v(src);
        v.swap(scratch);
        const double n = v.norm();
        if (!(n > kNormCollapse) || !std::isfinite(n))
          throw std::runtime_error("norm collapse at jump");
        v /= n;
        out.jumped[ch] = true;
      }
    }

    const double alpha = probe_amplitude(p, t);
    const cd* vp = v.data();
    L0.apply(vp, w.data());
    L0d.apply(vp, u.data());
    D.apply(vp, y.data());
    double s = 0.0;
    const int dim = static_cast<int>(v.size());
    for (int i = 0; i < dim; ++i)
      s += vp[i].real() * w(i).real() + vp[i].imag() * w(i).imag();
    const double mean_rate = 2.0 * s + 2.0 * alpha;
    const double dY0 = mean_rate * dt + nz.dW;
    out.dY0 = dY0;

    const double cv = 1.0 + alpha * dY0 - 0.5 * alpha * alpha * dt;
    const double cu = -alpha * dt;
    double norm_sq = 0.0;
    for (int i = 0; i < dim; ++i) {
      const cd next = cv * v(i) + dY0 * w(i) + dt * y(i) + cu * u(i);
      v(i) = next;
      norm_sq += std::norm(next);
    }
    const double n = std::sqrt(norm_sq);
    if (!(n > kNormCollapse) || !std::isfinite(n))
      throw std::runtime_error("norm collapse in diffusive update");
    v /= n;
    return out;
  }

  // One decimated row; also returns the top-Fock leakage for the monitor.
  double observe(const Eigen::VectorXcd& v, double t, double* row) {
    row[kObsT] = t;
    double mean_zz = 0.0;
    for (int i = 0; i < static_cast<int>(zz_sign.size()); ++i)
      mean_zz += zz_sign[i] * std::norm(v(i));
    row[kObsMeanZZ] = mean_zz;
    row[kObsVarZZ] = std::max(0.0, 1.0 - mean_zz * mean_zz);

    XX.apply(v.data(), scratch.data());
    double second = 0.0, first = 0.0;
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
      second += std::norm(scratch(i));
      first += v(i).real() * scratch(i).real() + v(i).imag() * scratch(i).imag();
    }
    row[kObsVarXX] = std::max(0.0, second - first * first);

    double even = 0.0, odd = 0.0;
    const int N = space.fock_dim;
    for (int n1 = 0; n1 < N; ++n1)
      for (int n2 = 0; n2 < N; ++n2) {
        const cd pp = v(space.index(kAtomPlus, n1, kAtomPlus, n2));
        const cd mm = v(space.index(kAtomMinus, n1, kAtomMinus, n2));
        const cd pm = v(space.index(kAtomPlus, n1, kAtomMinus, n2));
        const cd mp = v(space.index(kAtomMinus, n1, kAtomPlus, n2));
        even += 0.5 * std::norm(pp + mm);
        odd += 0.5 * std::norm(pm + mp);
      }
    row[kObsBellPlus] = even;
    row[kObsBellMinus] = odd;
    row[kObsPopE1] = population(v, e_idx[0]);
    row[kObsPopE2] = population(v, e_idx[1]);

    L0.apply(v.data(), w.data());
    double s = 0.0;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
      s += v(i).real() * w(i).real() + v(i).imag() * w(i).imag();
    row[kObsHomodyneRate] = 2.0 * s + 2.0 * probe_amplitude(p, t);

    return population(v, top_idx[0]) + population(v, top_idx[1]);
  }
};

}  // namespace

StepNoise draw_step_noise(const CounterRng& rng, std::uint64_t step, double dt) {
  StepNoise nz;
  nz.dW = std::sqrt(dt) * rng.normal(step, kStreamHomodyne);
  const auto u = rng.uniform2(step, kStreamJumps);
  nz.jump_u = {u[0], u[1]};
  return nz;
}

StepOutcome euler_step(Ket& v, double t, const StepNoise& noise,
                       const OperatorCatalog& catalog) {
  const SystemParams& p = catalog.params;
  StepOutcome out;
  const SpMat* sigmas[2] = {&catalog.sigma1, &catalog.sigma2};
  const SpMat* jumps[2] = {&catalog.jump1, &catalog.jump2};
  for (int ch = 0; ch < 2; ++ch) {
    const double pe = (*sigmas[ch] * v).squaredNorm();  // ⟨σ†σ⟩
    if (noise.jump_u[ch] < p.gamma2() * pe * p.dt) {
      v = *jumps[ch] * v;
      const double n = v.norm();
      if (!(n > kNormCollapse) || !std::isfinite(n))
        throw TrajectoryFailure(0, 0, "euler_step: norm collapse at jump");
      v /= n;
      out.jumped[ch] = true;
    }
  }

  const double alpha = probe_amplitude(p, t);
  const Ket w = catalog.measurement_L0 * v;
  const double mean_rate = 2.0 * v.dot(w).real() + 2.0 * alpha;
  const double dY0 = mean_rate * p.dt + noise.dW;
  out.dY0 = dY0;

  v = (1.0 + alpha * dY0 - 0.5 * alpha * alpha * p.dt) * v + dY0 * w +
      p.dt * (catalog.drift_const * v) +
      alpha * p.dt * (catalog.drift_linear_in_alpha * v);
  const double n = v.norm();
  if (!(n > kNormCollapse) || !std::isfinite(n))
    throw TrajectoryFailure(0, 0, "euler_step: norm collapse");
  v /= n;
  return out;
}

TruncationError::TruncationError(int fock_dim_, double leakage_, double t_)
    : std::runtime_error("truncation leakage " + std::to_string(leakage_) +
                         " at t=" + std::to_string(t_) + " exceeds " +
                         std::to_string(kTailErrorThreshold) +
                         "; increase fock_dim beyond " + std::to_string(fock_dim_)),
      fock_dim(fock_dim_),
      leakage(leakage_),
      t(t_) {}

TrajectoryFailure::TrajectoryFailure(std::uint64_t seed_, std::uint64_t step_,
                                     const std::string& what)
    : std::runtime_error(what), seed(seed_), step(step_) {}

TrajectoryRecord simulate(const OperatorCatalog& catalog, const Ket& v0,
                          std::uint64_t seed, int decimation) {
  const SystemParams& p = catalog.params;
  p.validate();
  if (decimation < 1) throw std::invalid_argument("simulate: decimation must be >= 1");
  if (v0.size() != catalog.space.dim())
    throw std::invalid_argument("simulate: v0 does not match the space");
  if (std::abs(v0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("simulate: v0 must be normalized");

  Kernel kernel(catalog);
  TrajectoryRecord rec;
  rec.params_digest = params_digest(p);
  rec.seed = seed;
  rec.dt = p.dt;
  rec.n_steps = p.n_steps();
  rec.decimation = decimation;
  rec.obs_ids = trajectory_observable_ids();
  rec.n_rows = rec.n_steps / static_cast<std::uint64_t>(decimation);
  rec.obs.resize(rec.n_rows * rec.obs_ids.size());
  rec.dY0.reserve(rec.n_steps);

  const CounterRng rng(seed);
  Eigen::VectorXcd v = v0;
  std::uint64_t row = 0;
  for (std::uint64_t k = 0; k < rec.n_steps; ++k) {
    const double t = static_cast<double>(k) * p.dt;
    if (k % static_cast<std::uint64_t>(decimation) == 0 && row < rec.n_rows) {
      const double leak =
          kernel.observe(v, t, &rec.obs[row * rec.obs_ids.size()]);
      rec.max_top_fock_pop = std::max(rec.max_top_fock_pop, leak);
      if (leak > kTailErrorThreshold)
        throw TruncationError(p.fock_dim, leak, t);
      ++row;
    }
    const StepNoise nz = draw_step_noise(rng, k, p.dt);
    StepOutcome outcome;
    try {
      outcome = kernel.step(v, t, nz);
    } catch (const std::runtime_error& e) {
      throw TrajectoryFailure(seed, k, e.what());
    }
    rec.dY0.push_back(outcome.dY0);
    for (int ch = 0; ch < 2; ++ch)
      if (outcome.jumped[ch]) rec.jumps.push_back({t, ch});
  }
  return rec;
}

SteadyState steady_state_oracle(bool atom1_coupled, bool atom2_coupled,
                                const SystemParams& params) {
  const double kappa = params.kappa();
  const cd in1 = params.alpha_max;
  SteadyState s;
  cd out1;
  if (atom1_coupled) {
    s.beta1 = 0.0;
    out1 = in1;
  } else {
    s.beta1 = -2.0 * in1 / kappa;
    out1 = in1 + kappa * s.beta1;
  }
  cd out2;
  if (atom2_coupled) {
    s.beta2 = 0.0;
    out2 = out1;
  } else {
    s.beta2 = -2.0 * out1 / kappa;
    out2 = out1 + kappa * s.beta2;
  }
  s.homodyne_mean_rate = 2.0 * out2.real();
  return s;
}

}  // namespace qpl
