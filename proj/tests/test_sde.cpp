#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "qpl/observables.hpp"
#include "qpl/ops.hpp"
#include "qpl/rng.hpp"
#include "qpl/sde.hpp"
#include "qpl/space.hpp"

namespace {

using cd = std::complex<double>;

qpl::SystemParams flat_params(double t_final, double dt) {
  qpl::SystemParams p;
  p.t_final = t_final;
  p.dt = dt;
  p.ramp.t_on = 0.0;
  p.ramp.t_rise = 0.0;
  p.ramp.t_off = t_final;
  p.ramp.t_fall = 0.0;
  return p;
}

// State with both atoms dark and the cavities at the exact cascade amplitudes.
qpl::Ket dark_cascade_state(const qpl::SpaceSpec& s, const qpl::SystemParams& p) {
  const double two_a_k = 2.0 * p.alpha_max / p.kappa();
  Eigen::Vector3cd dark = Eigen::Vector3cd::Zero();
  dark(qpl::kAtomMinus) = 1.0;
  qpl::Ket v = qpl::product_ket(s, dark, qpl::coherent_state(s.fock_dim, -two_a_k),
                                dark, qpl::coherent_state(s.fock_dim, +two_a_k));
  qpl::normalize(v);
  return v;
}

}  // namespace

TEST_CASE("step noise comes off the two counter streams") {
  const qpl::CounterRng rng(31);
  const double dt = 2e-4;
  const qpl::StepNoise nz = qpl::draw_step_noise(rng, 12, dt);
  CHECK(nz.dW ==
        doctest::Approx(std::sqrt(dt) * rng.normal(12, qpl::kStreamHomodyne))
            .epsilon(1e-14));
  const auto u = rng.uniform2(12, qpl::kStreamJumps);
  CHECK(nz.jump_u[0] == u[0]);
  CHECK(nz.jump_u[1] == u[1]);
}

TEST_CASE("cascade steady-state oracle covers the four pinned sectors") {
  const qpl::SystemParams p;
  const double s = 2.0 * p.alpha_max / p.kappa();  // 2α/κ

  const qpl::SteadyState uu = qpl::steady_state_oracle(true, true, p);
  CHECK(std::abs(uu.beta1) < 1e-15);
  CHECK(std::abs(uu.beta2) < 1e-15);
  CHECK(uu.homodyne_mean_rate == doctest::Approx(0.4).epsilon(1e-12));

  const qpl::SteadyState ud = qpl::steady_state_oracle(true, false, p);
  CHECK(std::abs(ud.beta1) < 1e-15);
  CHECK(ud.beta2.real() == doctest::Approx(-s).epsilon(1e-12));
  CHECK(ud.homodyne_mean_rate == doctest::Approx(-0.4).epsilon(1e-12));

  const qpl::SteadyState du = qpl::steady_state_oracle(false, true, p);
  CHECK(du.beta1.real() == doctest::Approx(-s).epsilon(1e-12));
  CHECK(std::abs(du.beta2) < 1e-15);
  CHECK(du.homodyne_mean_rate == doctest::Approx(-0.4).epsilon(1e-12));

  const qpl::SteadyState dd = qpl::steady_state_oracle(false, false, p);
  CHECK(dd.beta1.real() == doctest::Approx(-s).epsilon(1e-12));
  CHECK(dd.beta2.real() == doctest::Approx(+s).epsilon(1e-12));
  CHECK(dd.homodyne_mean_rate == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("with the probe off the empty ground state is inert") {
  qpl::SystemParams p;  // default ramp: alpha(0) = 0
  p.fock_dim = 4;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  qpl::Ket v = qpl::superposition_initial_state(cat.space);
  const qpl::Ket before = v;
  qpl::StepNoise nz;
  nz.dW = 0.3;
  const qpl::StepOutcome out = qpl::euler_step(v, 0.0, nz, cat);
  CHECK(out.dY0 == doctest::Approx(0.3).epsilon(1e-14));
  CHECK_FALSE(out.jumped[0]);
  CHECK_FALSE(out.jumped[1]);
  CHECK((v - before).norm() < 1e-14);
}

TEST_CASE("an excited atom leaks into |+,1> at rate g and decays at gamma^2/2") {
  qpl::SystemParams p;
  p.fock_dim = 4;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  const qpl::SpaceSpec& s = cat.space;
  qpl::Ket v = qpl::basis_ket(s, qpl::kAtomExcited, 0, qpl::kAtomMinus, 0);
  qpl::StepNoise quiet;  // dW = 0, jump uniforms at 1 → never fire
  const qpl::StepOutcome out = qpl::euler_step(v, 0.0, quiet, cat);
  CHECK(out.dY0 == doctest::Approx(0.0));
  CHECK_FALSE(out.jumped[0]);
  const cd exc = v(s.index(qpl::kAtomExcited, 0, qpl::kAtomMinus, 0));
  const cd gnd = v(s.index(qpl::kAtomPlus, 1, qpl::kAtomMinus, 0));
  const double want = -p.g * p.dt / (1.0 - 0.5 * p.gamma2() * p.dt);
  CHECK((gnd / exc).real() == doctest::Approx(want).epsilon(1e-12));
  CHECK(std::abs((gnd / exc).imag()) < 1e-15);
}

TEST_CASE("a counting-channel event replaces the state with the lowered one") {
  qpl::SystemParams p;
  p.fock_dim = 4;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  const qpl::SpaceSpec& s = cat.space;

  SUBCASE("uniform below gamma^2 <sigma'sigma> dt fires the jump") {
    qpl::Ket v = qpl::basis_ket(s, qpl::kAtomExcited, 0, qpl::kAtomMinus, 0);
    qpl::StepNoise nz;
    nz.jump_u = {1e-4, 1.0};  // p_jump = 1 * 1 * 2e-4
    const qpl::StepOutcome out = qpl::euler_step(v, 0.0, nz, cat);
    CHECK(out.jumped[0]);
    CHECK_FALSE(out.jumped[1]);
    const cd amp = v(s.index(qpl::kAtomPlus, 0, qpl::kAtomMinus, 0));
    CHECK(std::abs(amp) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("uniform above the rate leaves the channel silent") {
    qpl::Ket v = qpl::basis_ket(s, qpl::kAtomExcited, 0, qpl::kAtomMinus, 0);
    qpl::StepNoise nz;
    nz.jump_u = {3e-4, 1.0};
    const qpl::StepOutcome out = qpl::euler_step(v, 0.0, nz, cat);
    CHECK_FALSE(out.jumped[0]);
    const cd exc = v(s.index(qpl::kAtomExcited, 0, qpl::kAtomMinus, 0));
    CHECK(std::abs(exc) > 0.9);
  }
}

TEST_CASE("homodyne increment reads 2Re<L> dt + dW on the dark cascade state") {
  const qpl::SystemParams p = flat_params(1.0, 2e-4);
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  qpl::Ket v = dark_cascade_state(cat.space, p);
  // beta1 + beta2 = 0, so <L+L'> = 2*alpha = 0.4 exactly
  qpl::StepNoise quiet;
  const qpl::StepOutcome out = qpl::euler_step(v, 0.5, quiet, cat);
  CHECK(out.dY0 == doctest::Approx(0.4 * p.dt).epsilon(1e-10));

  qpl::StepNoise noisy;
  noisy.dW = -0.02;
  qpl::Ket w = dark_cascade_state(cat.space, p);
  const qpl::StepOutcome out2 = qpl::euler_step(w, 0.5, noisy, cat);
  CHECK(out2.dY0 == doctest::Approx(0.4 * p.dt - 0.02).epsilon(1e-10));
}

TEST_CASE("trajectory runner agrees with the reference step to roundoff") {
  qpl::SystemParams p = flat_params(0.2, 1e-3);
  p.fock_dim = 6;
  p.ramp.t_rise = 0.05;
  p.ramp.t_off = 0.15;
  p.ramp.t_fall = 0.05;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  const qpl::Ket v0 = qpl::superposition_initial_state(cat.space);
  const int dec = 20;
  const std::uint64_t seed = 5;
  const qpl::TrajectoryRecord rec = qpl::simulate(cat, v0, seed, dec);
  REQUIRE(rec.n_steps == 200);
  REQUIRE(rec.n_rows == 10);
  REQUIRE(rec.dY0.size() == 200);

  // replay the identical loop through the Eigen-operator reference step
  const qpl::CounterRng rng(seed);
  qpl::Ket v = v0;
  std::uint64_t row = 0;
  int jump_count = 0;
  for (std::uint64_t k = 0; k < rec.n_steps; ++k) {
    const double t = double(k) * p.dt;
    if (k % dec == 0 && row < rec.n_rows) {
      const double alpha = qpl::probe_amplitude(p, t);
      const auto bell = qpl::bell_overlaps(cat.space, v);
      CHECK(rec.obs_at(row, qpl::kObsT) == doctest::Approx(t).epsilon(1e-14));
      CHECK(rec.obs_at(row, qpl::kObsVarZZ) ==
            doctest::Approx(qpl::variance(cat.zz, v)).epsilon(1e-9));
      CHECK(rec.obs_at(row, qpl::kObsVarXX) ==
            doctest::Approx(qpl::variance(cat.xx, v)).epsilon(1e-9));
      CHECK(std::abs(rec.obs_at(row, qpl::kObsMeanZZ) -
                     qpl::expectation(cat.zz, v).real()) < 1e-10);
      CHECK(std::abs(rec.obs_at(row, qpl::kObsBellPlus) - bell[0]) < 1e-10);
      CHECK(std::abs(rec.obs_at(row, qpl::kObsBellMinus) - bell[1]) < 1e-10);
      CHECK(std::abs(rec.obs_at(row, qpl::kObsPopE1) -
                     qpl::Ket(cat.sigma1 * v).squaredNorm()) < 1e-10);
      CHECK(std::abs(rec.obs_at(row, qpl::kObsPopE2) -
                     qpl::Ket(cat.sigma2 * v).squaredNorm()) < 1e-10);
      const double rate =
          2.0 * qpl::expectation(cat.measurement_L0, v).real() + 2.0 * alpha;
      CHECK(std::abs(rec.obs_at(row, qpl::kObsHomodyneRate) - rate) < 1e-10);
      ++row;
    }
    const qpl::StepNoise nz = qpl::draw_step_noise(rng, k, p.dt);
    const qpl::StepOutcome out = qpl::euler_step(v, t, nz, cat);
    CHECK(std::abs(out.dY0 - rec.dY0[k]) < 1e-12);
    jump_count += int(out.jumped[0]) + int(out.jumped[1]);
  }
  CHECK(jump_count == int(rec.jumps.size()));
}

TEST_CASE("identical seeds give identical records") {
  qpl::SystemParams p = flat_params(0.1, 1e-3);
  p.fock_dim = 6;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  const qpl::Ket v0 = qpl::superposition_initial_state(cat.space);
  const qpl::TrajectoryRecord a = qpl::simulate(cat, v0, 3, 10);
  const qpl::TrajectoryRecord b = qpl::simulate(cat, v0, 3, 10);
  const qpl::TrajectoryRecord c = qpl::simulate(cat, v0, 4, 10);
  CHECK(a.dY0 == b.dY0);
  CHECK(a.obs == b.obs);
  CHECK(a.dY0 != c.dY0);
  CHECK(a.params_digest == qpl::params_digest(p));
  CHECK(a.obs_ids == qpl::trajectory_observable_ids());
  // first row samples the initial state
  CHECK(a.obs_at(0, qpl::kObsVarZZ) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.obs_at(0, qpl::kObsBellPlus) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("halving the step along a shared Brownian path shrinks the error") {
  qpl::SystemParams coarse = flat_params(0.1, 1e-3);
  coarse.fock_dim = 6;
  const qpl::OperatorCatalog cat = qpl::build_catalog(coarse);
  const qpl::Ket v0 = qpl::superposition_initial_state(cat.space);
  const qpl::CounterRng rng(21);

  // finest increments are the source of truth; coarser runs sum them
  const int n_fine = 400;
  const double dt_fine = 0.1 / n_fine;
  std::vector<double> dw(n_fine);
  for (int k = 0; k < n_fine; ++k)
    dw[k] = std::sqrt(dt_fine) * rng.normal(std::uint64_t(k), qpl::kStreamHomodyne);

  const auto run_at = [&](int stride) {
    qpl::SystemParams p = coarse;
    p.dt = dt_fine * stride;
    const qpl::OperatorCatalog c = qpl::build_catalog(p);
    qpl::Ket v = v0;
    for (int k = 0; k < n_fine; k += stride) {
      qpl::StepNoise nz;  // jumps held off so every run sees the same events
      for (int j = 0; j < stride; ++j) nz.dW += dw[k + j];
      qpl::euler_step(v, double(k) * dt_fine, nz, c);
    }
    return v;
  };

  const qpl::Ket fine = run_at(1);
  const double err2 = (run_at(2) - fine).norm();
  const double err4 = (run_at(4) - fine).norm();
  CHECK(err4 < 0.05);
  CHECK(err2 < err4);
}

TEST_CASE("deterministic pinned runs land on the cascade steady values") {
  // Innovations forced to zero: the conditional means follow their ODEs, so
  // the late-time state exposes the exact cascade amplitudes.
  const double tol_beta = 3e-4, tol_rate = 8e-4;

  SUBCASE("dark-dark: exact at any coupling") {
    const qpl::SystemParams p = flat_params(3.0, 2e-4);
    const qpl::OperatorCatalog cat = qpl::build_catalog(p);
    qpl::Ket v = qpl::pinned_initial_state(cat.space, false, false);
    qpl::StepNoise quiet;
    for (std::uint64_t k = 0; k < p.n_steps(); ++k)
      qpl::euler_step(v, double(k) * p.dt, quiet, cat);
    const cd b1 = qpl::expectation(cat.b1, v);
    const cd b2 = qpl::expectation(cat.b2, v);
    CHECK(std::abs(b1 - cd(-2.0 * 0.2 / 3.0)) < tol_beta);
    CHECK(std::abs(b2 - cd(+2.0 * 0.2 / 3.0)) < tol_beta);
    const double rate =
        2.0 * qpl::expectation(cat.measurement_L0, v).real() + 2.0 * 0.2;
    CHECK(std::abs(rate - 0.4) < tol_rate);
  }

  SUBCASE("coupled-coupled: residual amplitude and excited population") {
    const qpl::SystemParams p = flat_params(3.0, 2e-4);
    const qpl::OperatorCatalog cat = qpl::build_catalog(p);
    qpl::Ket v = qpl::pinned_initial_state(cat.space, true, true);
    qpl::StepNoise quiet;
    for (std::uint64_t k = 0; k < p.n_steps(); ++k)
      qpl::euler_step(v, double(k) * p.dt, quiet, cat);
    // linear response: beta = −κα/(κ²/2 + 2g²/γ²), reflectance r = 1 − κ²/(…)
    const double denom = p.kappa2_half + 2.0 * p.g * p.g / p.gamma2();
    const double beta = -p.kappa() * p.alpha_max / denom;
    const double r = 1.0 - p.kappa() * p.kappa() / denom;
    const cd b1 = qpl::expectation(cat.b1, v);
    const cd b2 = qpl::expectation(cat.b2, v);
    CHECK(std::abs(b1 - cd(beta)) < 3e-5);
    CHECK(std::abs(b2 - cd(beta * r)) < 3e-5);
    const double rate =
        2.0 * qpl::expectation(cat.measurement_L0, v).real() + 2.0 * 0.2;
    CHECK(std::abs(rate - 2.0 * 0.2 * r * r) < tol_rate);
    const double pop1 = qpl::Ket(cat.sigma1 * v).squaredNorm();
    const double pop_want = std::pow(2.0 * p.g * beta / p.gamma2(), 2.0);
    CHECK(pop1 == doctest::Approx(pop_want).epsilon(0.05));
  }
}

TEST_CASE("sigma_z sectors are conserved through drive, noise, and decay") {
  qpl::SystemParams p = flat_params(0.5, 2e-4);
  p.fock_dim = 6;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  const qpl::Ket v0 = qpl::pinned_initial_state(cat.space, false, true);
  const qpl::TrajectoryRecord rec = qpl::simulate(cat, v0, 11, 50);
  for (std::uint64_t row = 0; row < rec.n_rows; ++row) {
    CHECK(rec.obs_at(row, qpl::kObsMeanZZ) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rec.obs_at(row, qpl::kObsVarZZ) < 1e-12);
  }
}

TEST_CASE("truncation monitor aborts when the top Fock level populates") {
  qpl::SystemParams p = flat_params(5.0, 2e-4);
  p.fock_dim = 2;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  const qpl::Ket v0 = qpl::superposition_initial_state(cat.space);
  CHECK_THROWS_AS(qpl::simulate(cat, v0, 1, 50), qpl::TruncationError);
  try {
    qpl::simulate(cat, v0, 1, 50);
  } catch (const qpl::TruncationError& e) {
    CHECK(e.fock_dim == 2);
    CHECK(e.leakage > qpl::kTailErrorThreshold);
    CHECK(e.t > 0.0);
  }
}

TEST_CASE("simulate validates its inputs") {
  qpl::SystemParams p = flat_params(0.1, 1e-3);
  p.fock_dim = 4;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  qpl::Ket bad_size = qpl::Ket::Zero(7);
  CHECK_THROWS_AS(qpl::simulate(cat, bad_size, 1, 10), std::invalid_argument);
  qpl::Ket unnormalized = 0.5 * qpl::superposition_initial_state(cat.space);
  CHECK_THROWS_AS(qpl::simulate(cat, unnormalized, 1, 10), std::invalid_argument);
  const qpl::Ket v0 = qpl::superposition_initial_state(cat.space);
  CHECK_THROWS_AS(qpl::simulate(cat, v0, 1, 0), std::invalid_argument);
}
