#include <doctest.h>

#include <cmath>
#include <complex>

#include "qpl/observables.hpp"
#include "qpl/ops.hpp"
#include "qpl/space.hpp"

namespace {

using cd = std::complex<double>;

qpl::Ket bell_even_over_vacuum(const qpl::SpaceSpec& s) {
  qpl::Ket v = qpl::Ket::Zero(s.dim());
  v(s.index(qpl::kAtomPlus, 0, qpl::kAtomPlus, 0)) = 1.0 / std::sqrt(2.0);
  v(s.index(qpl::kAtomMinus, 0, qpl::kAtomMinus, 0)) = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_CASE("expectation and variance of the parity word") {
  qpl::SystemParams p;
  p.fock_dim = 3;
  const qpl::OperatorCatalog cat = qpl::build_catalog(p);
  const qpl::SpaceSpec& s = cat.space;

  SUBCASE("eigenstates have zero variance") {
    const qpl::Ket uu = qpl::pinned_initial_state(s, true, true);
    CHECK(qpl::expectation(cat.zz, uu).real() == doctest::Approx(1.0));
    CHECK(qpl::variance(cat.zz, uu) == doctest::Approx(0.0));
    const qpl::Ket ud = qpl::pinned_initial_state(s, true, false);
    CHECK(qpl::expectation(cat.zz, ud).real() == doctest::Approx(-1.0));
    CHECK(qpl::variance(cat.zz, ud) == doctest::Approx(0.0));
  }

  SUBCASE("uniform superposition starts at mean 0, variance 1") {
    const qpl::Ket v = qpl::superposition_initial_state(s);
    CHECK(std::abs(qpl::expectation(cat.zz, v)) < 1e-14);
    CHECK(qpl::variance(cat.zz, v) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("variance is clamped against roundoff") {
    const qpl::Ket uu = qpl::pinned_initial_state(s, true, true);
    CHECK(qpl::variance(cat.zz, uu) >= 0.0);
  }
}

TEST_CASE("Bell overlaps on the ground-qubit subspace") {
  const qpl::SpaceSpec s{3};

  SUBCASE("uniform superposition splits half even, half odd") {
    const auto b = qpl::bell_overlaps(s, qpl::superposition_initial_state(s));
    CHECK(b[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("even Bell state over vacuum scores (1, 0)") {
    const auto b = qpl::bell_overlaps(s, bell_even_over_vacuum(s));
    CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(0.0));
  }

  SUBCASE("product |+-> scores (0, 1/2)") {
    qpl::Ket v = qpl::Ket::Zero(s.dim());
    v(s.index(qpl::kAtomPlus, 0, qpl::kAtomMinus, 0)) = 1.0;
    const auto b = qpl::bell_overlaps(s, v);
    CHECK(b[0] == doctest::Approx(0.0));
    CHECK(b[1] == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("overlap sums coherently per cavity occupation") {
    qpl::Ket v = qpl::Ket::Zero(s.dim());
    v(s.index(qpl::kAtomPlus, 1, qpl::kAtomPlus, 0)) = 1.0 / std::sqrt(2.0);
    v(s.index(qpl::kAtomMinus, 1, qpl::kAtomMinus, 0)) = 1.0 / std::sqrt(2.0);
    const auto b = qpl::bell_overlaps(s, v);
    CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("excited population counts as neither family") {
    qpl::Ket v = qpl::Ket::Zero(s.dim());
    v(s.index(qpl::kAtomExcited, 0, qpl::kAtomExcited, 0)) = 1.0;
    const auto b = qpl::bell_overlaps(s, v);
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.0);
  }
}

TEST_CASE("fractional residual error") {
  CHECK(qpl::fractional_residual_error(0.5, 0.5) == 0.0);
  CHECK(qpl::fractional_residual_error(1e-4, 1.8e-4) ==
        doctest::Approx(0.8).epsilon(1e-12));
  CHECK(qpl::fractional_residual_error(0.0, 0.0) == 0.0);
  CHECK(qpl::fractional_residual_error(0.0, 1e-12) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(qpl::fractional_residual_error(2e-4, 1e-4) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Fisher information rate of the intra-parity angle") {
  const qpl::SystemParams p;
  CHECK(qpl::fisher_information(p, 0.0) == 0.0);
  CHECK(qpl::fisher_information(p, M_PI / 4.0) ==
        doctest::Approx(8.1e-5).epsilon(1e-10));
  // maximized on the Bell states (theta = pi/4 mod pi/2)
  const double peak = qpl::fisher_information(p, M_PI / 4.0);
  for (const double theta : {0.1, 0.5, 1.0, 1.4})
    CHECK(qpl::fisher_information(p, theta) <= peak + 1e-18);
  CHECK(qpl::fisher_information(p, 3.0 * M_PI / 4.0) ==
        doctest::Approx(peak).epsilon(1e-12));
}

TEST_CASE("equilibrium lower bound on Var(XX)") {
  qpl::SystemParams p;
  CHECK(qpl::xx_variance_bound(p) == doctest::Approx(0.0349309).epsilon(1e-5));
  p.alpha_max = 0.0;
  CHECK(qpl::xx_variance_bound(p) == 0.0);
  qpl::SystemParams hi;
  hi.alpha_max = 0.3;
  CHECK(qpl::xx_variance_bound(hi) > qpl::xx_variance_bound(qpl::SystemParams{}));
}

TEST_CASE("trajectory observable column order") {
  const auto& ids = qpl::trajectory_observable_ids();
  REQUIRE(ids.size() == qpl::kTrajObsCount);
  CHECK(ids[qpl::kObsT] == "t");
  CHECK(ids[qpl::kObsVarZZ] == "var_zz");
  CHECK(ids[qpl::kObsVarXX] == "var_xx");
  CHECK(ids[qpl::kObsMeanZZ] == "mean_zz");
  CHECK(ids[qpl::kObsBellPlus] == "bell_plus");
  CHECK(ids[qpl::kObsBellMinus] == "bell_minus");
  CHECK(ids[qpl::kObsPopE1] == "pop_e1");
  CHECK(ids[qpl::kObsPopE2] == "pop_e2");
  CHECK(ids[qpl::kObsHomodyneRate] == "homodyne_mean_rate");
}
