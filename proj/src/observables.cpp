#include "qpl/observables.hpp"

#include <algorithm>
#include <cmath>

namespace qpl {

std::complex<double> expectation(const SpMat& op, const Ket& v) {
  return v.dot(op * v);  // Eigen's dot conjugates the left argument
}

double variance(const SpMat& op, const Ket& v) {
  const Ket w = op * v;
  const double second = w.squaredNorm();        // ⟨op² ⟩ for Hermitian op
  const double first = v.dot(w).real();         // ⟨op⟩
  return std::max(0.0, second - first * first);
}

std::array<double, 2> bell_overlaps(const SpaceSpec& space, const Ket& v) {
  double even = 0.0, odd = 0.0;
  for (int n1 = 0; n1 < space.fock_dim; ++n1) {
    for (int n2 = 0; n2 < space.fock_dim; ++n2) {
      const std::complex<double> pp = v(space.index(kAtomPlus, n1, kAtomPlus, n2));
      const std::complex<double> mm = v(space.index(kAtomMinus, n1, kAtomMinus, n2));
      const std::complex<double> pm = v(space.index(kAtomPlus, n1, kAtomMinus, n2));
      const std::complex<double> mp = v(space.index(kAtomMinus, n1, kAtomPlus, n2));
      even += 0.5 * std::norm(pp + mm);
      odd += 0.5 * std::norm(pm + mp);
    }
  }
  return {even, odd};
}

double fractional_residual_error(double var_phys, double var_rf) {
  return std::abs(var_phys - var_rf) / std::max(var_phys, 1e-12);
}

double fisher_information(const SystemParams& params, double theta) {
  const double gamma_kappa = std::sqrt(params.gamma2()) * params.kappa();
  const double ratio = gamma_kappa / params.g;
  const double root =
      2.0 * params.alpha_max * std::sin(2.0 * theta) * ratio * ratio;
  return root * root;
}

double xx_variance_bound(const SystemParams& params) {
  const double kappa_sq = 2.0 * params.kappa2_half;
  const double x = 8.0 * params.alpha_max * params.alpha_max / kappa_sq;
  return 1.0 - std::exp(-x);
}

const std::vector<std::string>& trajectory_observable_ids() {
  static const std::vector<std::string> ids = {
      "t",         "var_zz",  "var_xx",  "mean_zz",          "bell_plus",
      "bell_minus", "pop_e1", "pop_e2",  "homodyne_mean_rate"};
  return ids;
}

}  // namespace qpl
