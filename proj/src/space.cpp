#include "qpl/space.hpp"

#include <cmath>
#include <stdexcept>

namespace qpl {

Ket basis_ket(const SpaceSpec& space, int a1, int n1, int a2, int n2) {
  Ket v = Ket::Zero(space.dim());
  v(space.index(a1, n1, a2, n2)) = 1.0;
  return v;
}

Eigen::VectorXcd coherent_state(int fock_dim, std::complex<double> beta) {
  Eigen::VectorXcd v(fock_dim);
  const double scale = std::exp(-0.5 * std::norm(beta));
  std::complex<double> amp = scale;
  v(0) = amp;
  for (int n = 1; n < fock_dim; ++n) {
    amp *= beta / std::sqrt(static_cast<double>(n));
    v(n) = amp;
  }
  return v;
}

Ket product_ket(const SpaceSpec& space, const Eigen::Vector3cd& atom1,
                const Eigen::VectorXcd& cav1, const Eigen::Vector3cd& atom2,
                const Eigen::VectorXcd& cav2) {
  if (cav1.size() != space.fock_dim || cav2.size() != space.fock_dim)
    throw std::invalid_argument("product_ket: cavity factor length mismatch");
  Ket v(space.dim());
  for (int a1 = 0; a1 < kAtomDim; ++a1)
    for (int n1 = 0; n1 < space.fock_dim; ++n1)
      for (int a2 = 0; a2 < kAtomDim; ++a2)
        for (int n2 = 0; n2 < space.fock_dim; ++n2)
          v(space.index(a1, n1, a2, n2)) =
              atom1(a1) * cav1(n1) * atom2(a2) * cav2(n2);
  return v;
}

Ket superposition_initial_state(const SpaceSpec& space) {
  Eigen::Vector3cd atom;
  atom << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  // Atom order is (|−⟩, |+⟩, |e⟩); the superposition weights |−⟩ and |+⟩.
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(space.fock_dim);
  vac(0) = 1.0;
  return product_ket(space, atom, vac, atom, vac);
}

Ket pinned_initial_state(const SpaceSpec& space, bool atom1_coupled,
                         bool atom2_coupled) {
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(space.fock_dim);
  vac(0) = 1.0;
  Eigen::Vector3cd a1 = Eigen::Vector3cd::Zero();
  Eigen::Vector3cd a2 = Eigen::Vector3cd::Zero();
  a1(atom1_coupled ? kAtomPlus : kAtomMinus) = 1.0;
  a2(atom2_coupled ? kAtomPlus : kAtomMinus) = 1.0;
  return product_ket(space, a1, vac, a2, vac);
}

void normalize(Ket& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw std::runtime_error("normalize: state norm is not finite-positive");
  v /= n;
}

}  // namespace qpl
