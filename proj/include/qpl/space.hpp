// space.hpp — joint Hilbert space of two atom–cavity systems.
//
// Factor order: atom1 ⊗ cavity1 ⊗ atom2 ⊗ cavity2. Each atom has three
// levels indexed |−⟩=0, |+⟩=1, |e⟩=2 (ground qubit occupies the leading 2×2
// block); each cavity is a Fock space truncated at fock_dim levels.
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qpl {

using Ket = Eigen::VectorXcd;

inline constexpr int kAtomMinus = 0;
inline constexpr int kAtomPlus = 1;
inline constexpr int kAtomExcited = 2;
inline constexpr int kAtomDim = 3;

struct SpaceSpec {
  int fock_dim = 8;

  int dim() const { return kAtomDim * fock_dim * kAtomDim * fock_dim; }

  // Row-major index over (atom1, cav1, atom2, cav2).
  int index(int a1, int n1, int a2, int n2) const {
    return ((a1 * fock_dim + n1) * kAtomDim + a2) * fock_dim + n2;
  }
};

// |a1, n1, a2, n2⟩
Ket basis_ket(const SpaceSpec& space, int a1, int n1, int a2, int n2);

// Truncated coherent state Σ_{n<N} e^{-|β|²/2} βⁿ/√(n!) |n⟩ (not renormalized,
// so the norm deficit measures truncation leakage).
Eigen::VectorXcd coherent_state(int fock_dim, std::complex<double> beta);

// atom1 ⊗ cav1 ⊗ atom2 ⊗ cav2 from single-factor vectors.
Ket product_ket(const SpaceSpec& space, const Eigen::Vector3cd& atom1,
                const Eigen::VectorXcd& cav1, const Eigen::Vector3cd& atom2,
                const Eigen::VectorXcd& cav2);

// Default initial state 2^{-1}((|+⟩+|−⟩) ⊗ |0⟩)^{⊗2}.
Ket superposition_initial_state(const SpaceSpec& space);

// Pinned-parity initial states: each atom in |+⟩ (coupled) or |−⟩
// (uncoupled), both cavities in vacuum.
Ket pinned_initial_state(const SpaceSpec& space, bool atom1_coupled,
                         bool atom2_coupled);

// v / ‖v‖; throws std::runtime_error if the norm is not finite and positive.
void normalize(Ket& v);

}  // namespace qpl
