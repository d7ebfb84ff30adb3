// ops.hpp — sparse operators on the joint space and the model's operator
// catalog: constant drift, drive-linear drift, homodyne measurement operator,
// and the two spontaneous-emission jump operators.
#pragma once

#include <complex>

#include <Eigen/Sparse>

#include "qpl/params.hpp"
#include "qpl/space.hpp"

namespace qpl {

using SpMat = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;

// Single-factor building blocks.
SpMat annihilation(int fock_dim);  // b|n⟩ = √n |n−1⟩
SpMat atom_sigma();                // σ = |+⟩⟨e|
SpMat atom_sigma_z();              // |e⟩⟨e| + |+⟩⟨+| − |−⟩⟨−|
SpMat atom_sigma_x();              // |−⟩⟨+| + |+⟩⟨−| (ground qubit flip)
SpMat sparse_identity(int d);

SpMat kron(const SpMat& a, const SpMat& b);

// Lift a single-factor operator to the joint space. Slots follow the factor
// order: 0 = atom1, 1 = cavity1, 2 = atom2, 3 = cavity2.
SpMat embed(const SpaceSpec& space, int slot, const SpMat& op);

struct OperatorCatalog {
  SpaceSpec space;
  SystemParams params;

  SpMat b1, b2;            // cavity annihilation
  SpMat sigma1, sigma2;    // atomic lowering |+⟩⟨e|
  SpMat sz1, sz2, zz;      // σZ per atom and the joint parity word
  SpMat sx1, sx2, xx;      // σX per atom and the joint word
  SpMat num1, num2;        // photon number b†b

  // Drift pieces of the state update: the full deterministic drift is
  // drift_const + α(t)·drift_linear_in_alpha − α(t)²/2 · I.
  SpMat drift_const;            // g Σ(σ†b − σb†) − (κ²/2)(n1+n2) − κ² b2†b1 − (γ²/2) Σ σ†σ
  SpMat drift_linear_in_alpha;  // −κ (b1 + b2)†

  SpMat measurement_L0;  // κ (b1 + b2); full L(t) = L0 + α(t)·I
  SpMat jump1, jump2;    // γ σ per atom
};

OperatorCatalog build_catalog(const SystemParams& params);

}  // namespace qpl
