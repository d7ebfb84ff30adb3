// observables.hpp — expectations and derived quantities read off the
// conditional state, plus the closed-form information/bound formulas.
#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "qpl/ops.hpp"
#include "qpl/space.hpp"

namespace qpl {

std::complex<double> expectation(const SpMat& op, const Ket& v);

// ⟨op²⟩ − ⟨op⟩² for Hermitian op, clamped at 0 against roundoff.
double variance(const SpMat& op, const Ket& v);

// Overlaps with the joint-atom Bell states 2^{-1/2}(|++⟩+|−−⟩) (even) and
// 2^{-1/2}(|+−⟩+|−+⟩) (odd), i.e. ⟨|Bell⟩⟨Bell| ⊗ I_cavities⟩.
// Returns {even, odd}.
std::array<double, 2> bell_overlaps(const SpaceSpec& space, const Ket& v);

// |var_phys − var_rf| / max(var_phys, 1e-12).
double fractional_residual_error(double var_phys, double var_rf);

// Fisher information rate for the intra-parity angle θ:
// (2α · sin 2θ · (γκ/g)²)².
double fisher_information(const SystemParams& params, double theta);

// Equilibrium lower bound on Var(σXσX): 1 − exp(−8α²/κ²).
double xx_variance_bound(const SystemParams& params);

// Column ids of the decimated trajectory table, in storage order. The time
// column "t" always leads.
const std::vector<std::string>& trajectory_observable_ids();
inline constexpr int kObsT = 0;
inline constexpr int kObsVarZZ = 1;
inline constexpr int kObsVarXX = 2;
inline constexpr int kObsMeanZZ = 3;
inline constexpr int kObsBellPlus = 4;
inline constexpr int kObsBellMinus = 5;
inline constexpr int kObsPopE1 = 6;
inline constexpr int kObsPopE2 = 7;
inline constexpr int kObsHomodyneRate = 8;
inline constexpr int kTrajObsCount = 9;

}  // namespace qpl
