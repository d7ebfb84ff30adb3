#include "qpl/ops.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qpl {
namespace {

using Triplet = Eigen::Triplet<std::complex<double>>;

SpMat from_triplets(int rows, int cols, const std::vector<Triplet>& ts) {
  SpMat m(rows, cols);
  m.setFromTriplets(ts.begin(), ts.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SpMat annihilation(int fock_dim) {
  std::vector<Triplet> ts;
  for (int n = 1; n < fock_dim; ++n)
    ts.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  return from_triplets(fock_dim, fock_dim, ts);
}

SpMat atom_sigma() {
  return from_triplets(kAtomDim, kAtomDim, {{kAtomPlus, kAtomExcited, 1.0}});
}

SpMat atom_sigma_z() {
  return from_triplets(kAtomDim, kAtomDim,
                       {{kAtomMinus, kAtomMinus, -1.0},
                        {kAtomPlus, kAtomPlus, 1.0},
                        {kAtomExcited, kAtomExcited, 1.0}});
}

SpMat atom_sigma_x() {
  return from_triplets(kAtomDim, kAtomDim,
                       {{kAtomMinus, kAtomPlus, 1.0},
                        {kAtomPlus, kAtomMinus, 1.0}});
}

SpMat sparse_identity(int d) {
  SpMat m(d, d);
  m.setIdentity();
  return m;
}

SpMat kron(const SpMat& a, const SpMat& b) {
  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int i = 0; i < a.outerSize(); ++i)
    for (SpMat::InnerIterator ia(a, i); ia; ++ia)
      for (int j = 0; j < b.outerSize(); ++j)
        for (SpMat::InnerIterator ib(b, j); ib; ++ib)
          ts.emplace_back(ia.row() * b.rows() + ib.row(),
                          ia.col() * b.cols() + ib.col(),
                          ia.value() * ib.value());
  return from_triplets(a.rows() * b.rows(), a.cols() * b.cols(), ts);
}

SpMat embed(const SpaceSpec& space, int slot, const SpMat& op) {
  const int dims[4] = {kAtomDim, space.fock_dim, kAtomDim, space.fock_dim};
  if (slot < 0 || slot > 3) throw std::invalid_argument("embed: bad slot");
  if (op.rows() != dims[slot] || op.cols() != dims[slot])
    throw std::invalid_argument("embed: operator does not fit slot");
  int pre = 1, post = 1;
  for (int s = 0; s < slot; ++s) pre *= dims[s];
  for (int s = slot + 1; s < 4; ++s) post *= dims[s];

  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(op.nonZeros()) * pre * post);
  for (int i = 0; i < op.outerSize(); ++i)
    for (SpMat::InnerIterator it(op, i); it; ++it)
      for (int p = 0; p < pre; ++p)
        for (int q = 0; q < post; ++q)
          ts.emplace_back(
              (p * dims[slot] + static_cast<int>(it.row())) * post + q,
              (p * dims[slot] + static_cast<int>(it.col())) * post + q,
              it.value());
  return from_triplets(space.dim(), space.dim(), ts);
}

OperatorCatalog build_catalog(const SystemParams& params) {
  params.validate();
  OperatorCatalog c;
  c.space = SpaceSpec{params.fock_dim};
  c.params = params;

  const SpMat b = annihilation(params.fock_dim);
  c.b1 = embed(c.space, 1, b);
  c.b2 = embed(c.space, 3, b);
  c.sigma1 = embed(c.space, 0, atom_sigma());
  c.sigma2 = embed(c.space, 2, atom_sigma());
  c.sz1 = embed(c.space, 0, atom_sigma_z());
  c.sz2 = embed(c.space, 2, atom_sigma_z());
  c.sx1 = embed(c.space, 0, atom_sigma_x());
  c.sx2 = embed(c.space, 2, atom_sigma_x());
  c.zz = SpMat(c.sz1 * c.sz2);
  c.xx = SpMat(c.sx1 * c.sx2);
  c.num1 = SpMat(c.b1.adjoint() * c.b1);
  c.num2 = SpMat(c.b2.adjoint() * c.b2);

  const double kappa_sq = 2.0 * params.kappa2_half;
  const SpMat coupling =
      SpMat(c.sigma1.adjoint() * c.b1) - SpMat(c.sigma1 * c.b1.adjoint()) +
      SpMat(c.sigma2.adjoint() * c.b2) - SpMat(c.sigma2 * c.b2.adjoint());
  const SpMat sdag_s =
      SpMat(c.sigma1.adjoint() * c.sigma1) + SpMat(c.sigma2.adjoint() * c.sigma2);
  c.drift_const = SpMat(params.g * coupling -
                        params.kappa2_half * SpMat(c.num1 + c.num2) -
                        kappa_sq * SpMat(c.b2.adjoint() * c.b1) -
                        params.gamma2_half * sdag_s);

  const SpMat b_sum = SpMat(c.b1 + c.b2);
  c.measurement_L0 = SpMat(params.kappa() * b_sum);
  c.drift_linear_in_alpha = SpMat(-params.kappa() * b_sum.adjoint());

  const double gamma = std::sqrt(params.gamma2());
  c.jump1 = SpMat(gamma * c.sigma1);
  c.jump2 = SpMat(gamma * c.sigma2);

  c.drift_const.makeCompressed();
  c.drift_linear_in_alpha.makeCompressed();
  c.measurement_L0.makeCompressed();
  return c;
}

}  // namespace qpl
