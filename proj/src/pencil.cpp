// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/pencil.hpp"

#include <Eigen/SparseLU>

namespace swingrom
{

SampleSystem sample_system(const SecondOrderModel &model, const Vector &p)
{
  SampleSystem sys;
  sys.mass = model.Inertia();
  sys.damping = model.Damping();
  sys.stiffness = scale_laplacian(model, p);
  sys.input = model.B();
  sys.output = model.C();
  sys.null_vector = null_vector(model.Space(), p);
  return sys;
}

SecondOrderSystem dense_system(const SampleSystem &sys)
{
  return {Matrix(sys.mass.asDiagonal()), Matrix(sys.damping.asDiagonal()), Matrix(sys.stiffness),
          sys.input, sys.output};
}

ShiftedPencil::ShiftedPencil(const SampleSystem &sys, Backend backend)
  : sys_(sys), backend_(backend)
{
}

ComplexMatrix ShiftedPencil::Solve(Complex s, const ComplexMatrix &rhs) const
{
  const int n = sys_.Order();
  const ComplexVector shift =
      (s * s) * sys_.mass.cast<Complex>() + s * sys_.damping.cast<Complex>();
  const bool dense =
      backend_ == Backend::Dense || (backend_ == Backend::Auto && n <= kDenseLimit);
  if (dense)
  {
    ComplexMatrix k = sys_.stiffness.cast<Complex>();
    k.diagonal() += shift;
    Eigen::PartialPivLU<ComplexMatrix> lu(k);
    const double rcond = lu.rcond();
    if (!(rcond > kSingularRcond))
    {
      throw SingularPencilError(s, rcond);
    }
    return lu.solve(rhs);
  }
  Eigen::SparseMatrix<Complex> k = sys_.stiffness.cast<Complex>();
  for (int i = 0; i < n; i++)
  {
    k.coeffRef(i, i) += shift[i];
  }
  k.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(k);
  if (lu.info() != Eigen::Success)
  {
    throw SingularPencilError(s, 0.0);
  }
  // SparseLU has no condition estimate. ||rhs|| / (||K||_1 ||x||) bounds the
  // reciprocal condition number from above, so a tiny value proves singularity.
  ComplexMatrix x = lu.solve(rhs);
  double knorm = 0.0;
  for (int j = 0; j < n; j++)
  {
    knorm = std::max(knorm, k.col(j).cwiseAbs().sum());
  }
  const double xnorm = x.cwiseAbs().colwise().sum().maxCoeff();
  const double bnorm = rhs.cwiseAbs().colwise().sum().maxCoeff();
  const double bound = xnorm > 0.0 ? bnorm / (knorm * xnorm) : 1.0;
  if (!x.allFinite() || !(bound > kSingularRcond))
  {
    throw SingularPencilError(s, bound);
  }
  return x;
}

ComplexMatrix eval_transfer(const SampleSystem &sys, Complex s)
{
  ShiftedPencil pencil(sys);
  return sys.output.cast<Complex>() * pencil.Solve(s, sys.input.cast<Complex>());
}

ComplexMatrix eval_transfer(const SecondOrderModel &model, Complex s, const Vector &p)
{
  return eval_transfer(sample_system(model, p), s);
}

ComplexMatrix eval_transfer(const SecondOrderSystem &sys, Complex s)
{
  const ComplexMatrix k = (s * s) * sys.mass.cast<Complex>() + s * sys.damping.cast<Complex>() +
                          sys.stiffness.cast<Complex>();
  Eigen::PartialPivLU<ComplexMatrix> lu(k);
  const double rcond = lu.rcond();
  if (!(rcond > kSingularRcond))
  {
    throw SingularPencilError(s, rcond);
  }
  return sys.output.cast<Complex>() * lu.solve(sys.input.cast<Complex>());
}

double sigma_max(const ComplexMatrix &h)
{
  if (h.size() == 1)
  {
    return std::abs(h(0, 0));
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(h);
  return svd.singularValues()(0);
}

}  // namespace swingrom
