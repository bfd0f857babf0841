// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/mor.hpp"

#include <Eigen/Eigenvalues>

namespace swingrom
{

namespace
{

Matrix Symmetrize(const Matrix &a)
{
  return 0.5 * (a + a.transpose());
}

}  // namespace

ReducedModel::ReducedModel(ReductionBasis basis, Matrix mass, Matrix damping, Matrix input,
                           Matrix output)
  : basis_(std::move(basis)),
    mass_(std::move(mass)),
    damping_(std::move(damping)),
    input_(std::move(input)),
    output_(std::move(output))
{
  const Eigen::Index r = basis_.v.cols();
  if (static_cast<Eigen::Index>(basis_.provenance.size()) != r || mass_.rows() != r ||
      mass_.cols() != r || damping_.rows() != r || damping_.cols() != r || input_.rows() != r ||
      output_.cols() != r)
  {
    throw InvariantError("reduced matrices do not match the basis rank");
  }
}

ReducedModel reduce(const SecondOrderModel &model, const ReductionBasis &basis)
{
  const Matrix &v = basis.v;
  if (v.rows() != model.Size())
  {
    throw InvariantError("basis row count differs from the model size");
  }
  const double drift = (v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).norm();
  if (!(drift <= 1.0e-10 * std::max<double>(1.0, static_cast<double>(v.cols()))))
  {
    throw InvariantError("reduction basis is not orthonormal");
  }
  Matrix mass = Symmetrize(v.transpose() * (model.Inertia().asDiagonal() * v));
  Matrix damping = Symmetrize(v.transpose() * (model.Damping().asDiagonal() * v));
  return ReducedModel(basis, std::move(mass), std::move(damping), v.transpose() * model.B(),
                      model.C() * v);
}

Matrix assemble_Lr(const ReducedModel &reduced, const SecondOrderModel &model, const Vector &p)
{
  const Matrix w = model.Space().Expand(p).asDiagonal() * reduced.V();
  const Matrix lw = model.Laplacian() * w;
  return Symmetrize(w.transpose() * lw);
}

SecondOrderSystem reduced_system(const ReducedModel &reduced, const SecondOrderModel &model,
                                 const Vector &p)
{
  return {reduced.Mass(), reduced.Damping(), assemble_Lr(reduced, model, p), reduced.B(),
          reduced.C()};
}

ReducedModel augment_for_parameter(const ReducedModel &reduced, const SecondOrderModel &model,
                                   const Vector &p_new, double angle_tol)
{
  const Vector upsilon = null_vector(model.Space(), p_new);
  const Matrix &v = reduced.V();
  Vector w = upsilon / upsilon.norm();
  for (int pass = 0; pass < 2; pass++)
  {
    w -= v * (v.transpose() * w);
  }
  const double s = w.norm();
  if (s <= angle_tol)
  {
    return reduced;
  }
  w /= s;
  w -= v * (v.transpose() * w);
  w.normalize();

  const Eigen::Index r = v.cols();
  ReductionBasis basis = reduced.Basis();
  basis.v.conservativeResize(Eigen::NoChange, r + 1);
  basis.v.col(r) = w;
  basis.provenance.push_back({ColumnTag::Kind::Augmentation, -1, {}, 0, -1});

  // Only products against the new column are needed.
  const Vector mw = model.Inertia().cwiseProduct(w);
  const Vector dw = model.Damping().cwiseProduct(w);
  Matrix mass(r + 1, r + 1);
  Matrix damping(r + 1, r + 1);
  mass.topLeftCorner(r, r) = reduced.Mass();
  damping.topLeftCorner(r, r) = reduced.Damping();
  const Vector vm = v.transpose() * mw;
  const Vector vd = v.transpose() * dw;
  mass.col(r).head(r) = vm;
  mass.row(r).head(r) = vm.transpose();
  mass(r, r) = w.dot(mw);
  damping.col(r).head(r) = vd;
  damping.row(r).head(r) = vd.transpose();
  damping(r, r) = w.dot(dw);
  Matrix input(r + 1, reduced.B().cols());
  input.topRows(r) = reduced.B();
  input.row(r) = w.transpose() * model.B();
  Matrix output(reduced.C().rows(), r + 1);
  output.leftCols(r) = reduced.C();
  output.col(r) = model.C() * w;
  return ReducedModel(std::move(basis), std::move(mass), std::move(damping), std::move(input),
                      std::move(output));
}

ReducedResidue reduced_zero_residue(const ReducedModel &reduced, const SecondOrderModel &model,
                                    const Vector &p, double angle_tol, double zero_tol)
{
  ReducedResidue out;
  const Vector upsilon = null_vector(model.Space(), p);
  out.full = zero_residue(model.C(), model.B(), Matrix(model.Damping().asDiagonal()), upsilon);
  out.angle_sine = principal_angle_sine(reduced.V(), upsilon);
  out.kernel_in_span = out.angle_sine <= angle_tol;
  const Matrix lr = assemble_Lr(reduced, model, p);
  Vector w;
  if (out.kernel_in_span)
  {
    w = reduced.V().transpose() * upsilon;
    out.has_zero_pole = true;
  }
  else
  {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(lr);
    const double scale = std::max(lr.norm(), 1.0e-300);
    if (eig.eigenvalues()[0] <= zero_tol * scale)
    {
      w = eig.eigenvectors().col(0);
      out.has_zero_pole = true;
    }
  }
  if (out.has_zero_pole)
  {
    out.phi0r = zero_residue(reduced.C(), reduced.B(), reduced.Damping(), w).phi0;
    out.kernel_r = std::move(w);
  }
  else
  {
    out.phi0r = Matrix::Zero(out.full.phi0.rows(), out.full.phi0.cols());
  }
  return out;
}

}  // namespace swingrom
