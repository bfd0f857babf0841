// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_PENCIL_HPP
#define SWINGROM_PENCIL_HPP

#include <optional>
#include "swingrom/netmodel.hpp"

namespace swingrom
{

// Reciprocal condition below which K(s) is reported as singular.
inline constexpr double kSingularRcond = 1.0e-14;

// Dense second-order system at a fixed parameter value:
//   (s^2 M + s D + K) x = B u,  y = C x
// with M, D symmetric positive definite and K symmetric positive semidefinite.
// Reduced models are evaluated through this type.
struct SecondOrderSystem
{
  Matrix mass;
  Matrix damping;
  Matrix stiffness;
  Matrix input;
  Matrix output;

  int Order() const { return static_cast<int>(mass.rows()); }
};

// Full-order model frozen at one parameter sample: diagonal M and D, sparse
// L(p), plus the closed-form kernel vector of L(p) when the stiffness is a
// Laplacian.
struct SampleSystem
{
  Vector mass;
  Vector damping;
  SparseMatrix stiffness;
  Matrix input;
  Matrix output;
  std::optional<Vector> null_vector;

  int Order() const { return static_cast<int>(mass.size()); }
};

SampleSystem sample_system(const SecondOrderModel &model, const Vector &p);
SecondOrderSystem dense_system(const SampleSystem &sys);

// Factorizes K(s) = s^2 M + s D + L for one s at a time. Dense LU up to
// kDenseLimit unknowns, sparse LU above.
class ShiftedPencil
{
public:
  static constexpr int kDenseLimit = 2000;

  enum class Backend
  {
    Auto,
    Dense,
    Sparse
  };

  explicit ShiftedPencil(const SampleSystem &sys, Backend backend = Backend::Auto);

  // Solves K(s) X = rhs. Throws SingularPencilError near a pole of the pencil.
  ComplexMatrix Solve(Complex s, const ComplexMatrix &rhs) const;

private:
  const SampleSystem &sys_;
  Backend backend_;
};

// H(s, p) = C (s^2 M + s D + L(p))^{-1} B via a linear solve.
ComplexMatrix eval_transfer(const SecondOrderModel &model, Complex s, const Vector &p);
ComplexMatrix eval_transfer(const SampleSystem &sys, Complex s);
ComplexMatrix eval_transfer(const SecondOrderSystem &sys, Complex s);

// Largest singular value (2-norm) of a complex matrix.
double sigma_max(const ComplexMatrix &h);

}  // namespace swingrom

#endif  // SWINGROM_PENCIL_HPP
