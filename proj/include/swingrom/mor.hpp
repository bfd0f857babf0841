// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_MOR_HPP
#define SWINGROM_MOR_HPP

#include <string>
#include <vector>
#include "swingrom/sysops.hpp"

namespace swingrom
{

// Where a basis column came from.
struct ColumnTag
{
  enum class Kind
  {
    Shift,           // K(sigma)^{-1} B b, real or imaginary part
    NullVector,      // kernel vector of L(p) at a sample
    BlockIndicator,  // e_k, 1 on block k
    Augmentation,    // kernel vector appended for a new parameter value
    Identity         // unit vector of an exact (square) basis
  };

  Kind kind = Kind::Shift;
  int sample = -1;
  Complex shift{0.0, 0.0};
  int part = 0;  // 0 real part, 1 imaginary part
  int block = -1;

  bool operator==(const ColumnTag &) const = default;
};

std::string to_string(ColumnTag::Kind kind);
ColumnTag::Kind column_kind_from_string(const std::string &name);

// Interpolation points with tangent directions, closed under conjugation.
struct InterpolationSet
{
  std::vector<Complex> shifts;
  std::vector<ComplexVector> directions;

  int Size() const { return static_cast<int>(shifts.size()); }
  // Throws InvariantError if a shift is zero, a direction has the wrong length
  // or a complex shift lacks its conjugate partner.
  void Validate(int inputs) const;
};

struct LocalBasis
{
  Matrix columns;
  std::vector<ColumnTag> tags;
};

// Columns K(sigma_j, p)^{-1} B b_j; a conjugate pair contributes the real and
// imaginary parts of one solve. The kernel vector, when requested, is column 0.
LocalBasis local_basis(const SampleSystem &sys, const InterpolationSet &interp, int sample = -1,
                       bool include_null_vector = false);
LocalBasis local_basis(const SecondOrderModel &model, const Vector &p,
                       const InterpolationSet &interp, int sample = -1,
                       bool include_null_vector = false);

struct IrkaOptions
{
  int max_iter = 50;
  double tol = 1.0e-6;
  double tol_zero = kZeroTol;
  double rank_tol = 1.0e-10;
};

struct IrkaDiagnostics
{
  int iterations = 0;
  bool converged = false;
  double final_movement = 0.0;
  std::vector<double> movement;
  bool null_vector_column = false;
  bool null_vector_forced = false;
};

struct IrkaResult
{
  InterpolationSet interpolation;
  LocalBasis basis;  // orthonormal
  SecondOrderSystem reduced;
  IrkaDiagnostics diagnostics;
  std::vector<Complex> reduced_poles;
};

// Structure-preserving IRKA with the kernel-vector replacement for the pole at
// zero. Returns the iterate with the smallest shift movement.
IrkaResult sor_irka(const SampleSystem &sys, int order, const IrkaOptions &opts = {},
                    int sample = -1);
IrkaResult sor_irka(const SecondOrderModel &model, const Vector &p, int order,
                    const IrkaOptions &opts = {}, int sample = -1);

// Initial shifts: conjugate pairs log-spaced on the imaginary axis over the
// frequency band of the undamped modes; one real shift when order is odd.
InterpolationSet initial_interpolation(const SampleSystem &sys, int order);

// Relative Hausdorff distance between two shift sets.
double shift_distance(const std::vector<Complex> &a, const std::vector<Complex> &b);

// Two-pass classical Gram-Schmidt. A column is dropped when its residual after
// projection is at most rank_tol times its norm. Returns the kept indices.
std::vector<int> orthonormalize(const Matrix &columns, double rank_tol, Matrix &q);

struct ReductionBasis
{
  Matrix v;
  std::vector<ColumnTag> provenance;

  int Rank() const { return static_cast<int>(v.cols()); }
};

// Orthonormal basis of the concatenation. Extra vectors come first, then the
// kernel-vector columns of the local bases, then everything else, so that the
// enrichment directions are represented exactly.
ReductionBasis global_basis(const std::vector<LocalBasis> &locals, const LocalBasis &extras = {},
                            double rank_tol = 1.0e-10);

LocalBasis enrich_for_blocks(const ParameterSpace &space);

// sin of the angle between v and span(V) for orthonormal V.
double principal_angle_sine(const Matrix &v, const Vector &x);

class ReducedModel
{
public:
  ReducedModel() = default;
  ReducedModel(ReductionBasis basis, Matrix mass, Matrix damping, Matrix input, Matrix output);

  const ReductionBasis &Basis() const { return basis_; }
  const Matrix &V() const { return basis_.v; }
  const Matrix &Mass() const { return mass_; }
  const Matrix &Damping() const { return damping_; }
  const Matrix &B() const { return input_; }
  const Matrix &C() const { return output_; }
  int Order() const { return basis_.Rank(); }

private:
  ReductionBasis basis_;
  Matrix mass_;
  Matrix damping_;
  Matrix input_;
  Matrix output_;
};

ReducedModel reduce(const SecondOrderModel &model, const ReductionBasis &basis);

// L_r(p) = (P V)^T L (P V), symmetrized.
Matrix assemble_Lr(const ReducedModel &reduced, const SecondOrderModel &model, const Vector &p);

SecondOrderSystem reduced_system(const ReducedModel &reduced, const SecondOrderModel &model,
                                 const Vector &p);

// Appends the component of the kernel vector of L(p_new) outside span(V).
// Returns the input unchanged when that component is below angle_tol.
ReducedModel augment_for_parameter(const ReducedModel &reduced, const SecondOrderModel &model,
                                   const Vector &p_new, double angle_tol = 1.0e-8);

struct ReducedResidue
{
  ResidueData full;
  Matrix phi0r;
  Vector kernel_r;  // reduced kernel vector, empty without a pole at zero
  double angle_sine = 0.0;  // kernel vector vs span(V)
  bool kernel_in_span = false;
  bool has_zero_pole = false;
};

// Zero-pole residues of the full model and of the ROM at p. The reduced
// kernel vector is V^T v when v lies in span(V), else the eigenvector of a
// numerically singular L_r(p); without either the ROM has no pole at zero.
ReducedResidue reduced_zero_residue(const ReducedModel &reduced, const SecondOrderModel &model,
                                    const Vector &p, double angle_tol = 1.0e-8,
                                    double zero_tol = 1.0e-10);

}  // namespace swingrom

#endif  // SWINGROM_MOR_HPP
