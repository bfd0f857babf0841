// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_SYSOPS_HPP
#define SWINGROM_SYSOPS_HPP

#include <functional>
#include <vector>
#include "swingrom/pencil.hpp"

namespace swingrom
{

// Default relative gate for classifying an eigenvalue as the structural zero:
// |lambda| <= kZeroTol * ||A||_F.
inline constexpr double kZeroTol = 1.0e-8;

// Plain state-space triple H(s) = C (sI - A)^{-1} B.
struct StateSpace
{
  Matrix a;
  Matrix b;
  Matrix c;

  int Order() const { return static_cast<int>(a.rows()); }
};

ComplexMatrix eval_transfer(const StateSpace &sys, Complex s);

// Companion realization of a second-order system,
//   A = [[0, I], [-M^{-1} K, -M^{-1} D]],  B = [0; M^{-1} B],  C = [C, 0].
// Keeps M and D because the left zero eigenvector needs them.
struct FirstOrderRealization
{
  StateSpace sys;
  Matrix mass;
  Matrix damping;
};

FirstOrderRealization companion_form(const SecondOrderSystem &sys);
FirstOrderRealization companion_form(const SecondOrderModel &model, const Vector &p);

// Residue of H at its simple pole s = 0:
//   alpha_D = v^T D v,  phi0 = (C v)(v^T B) / alpha_D.
struct ResidueData
{
  double alpha_d = 0.0;
  Matrix phi0;
  Vector upsilon;
};

ResidueData zero_residue(const Matrix &c, const Matrix &b, const Matrix &damping,
                         const Vector &upsilon);

// Right and left eigenvectors of A for the zero eigenvalue:
//   q1 = [v; 0],  q1~ = [D v; M v] / alpha_D,  with q1~^T q1 = 1.
struct ZeroModeVectors
{
  Vector right;
  Vector left;
};

ZeroModeVectors zero_mode_vectors(const FirstOrderRealization &real, const Vector &upsilon);

// H(s) = phi0 / s + H_a(s), with H_a realized on range(I - q1 q1~^T).
struct SpectralSplit
{
  StateSpace stable_part;
  ResidueData zero_residue;
};

// Restricts A to the complement of the zero mode through an orthonormal basis
// of ker(q1~^T). With verify set, checks that the remaining spectrum is
// strictly stable and free of further near-zero eigenvalues.
SpectralSplit deflate_zero_mode(const FirstOrderRealization &real, const ResidueData &residue,
                                bool verify = true, double tol_zero = kZeroTol);

// Solves A X + X A^T + Q = 0 for stable A (Bartels-Stewart on the complex Schur form).
Matrix solve_lyapunov(const Matrix &a, const Matrix &q);

// H2 norm from the controllability Gramian: sqrt(trace(C P C^T)).
double h2_norm(const StateSpace &stable);
double h2_norm(const SpectralSplit &split);

// H2 norm of H - H_r. Both splits must carry matching zero-pole residues
// (relative deviation <= residue_tol), otherwise the 1/s term survives and the
// norm is infinite: throws ResidueMismatchError.
double h2_error(const SpectralSplit &full, const SpectralSplit &reduced,
                double residue_tol = 1.0e-8);

// Relative deviation ||phi0 - phi0r|| / ||phi0|| (Frobenius).
double residue_deviation(const Matrix &phi0, const Matrix &phi0r);

using FrequencyFn = std::function<ComplexMatrix(double omega)>;

struct QuadratureOptions
{
  double omega_min = 1.0e-6;
  double omega_max = 1.0e6;
  double rel_tol = 1.0e-7;
  int max_depth = 30;
};

// Independent H2 oracle: (1/pi) * int_0^inf ||H(i w)||_F^2 dw by adaptive
// Simpson on a log axis, with power-law tail corrections at both ends. The
// response must be that of a real, stable system.
double h2_quadrature(const FrequencyFn &response, const QuadratureOptions &options = {});

struct FrequencyGrid
{
  double omega_min = 1.0e-4;
  double omega_max = 1.0e4;
  int points = 400;

  std::vector<double> Omegas() const;
};

struct HinfResult
{
  double value = 0.0;
  double omega = 0.0;
};

// Lower bound on sup_w sigma_max(H(i w)): maximum over a log grid followed by a
// golden-section refinement in log(w) around the grid argmax.
HinfResult hinf_norm(const FrequencyFn &response, const FrequencyGrid &grid,
                     Execution exec = Execution::Parallel);

// Same bound for H - H_r; refuses pairs whose zero-pole residues differ.
HinfResult hinf_error(const FrequencyFn &full, const FrequencyFn &reduced, const Matrix &phi0,
                      const Matrix &phi0r, const FrequencyGrid &grid,
                      Execution exec = Execution::Parallel, double residue_tol = 1.0e-8);

// Golden-section maximization of f over [lo, hi]; returns (argmax, max).
std::pair<double, double> golden_section_max(const std::function<double(double)> &f, double lo,
                                             double hi, double tol = 1.0e-9);

}  // namespace swingrom

#endif  // SWINGROM_SYSOPS_HPP
