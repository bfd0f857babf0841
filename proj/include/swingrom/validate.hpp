// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_VALIDATE_HPP
#define SWINGROM_VALIDATE_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>
#include "swingrom/freqresp.hpp"
#include "swingrom/pipeline.hpp"

namespace swingrom
{

struct CertifyTolerances
{
  double residue = 1.0e-10;        // relative deviation of phi0r from phi0
  double angle = 1.0e-8;           // kernel vector vs span(V)
  double zero_eig = 1.0e-10;       // lambda_min(L_r) <= zero_eig * ||L_r||
  double gap = 100.0;              // lambda_2(L_r) > gap * zero_eig * ||L_r||
  double interpolation = 1.0e-8;   // relative tangential residual
  double tol_zero = kZeroTol;      // companion zero-pole gate, relative to ||A_r||_F
  double sample_match = 1.0e-12;   // p counts as a sample within this relative distance
};

struct InterpolationResidual
{
  int sample = -1;
  Complex shift;
  double residual = 0.0;
};

// All pass/fail flags are derived from the numbers next to them in
// certify(); nothing sets them directly.
struct Certificate
{
  Vector p;
  int order = 0;

  double residue_deviation = std::numeric_limits<double>::infinity();
  double kernel_angle_sine = 1.0;
  bool residue_match = false;

  double mass_min_eig = 0.0;
  double damping_min_eig = 0.0;
  double lr_min_eig = 0.0;
  double lr_second_eig = 0.0;
  double lr_norm = 0.0;
  bool structure = false;  // M_r, D_r SPD and L_r(p) PSD
  bool zero_simple = false;

  double spectral_abscissa = std::numeric_limits<double>::infinity();  // nonzero modes
  int near_zero_poles = 0;
  bool stable_poles = false;

  std::vector<InterpolationResidual> interpolation;
  double max_interpolation_residual = 0.0;
  bool interpolation_ok = true;

  std::string error;  // set when a computation failed

  bool Passed() const;
};

// Residue, structure, pole and interpolation checks at one parameter value.
// Never throws; failures are reported in the certificate.
Certificate certify(const SecondOrderModel &model, const ParametricRom &rom, const Vector &p,
                    const CertifyTolerances &tol = {});

// One PASS/FAIL line per check.
std::string format_certificate(const Certificate &cert);
Json certificate_to_json(const Certificate &cert);

class CertificationError : public Error
{
public:
  explicit CertificationError(Certificate cert);
  const Certificate &GetCertificate() const { return cert_; }

private:
  Certificate cert_;
};

// Tensor grid (counts per axis, a single count applies to every axis), N
// uniform random points from a seed, or an explicit list.
struct SweepSpec
{
  std::vector<int> counts;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<Vector> points;

  std::string Describe() const;
};

std::vector<Vector> sweep_points(const ParameterSpace &space, const SweepSpec &spec);

enum class Normalization
{
  Grid,   // max over the frequency grid of sigma_max(H)
  Stable  // same for H minus its pole at zero, phi0 / (i w)
};

std::string to_string(Normalization n);
Normalization normalization_from_string(const std::string &name);

struct SweepOptions
{
  FrequencyGrid grid;
  bool h2 = false;
  Normalization normalization = Normalization::Grid;
  Execution exec = Execution::Parallel;
  CertifyTolerances tol;
  bool certify_corners = true;
};

struct SweepPoint
{
  Vector p;
  double rel_hinf = 0.0;
  double abs_hinf = 0.0;
  double argmax_omega = 0.0;
  double rel_h2 = std::numeric_limits<double>::quiet_NaN();
  double residue_deviation = 0.0;
  double wall_seconds = 0.0;
};

struct SweepReport
{
  std::vector<SweepPoint> points;
  std::vector<Certificate> corners;
  SweepSpec spec;
  SweepOptions options;
  int argmax = -1;

  double MaxRelHinf() const;
  double MedianRelHinf() const;
};

// Certifies the box corners first and throws CertificationError with the
// first failing certificate. Points are evaluated independently and stored in
// grid order. The H-infinity values are grid lower bounds.
SweepReport sweep(const SecondOrderModel &model, const ParametricRom &rom, const SweepSpec &spec,
                  const SweepOptions &opts = {});

// Same evaluation without the corner certification, for a single point.
SweepPoint sweep_point(const SecondOrderModel &model, const ParametricRom &rom, const Vector &p,
                       const SweepOptions &opts);

// Header lines start with '#'; wall times are not written, so equal inputs
// give byte-identical files.
std::string sweep_csv(const SweepReport &report);
Json sweep_json(const SweepReport &report);

struct StudyRow
{
  int target = 0;
  int order = 0;
  double median = std::numeric_limits<double>::quiet_NaN();
  double max = std::numeric_limits<double>::quiet_NaN();
  bool certified = false;
};

// Reduces at each global order (split evenly across the samples; r >= n uses
// the exact basis) and sweeps. Trends are reported, not asserted.
std::vector<StudyRow> convergence_study(const SecondOrderModel &model,
                                        const std::vector<Vector> &samples,
                                        const std::vector<int> &orders, const SweepSpec &spec,
                                        const SweepOptions &sweep_opts = {},
                                        const ReduceOptions &reduce_opts = {});

std::string study_csv(const std::vector<StudyRow> &rows);

}  // namespace swingrom

#endif  // SWINGROM_VALIDATE_HPP
