// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/sysops.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <Eigen/Eigenvalues>

namespace swingrom
{

namespace
{

double StableTailExponent(double f_lo, double f_hi, double ratio)
{
  if (!(f_lo > 0.0) || !(f_hi > 0.0))
  {
    return 2.0;
  }
  return std::log(f_lo / f_hi) / std::log(ratio);
}

struct SimpsonPanel
{
  double a, b, fa, fm, fb, whole;
};

class LogSimpson
{
public:
  LogSimpson(const std::function<double(double)> &g, int max_depth)
    : g_(g), max_depth_(max_depth)
  {
  }

  double Integrate(double a, double b, double fa, double fb, double tol)
  {
    const double m = 0.5 * (a + b);
    const double fm = g_(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Recurse({a, b, fa, fm, fb, whole}, tol, 0);
  }

private:
  double Recurse(const SimpsonPanel &p, double tol, int depth)
  {
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double flm = g_(lm);
    const double frm = g_(rm);
    const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double delta = left + right - p.whole;
    if (depth >= max_depth_ || std::abs(delta) <= 15.0 * tol)
    {
      return left + right + delta / 15.0;
    }
    return Recurse({p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth + 1) +
           Recurse({m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth + 1);
  }

  const std::function<double(double)> &g_;
  int max_depth_;
};

}  // namespace

ComplexMatrix eval_transfer(const StateSpace &sys, Complex s)
{
  ComplexMatrix k = -sys.a.cast<Complex>();
  k.diagonal().array() += s;
  Eigen::PartialPivLU<ComplexMatrix> lu(k);
  const double rcond = lu.rcond();
  if (!(rcond > kSingularRcond))
  {
    throw SingularPencilError(s, rcond);
  }
  return sys.c.cast<Complex>() * lu.solve(sys.b.cast<Complex>());
}

FirstOrderRealization companion_form(const SecondOrderSystem &sys)
{
  const int n = sys.Order();
  const int m = static_cast<int>(sys.input.cols());
  const int q = static_cast<int>(sys.output.rows());
  Eigen::LLT<Matrix> mass(sys.mass);
  if (mass.info() != Eigen::Success)
  {
    throw InvariantError("mass matrix is not positive definite");
  }
  FirstOrderRealization real;
  real.mass = sys.mass;
  real.damping = sys.damping;
  real.sys.a = Matrix::Zero(2 * n, 2 * n);
  real.sys.a.topRightCorner(n, n).setIdentity();
  real.sys.a.bottomLeftCorner(n, n) = -mass.solve(sys.stiffness);
  real.sys.a.bottomRightCorner(n, n) = -mass.solve(sys.damping);
  real.sys.b = Matrix::Zero(2 * n, m);
  real.sys.b.bottomRows(n) = mass.solve(sys.input);
  real.sys.c = Matrix::Zero(q, 2 * n);
  real.sys.c.leftCols(n) = sys.output;
  return real;
}

FirstOrderRealization companion_form(const SecondOrderModel &model, const Vector &p)
{
  return companion_form(dense_system(sample_system(model, p)));
}

ResidueData zero_residue(const Matrix &c, const Matrix &b, const Matrix &damping,
                         const Vector &upsilon)
{
  if (upsilon.size() == 0 || upsilon.cwiseAbs().maxCoeff() == 0.0)
  {
    throw InvariantError("zero residue needs a nonzero kernel vector");
  }
  ResidueData r;
  r.upsilon = upsilon;
  r.alpha_d = upsilon.dot(damping * upsilon);
  if (!(r.alpha_d > 0.0))
  {
    throw InvariantError("v^T D v must be positive (damping not positive definite?)");
  }
  r.phi0 = (c * upsilon) * (upsilon.transpose() * b) / r.alpha_d;
  return r;
}

ZeroModeVectors zero_mode_vectors(const FirstOrderRealization &real, const Vector &upsilon)
{
  const Eigen::Index n = upsilon.size();
  const double alpha = upsilon.dot(real.damping * upsilon);
  ZeroModeVectors z;
  z.right = Vector::Zero(2 * n);
  z.right.head(n) = upsilon;
  z.left.resize(2 * n);
  z.left.head(n) = real.damping * upsilon / alpha;
  z.left.tail(n) = real.mass * upsilon / alpha;
  return z;
}

SpectralSplit deflate_zero_mode(const FirstOrderRealization &real, const ResidueData &residue,
                                bool verify, double tol_zero)
{
  const auto &a = real.sys.a;
  const Eigen::Index dim = a.rows();
  const ZeroModeVectors z = zero_mode_vectors(real, residue.upsilon);

  // Orthonormal basis of ker(q1~^T) = range(Pi): trailing Householder columns.
  Eigen::HouseholderQR<Matrix> qr(z.left.normalized());
  const Matrix q = qr.householderQ();
  const Matrix u = q.rightCols(dim - 1);

  const Matrix projected_b = real.sys.b - z.right * (z.left.transpose() * real.sys.b);
  SpectralSplit split;
  split.zero_residue = residue;
  split.stable_part.a = u.transpose() * a * u;
  split.stable_part.b = u.transpose() * projected_b;
  split.stable_part.c = real.sys.c * u;

  if (verify)
  {
    const double gate = tol_zero * a.norm();
    Eigen::EigenSolver<Matrix> eig(split.stable_part.a, false);
    if (eig.info() != Eigen::Success)
    {
      throw Error("eigenvalue computation failed while verifying the deflated realization");
    }
    double abscissa = -std::numeric_limits<double>::infinity();
    int near_zero = 0;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); k++)
    {
      const Complex lambda = eig.eigenvalues()[k];
      abscissa = std::max(abscissa, lambda.real());
      if (std::abs(lambda) <= gate)
      {
        near_zero++;
      }
    }
    if (near_zero > 0)
    {
      throw InvariantError(
          "companion matrix has more than one near-zero eigenvalue (disconnected or degenerate "
          "model)");
    }
    if (!(abscissa < 0.0))
    {
      std::ostringstream os;
      os << "deflated realization is not asymptotically stable (spectral abscissa " << abscissa
         << ")";
      throw UnstableSystemError(os.str());
    }
  }
  return split;
}

Matrix solve_lyapunov(const Matrix &a, const Matrix &q)
{
  const Eigen::Index n = a.rows();
  Eigen::ComplexSchur<ComplexMatrix> schur(a.cast<Complex>());
  const ComplexMatrix &t = schur.matrixT();
  const ComplexMatrix &u = schur.matrixU();
  const ComplexMatrix f = u.adjoint() * q.cast<Complex>() * u;

  // T X + X T^H = -F, solved column by column from the last one.
  ComplexMatrix x = ComplexMatrix::Zero(n, n);
  ComplexVector rhs(n);
  for (Eigen::Index j = n - 1; j >= 0; j--)
  {
    rhs = -f.col(j);
    const Eigen::Index tail = n - 1 - j;
    if (tail > 0)
    {
      rhs.noalias() -= x.rightCols(tail) * t.row(j).tail(tail).adjoint();
    }
    const Complex shift = std::conj(t(j, j));
    for (Eigen::Index i = n - 1; i >= 0; i--)
    {
      Complex acc = rhs[i];
      const Eigen::Index len = n - 1 - i;
      if (len > 0)
      {
        acc -= (t.row(i).tail(len) * x.col(j).tail(len)).value();
      }
      const Complex denom = t(i, i) + shift;
      if (std::abs(denom) == 0.0)
      {
        throw UnstableSystemError("Lyapunov equation is singular (eigenvalues on the imaginary axis)");
      }
      x(i, j) = acc / denom;
    }
  }
  const Matrix p = (u * x * u.adjoint()).real();
  return 0.5 * (p + p.transpose());
}

double h2_norm(const StateSpace &stable)
{
  const Matrix p = solve_lyapunov(stable.a, stable.b * stable.b.transpose());
  const double tr = (stable.c * p * stable.c.transpose()).trace();
  return std::sqrt(std::max(tr, 0.0));
}

double h2_norm(const SpectralSplit &split)
{
  return h2_norm(split.stable_part);
}

double residue_deviation(const Matrix &phi0, const Matrix &phi0r)
{
  const double scale = phi0.norm();
  const double diff = (phi0 - phi0r).norm();
  if (scale == 0.0)
  {
    return diff;
  }
  return diff / scale;
}

double h2_error(const SpectralSplit &full, const SpectralSplit &reduced, double residue_tol)
{
  const double dev = residue_deviation(full.zero_residue.phi0, reduced.zero_residue.phi0);
  if (!(dev <= residue_tol))
  {
    std::ostringstream os;
    os << "zero-pole residues differ (relative deviation " << dev
       << "); the error system keeps a pole at s = 0 and has no finite H2 norm. Enrich the basis "
          "with the kernel vector of L(p).";
    throw ResidueMismatchError(os.str());
  }
  const auto &f = full.stable_part;
  const auto &r = reduced.stable_part;
  StateSpace err;
  const Eigen::Index nf = f.Order();
  const Eigen::Index nr = r.Order();
  err.a = Matrix::Zero(nf + nr, nf + nr);
  err.a.topLeftCorner(nf, nf) = f.a;
  err.a.bottomRightCorner(nr, nr) = r.a;
  err.b.resize(nf + nr, f.b.cols());
  err.b << f.b, r.b;
  err.c.resize(f.c.rows(), nf + nr);
  err.c << f.c, -r.c;
  return h2_norm(err);
}

double h2_quadrature(const FrequencyFn &response, const QuadratureOptions &options)
{
  auto f = [&](double omega) { return response(omega).squaredNorm(); };
  auto g = [&](double t)
  {
    const double omega = std::exp(t);
    return f(omega) * omega;
  };
  const double t0 = std::log(options.omega_min);
  const double t1 = std::log(options.omega_max);

  // Coarse pass for the absolute tolerance, then adaptive refinement per panel.
  constexpr int kPanels = 128;
  std::vector<double> nodes(kPanels + 1);
  std::vector<double> values(kPanels + 1);
  for (int k = 0; k <= kPanels; k++)
  {
    nodes[k] = t0 + (t1 - t0) * k / kPanels;
    values[k] = g(nodes[k]);
  }
  double coarse = 0.0;
  for (int k = 0; k < kPanels; k++)
  {
    coarse += 0.5 * (nodes[k + 1] - nodes[k]) * (values[k] + values[k + 1]);
  }
  const double tol = options.rel_tol * std::max(coarse, std::numeric_limits<double>::min());
  std::function<double(double)> gfun = g;
  LogSimpson simpson(gfun, options.max_depth);
  double body = 0.0;
  for (int k = 0; k < kPanels; k++)
  {
    body += simpson.Integrate(nodes[k], nodes[k + 1], values[k], values[k + 1], tol / kPanels);
  }

  // Low end: f tends to a constant; high end: f decays like w^-k.
  const double f_min = f(options.omega_min);
  const double f_min2 = f(2.0 * options.omega_min);
  const double k_lo = StableTailExponent(f_min, f_min2, 2.0);
  const double low_tail = f_min * options.omega_min / std::max(1.0 - k_lo, 1.0e-3);
  const double f_max = f(options.omega_max);
  const double f_max2 = f(0.5 * options.omega_max);
  const double k_hi = StableTailExponent(f_max2, f_max, 2.0);
  const double high_tail = k_hi > 1.0 ? f_max * options.omega_max / (k_hi - 1.0) : 0.0;

  const double total = (body + std::max(low_tail, 0.0) + high_tail) / std::numbers::pi;
  return std::sqrt(std::max(total, 0.0));
}

std::vector<double> FrequencyGrid::Omegas() const
{
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || points < 2)
  {
    throw InvariantError("frequency grid needs 0 < omega_min < omega_max and at least 2 points");
  }
  std::vector<double> w(points);
  const double a = std::log10(omega_min);
  const double b = std::log10(omega_max);
  for (int k = 0; k < points; k++)
  {
    w[k] = std::pow(10.0, a + (b - a) * k / (points - 1));
  }
  w.front() = omega_min;
  w.back() = omega_max;
  return w;
}

std::pair<double, double> golden_section_max(const std::function<double(double)> &f, double lo,
                                             double hi, double tol)
{
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best_x = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  for (int it = 0; it < 200 && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); it++)
  {
    if (fc >= fd)
    {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc > best_f)
      {
        best_f = fc;
        best_x = c;
      }
    }
    else
    {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd > best_f)
      {
        best_f = fd;
        best_x = d;
      }
    }
  }
  return {best_x, best_f};
}

HinfResult hinf_norm(const FrequencyFn &response, const FrequencyGrid &grid, Execution exec)
{
  const std::vector<double> omegas = grid.Omegas();
  std::vector<double> sigma(omegas.size());
  const int count = static_cast<int>(omegas.size());
  if (exec == Execution::Parallel)
  {
#pragma omp parallel for schedule(dynamic, 4)
    for (int k = 0; k < count; k++)
    {
      sigma[k] = sigma_max(response(omegas[k]));
    }
  }
  else
  {
    for (int k = 0; k < count; k++)
    {
      sigma[k] = sigma_max(response(omegas[k]));
    }
  }
  int best = 0;
  for (int k = 1; k < count; k++)
  {
    if (sigma[k] > sigma[best])
    {
      best = k;
    }
  }
  HinfResult result{sigma[best], omegas[best]};
  const double lo = std::log(omegas[std::max(best - 1, 0)]);
  const double hi = std::log(omegas[std::min(best + 1, count - 1)]);
  auto [t, value] = golden_section_max(
      [&](double t) { return sigma_max(response(std::exp(t))); }, lo, hi, 1.0e-10);
  if (value > result.value)
  {
    result = {value, std::exp(t)};
  }
  return result;
}

HinfResult hinf_error(const FrequencyFn &full, const FrequencyFn &reduced, const Matrix &phi0,
                      const Matrix &phi0r, const FrequencyGrid &grid, Execution exec,
                      double residue_tol)
{
  const double dev = residue_deviation(phi0, phi0r);
  if (!(dev <= residue_tol))
  {
    std::ostringstream os;
    os << "zero-pole residues differ (relative deviation " << dev
       << "); the error grows like 1/w as w -> 0 and its H-infinity norm is unbounded";
    throw ResidueMismatchError(os.str());
  }
  return hinf_norm([&](double w) -> ComplexMatrix { return full(w) - reduced(w); }, grid, exec);
}

}  // namespace swingrom
