// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/mor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <Eigen/Eigenvalues>

namespace swingrom
{

namespace
{

struct Iterate
{
  InterpolationSet interp;
  bool null_column = false;
  LocalBasis basis;
  SecondOrderSystem reduced;
  std::vector<Complex> poles;
};

struct PoleData
{
  Complex lambda;
  ComplexVector direction;
  double dominance = 0.0;
};

struct Selection
{
  InterpolationSet next;
  bool null_column = false;
  std::vector<Complex> poles;
};

SecondOrderSystem Project(const SampleSystem &sys, const Matrix &v)
{
  SecondOrderSystem r;
  const Matrix mv = sys.mass.asDiagonal() * v;
  const Matrix dv = sys.damping.asDiagonal() * v;
  const Matrix kv = sys.stiffness * v;
  r.mass = v.transpose() * mv;
  r.damping = v.transpose() * dv;
  r.stiffness = v.transpose() * kv;
  r.mass = 0.5 * (r.mass + r.mass.transpose()).eval();
  r.damping = 0.5 * (r.damping + r.damping.transpose()).eval();
  r.stiffness = 0.5 * (r.stiffness + r.stiffness.transpose()).eval();
  r.input = v.transpose() * sys.input;
  r.output = sys.output * v;
  return r;
}

// Unit norm, largest entry real and positive.
ComplexVector NormalizeDirection(ComplexVector b, const ComplexVector &fallback)
{
  const double norm = b.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
  {
    return fallback;
  }
  Eigen::Index k = 0;
  b.cwiseAbs().maxCoeff(&k);
  const Complex phase = b[k] / std::abs(b[k]);
  b /= phase * norm;
  b[k] = Complex(b[k].real(), 0.0);
  return b;
}

ComplexVector DefaultDirection(const Matrix &b)
{
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullV);
  Vector v = svd.matrixV().col(0);
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v[k] < 0.0)
  {
    v = -v;
  }
  return v.cast<Complex>();
}

bool ShiftLess(Complex a, Complex b)
{
  if (std::abs(a) != std::abs(b))
  {
    return std::abs(a) < std::abs(b);
  }
  return a.imag() < b.imag();
}

// Slots are filled greedily by dominance. When tracking, every current shift
// instead follows the unused pole of the same kind whose mirror image is
// nearest to it.
Selection SelectShifts(const SecondOrderSystem &reduced, int order, bool has_null,
                       const IrkaOptions &opts, const ComplexVector &fallback,
                       const InterpolationSet *track)
{
  const int r = reduced.Order();
  const FirstOrderRealization real = companion_form(reduced);
  Eigen::EigenSolver<Matrix> eig(real.sys.a, true);
  if (eig.info() != Eigen::Success)
  {
    throw Error("eigenvalue computation of the reduced companion matrix failed");
  }
  const double tol0 = opts.tol_zero * real.sys.a.norm();
  const ComplexMatrix mr = reduced.mass.cast<Complex>();
  const ComplexMatrix dr = reduced.damping.cast<Complex>();
  const ComplexMatrix br = reduced.input.cast<Complex>();
  const ComplexMatrix cr = reduced.output.cast<Complex>();

  Selection sel;
  std::vector<PoleData> candidates;
  int near_zero = 0;
  bool any_stable = false;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); k++)
  {
    const Complex lambda = eig.eigenvalues()[k];
    sel.poles.push_back(lambda);
    // A pole this close to zero would give a shift below 10 tol0: the kernel
    // vector takes its place.
    if (std::abs(lambda) < 10.0 * tol0)
    {
      near_zero++;
      continue;
    }
    if (!(lambda.real() < 0.0))
    {
      continue;
    }
    any_stable = true;
    if (lambda.imag() < 0.0)
    {
      continue;
    }
    const ComplexVector x = eig.eigenvectors().col(k).head(r);
    const Complex denom = (x.transpose() * (2.0 * lambda * mr + dr) * x).value();
    const ComplexVector bx = br.transpose() * x;
    const double res = (cr * x).norm() * bx.norm() / std::max(std::abs(denom), 1.0e-300);
    PoleData pd;
    pd.lambda = lambda;
    pd.direction = NormalizeDirection(bx, fallback);
    if (lambda.imag() == 0.0)
    {
      pd.direction = pd.direction.real().cast<Complex>();
      if (!(pd.direction.norm() > 0.0))
      {
        pd.direction = fallback;
      }
    }
    pd.dominance = res / std::abs(lambda.real());
    candidates.push_back(std::move(pd));
  }
  if (!any_stable && near_zero < static_cast<int>(sel.poles.size()))
  {
    throw UnstableSystemError("all nonzero reduced poles are unstable; the projection is broken");
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const PoleData &a, const PoleData &b)
                   {
                     if (a.dominance != b.dominance)
                     {
                       return a.dominance > b.dominance;
                     }
                     return ShiftLess(a.lambda, b.lambda);
                   });

  sel.null_column = has_null && near_zero > 0;
  int slots = order - (sel.null_column ? 1 : 0);
  std::vector<bool> taken(candidates.size(), false);
  auto take = [&](size_t k)
  {
    const PoleData &c = candidates[k];
    taken[k] = true;
    sel.next.shifts.push_back(-c.lambda);
    sel.next.directions.push_back(c.direction);
    if (c.lambda.imag() != 0.0)
    {
      sel.next.shifts.push_back(-std::conj(c.lambda));
      sel.next.directions.push_back(c.direction.conjugate());
      slots -= 2;
    }
    else
    {
      slots -= 1;
    }
  };
  if (track)
  {
    for (Complex sigma : track->shifts)
    {
      if (sigma.imag() < 0.0)
      {
        continue;
      }
      const bool want_pair = sigma.imag() > 0.0;
      size_t pick = candidates.size();
      double nearest = std::numeric_limits<double>::infinity();
      for (int pass = 0; pass < 2 && pick == candidates.size(); pass++)
      {
        for (size_t k = 0; k < candidates.size(); k++)
        {
          const bool is_pair = candidates[k].lambda.imag() != 0.0;
          if (taken[k] || (pass == 0 && is_pair != want_pair))
          {
            continue;
          }
          const double d = std::abs(-std::conj(candidates[k].lambda) - sigma);
          if (d < nearest)
          {
            nearest = d;
            pick = k;
          }
        }
      }
      if (pick < candidates.size())
      {
        take(pick);
      }
    }
    slots = 0;
  }
  for (size_t k = 0; k < candidates.size() && slots > 0; k++)
  {
    const int need = candidates[k].lambda.imag() != 0.0 ? 2 : 1;
    if (need <= slots)
    {
      take(k);
    }
  }
  // One slot left and no real pole to fill it: the next pair overflows by one.
  if (slots == 1)
  {
    for (size_t k = 0; k < candidates.size(); k++)
    {
      if (!taken[k])
      {
        take(k);
        break;
      }
    }
  }

  std::vector<size_t> order_idx(sel.next.shifts.size());
  for (size_t k = 0; k < order_idx.size(); k++)
  {
    order_idx[k] = k;
  }
  std::stable_sort(order_idx.begin(), order_idx.end(), [&](size_t a, size_t b)
                   { return ShiftLess(sel.next.shifts[a], sel.next.shifts[b]); });
  InterpolationSet sorted;
  for (size_t k : order_idx)
  {
    sorted.shifts.push_back(sel.next.shifts[k]);
    sorted.directions.push_back(sel.next.directions[k]);
  }
  sel.next = std::move(sorted);
  return sel;
}

std::vector<Complex> WithZero(const std::vector<Complex> &shifts, bool null_column)
{
  std::vector<Complex> out = shifts;
  if (null_column)
  {
    out.emplace_back(0.0, 0.0);
  }
  return out;
}

Iterate BuildIterate(const SampleSystem &sys, const InterpolationSet &interp, bool null_column,
                     const IrkaOptions &opts, int sample)
{
  Iterate it;
  it.interp = interp;
  it.null_column = null_column;
  const LocalBasis raw = local_basis(sys, interp, sample, null_column);
  const std::vector<int> kept = orthonormalize(raw.columns, opts.rank_tol, it.basis.columns);
  for (int k : kept)
  {
    it.basis.tags.push_back(raw.tags[k]);
  }
  it.reduced = Project(sys, it.basis.columns);
  return it;
}

}  // namespace

double shift_distance(const std::vector<Complex> &a, const std::vector<Complex> &b)
{
  if (a.empty() && b.empty())
  {
    return 0.0;
  }
  if (a.empty() || b.empty())
  {
    return 1.0;
  }
  auto directed = [](const std::vector<Complex> &x, const std::vector<Complex> &y)
  {
    double worst = 0.0;
    for (Complex u : x)
    {
      double nearest = std::numeric_limits<double>::infinity();
      for (Complex v : y)
      {
        nearest = std::min(nearest, std::abs(u - v));
      }
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  double scale = 0.0;
  for (Complex u : a)
  {
    scale = std::max(scale, std::abs(u));
  }
  for (Complex v : b)
  {
    scale = std::max(scale, std::abs(v));
  }
  const double d = std::max(directed(a, b), directed(b, a));
  return scale > 0.0 ? d / scale : 0.0;
}

InterpolationSet initial_interpolation(const SampleSystem &sys, int order)
{
  const Vector spectrum = symmetric_spectrum(sys.stiffness);
  const double lmax = spectrum[spectrum.size() - 1];
  double llo = 0.0;
  for (Eigen::Index k = 0; k < spectrum.size(); k++)
  {
    // Skip the kernel of a Laplacian.
    if (spectrum[k] > 1.0e-10 * std::max(lmax, 1.0e-300))
    {
      llo = spectrum[k];
      break;
    }
  }
  if (!(llo > 0.0))
  {
    llo = lmax > 0.0 ? lmax : 1.0;
  }
  const double mmin = sys.mass.minCoeff();
  const double lo = std::sqrt(llo) / 10.0;
  const double hi = std::sqrt(std::max(lmax, llo) / mmin) * 10.0;
  const ComplexVector dir = DefaultDirection(sys.input);

  InterpolationSet interp;
  const int pairs = order / 2;
  for (int k = 0; k < pairs; k++)
  {
    const double t = pairs == 1 ? 0.5 : static_cast<double>(k) / (pairs - 1);
    const double w = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
    interp.shifts.emplace_back(0.0, -w);
    interp.directions.push_back(dir);
    interp.shifts.emplace_back(0.0, w);
    interp.directions.push_back(dir);
  }
  if (order % 2 == 1)
  {
    interp.shifts.emplace_back(std::sqrt(lo * hi), 0.0);
    interp.directions.push_back(dir);
  }
  return interp;
}

IrkaResult sor_irka(const SampleSystem &sys, int order, const IrkaOptions &opts, int sample)
{
  if (order < 1)
  {
    throw InvariantError("local order must be at least 1");
  }
  if (opts.max_iter < 1 || !(opts.tol > 0.0) || !(opts.tol_zero > 0.0) || !(opts.rank_tol > 0.0))
  {
    throw InvariantError("IRKA options need max_iter >= 1 and positive tolerances");
  }
  const bool has_null = sys.null_vector.has_value();
  const ComplexVector fallback = DefaultDirection(sys.input);

  IrkaResult result;
  InterpolationSet interp = initial_interpolation(sys, order);
  bool null_column = false;
  Iterate best;
  double best_movement = std::numeric_limits<double>::infinity();
  int best_iter = 0;
  bool tracking = false;
  for (int it = 1; it <= opts.max_iter; it++)
  {
    Iterate cur = BuildIterate(sys, interp, null_column, opts, sample);
    Selection sel = SelectShifts(cur.reduced, order, has_null, opts, fallback,
                                 tracking ? &interp : nullptr);
    cur.poles = sel.poles;
    const double movement = shift_distance(WithZero(interp.shifts, null_column),
                                           WithZero(sel.next.shifts, sel.null_column));
    result.diagnostics.movement.push_back(movement);
    result.diagnostics.iterations = it;
    if (movement < best_movement)
    {
      best_movement = movement;
      best = cur;
      best_iter = it;
    }
    if (movement <= opts.tol)
    {
      result.diagnostics.converged = true;
      break;
    }
    // No progress for three sweeps means the dominance ranking cycles between
    // pole subsets; restart from the best iterate and track its poles.
    if (!tracking && it - best_iter >= 3)
    {
      tracking = true;
      interp = best.interp;
      null_column = best.null_column;
      continue;
    }
    interp = std::move(sel.next);
    null_column = sel.null_column;
  }
  result.diagnostics.final_movement = result.diagnostics.movement.back();
  if (!result.diagnostics.converged)
  {
    std::ostringstream os;
    os << "SOR-IRKA";
    if (sample >= 0)
    {
      os << " (sample " << sample << ")";
    }
    os << " did not converge in " << opts.max_iter << " iterations; final shift movement "
       << result.diagnostics.final_movement << ", returning the iterate with movement "
       << best_movement;
    log::Warn(os.str());
  }

  if (has_null && !best.null_column)
  {
    best = BuildIterate(sys, best.interp, true, opts, sample);
    result.diagnostics.null_vector_forced = true;
    best.null_column = true;
    const FirstOrderRealization real = companion_form(best.reduced);
    Eigen::EigenSolver<Matrix> eig(real.sys.a, false);
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); k++)
    {
      best.poles.push_back(eig.eigenvalues()[k]);
    }
  }
  result.diagnostics.null_vector_column = best.null_column;
  result.interpolation = std::move(best.interp);
  result.basis = std::move(best.basis);
  result.reduced = std::move(best.reduced);
  result.reduced_poles = std::move(best.poles);
  return result;
}

IrkaResult sor_irka(const SecondOrderModel &model, const Vector &p, int order,
                    const IrkaOptions &opts, int sample)
{
  return sor_irka(sample_system(model, p), order, opts, sample);
}

}  // namespace swingrom
