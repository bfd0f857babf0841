// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <Eigen/Eigenvalues>

namespace swingrom
{

namespace
{

std::string Num(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string Short(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

int MatchingSample(const ParametricRom &rom, const Vector &p, double tol)
{
  for (size_t i = 0; i < rom.samples.size(); i++)
  {
    const Vector &q = rom.samples[i].p;
    if (q.size() == p.size() && (q - p).norm() <= tol * q.norm())
    {
      return static_cast<int>(i);
    }
  }
  return -1;
}

double Median(std::vector<double> v)
{
  if (v.empty())
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(v.begin(), v.end());
  const size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// Uniform on [0, 1) from the top 53 bits; identical on every platform.
double Unit(std::mt19937_64 &rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

bool Certificate::Passed() const
{
  return error.empty() && residue_match && structure && zero_simple && stable_poles &&
         interpolation_ok;
}

Certificate certify(const SecondOrderModel &model, const ParametricRom &rom, const Vector &p,
                    const CertifyTolerances &tol)
{
  Certificate c;
  c.p = p;
  try
  {
    const ReducedModel red = rom_at(rom, model, p, tol.angle);
    c.order = red.Order();

    const ReducedResidue res = reduced_zero_residue(red, model, p, tol.angle, tol.zero_eig);
    c.kernel_angle_sine = res.angle_sine;
    c.residue_deviation = residue_deviation(res.full.phi0, res.phi0r);
    c.residue_match = c.residue_deviation <= tol.residue;

    Eigen::SelfAdjointEigenSolver<Matrix> me(red.Mass(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> de(red.Damping(), Eigen::EigenvaluesOnly);
    const Matrix lr = assemble_Lr(red, model, p);
    Eigen::SelfAdjointEigenSolver<Matrix> le(lr, Eigen::EigenvaluesOnly);
    c.mass_min_eig = me.eigenvalues()[0];
    c.damping_min_eig = de.eigenvalues()[0];
    const Vector &lev = le.eigenvalues();
    c.lr_min_eig = lev[0];
    c.lr_second_eig = lev.size() > 1 ? lev[1] : std::numeric_limits<double>::infinity();
    c.lr_norm = std::max(std::abs(lev[0]), std::abs(lev[lev.size() - 1]));
    const double zero_gate = tol.zero_eig * c.lr_norm;
    c.structure = c.mass_min_eig > 0.0 && c.damping_min_eig > 0.0 && c.lr_min_eig >= -zero_gate;
    c.zero_simple = std::abs(c.lr_min_eig) <= zero_gate && c.lr_second_eig > tol.gap * zero_gate;

    const SecondOrderSystem sys = reduced_system(red, model, p);
    const FirstOrderRealization real = companion_form(sys);
    Eigen::EigenSolver<Matrix> eig(real.sys.a, false);
    if (eig.info() != Eigen::Success)
    {
      throw Error("eigenvalues of the reduced companion matrix did not converge");
    }
    const double tol0 = tol.tol_zero * real.sys.a.norm();
    double abscissa = -std::numeric_limits<double>::infinity();
    bool all_left = true;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); k++)
    {
      const Complex lambda = eig.eigenvalues()[k];
      if (!(lambda.real() < tol0))
      {
        all_left = false;
      }
      if (std::abs(lambda) < tol0)
      {
        c.near_zero_poles++;
      }
      else
      {
        abscissa = std::max(abscissa, lambda.real());
      }
    }
    c.spectral_abscissa = abscissa;
    c.stable_poles = all_left && c.near_zero_poles <= 1 && abscissa < 0.0;

    const int sample = MatchingSample(rom, p, tol.sample_match);
    if (sample >= 0)
    {
      const SampleSystem full = sample_system(model, p);
      ShiftedPencil pencil(full);
      const InterpolationSet &interp = rom.samples[sample].interpolation;
      for (int j = 0; j < interp.Size(); j++)
      {
        const Complex sigma = interp.shifts[j];
        const ComplexVector b = interp.directions[j];
        const ComplexVector hb =
            full.output.cast<Complex>() * pencil.Solve(sigma, full.input.cast<Complex>() * b);
        const ComplexVector hrb = eval_transfer(sys, sigma) * b;
        const double scale = hb.norm();
        const double r = scale > 0.0 ? (hb - hrb).norm() / scale : (hb - hrb).norm();
        c.interpolation.push_back({sample, sigma, r});
        c.max_interpolation_residual = std::max(c.max_interpolation_residual, r);
      }
      c.interpolation_ok = c.max_interpolation_residual <= tol.interpolation;
    }
  }
  catch (const std::exception &e)
  {
    c.error = e.what();
    c.residue_match = false;
    c.structure = false;
    c.zero_simple = false;
    c.stable_poles = false;
    c.interpolation_ok = false;
  }
  return c;
}

std::string format_certificate(const Certificate &c)
{
  std::ostringstream os;
  auto line = [&](bool ok, const std::string &name, const std::string &detail)
  { os << (ok ? "PASS" : "FAIL") << "  " << name << "  " << detail << "\n"; };
  os << "certificate at p = [";
  for (Eigen::Index k = 0; k < c.p.size(); k++)
  {
    os << (k ? ", " : "") << c.p[k];
  }
  os << "], r = " << c.order << "\n";
  if (!c.error.empty())
  {
    line(false, "evaluation", c.error);
  }
  line(c.residue_match, "residue",
       "deviation " + Short(c.residue_deviation) + ", kernel angle sin " +
           Short(c.kernel_angle_sine));
  line(c.structure, "structure",
       "min eig M_r " + Short(c.mass_min_eig) + ", D_r " + Short(c.damping_min_eig) +
           ", L_r " + Short(c.lr_min_eig));
  line(c.zero_simple, "zero-simple",
       "lambda_1(L_r) " + Short(c.lr_min_eig) + ", lambda_2(L_r) " + Short(c.lr_second_eig) +
           ", ||L_r|| " + Short(c.lr_norm));
  line(c.stable_poles, "stability",
       "abscissa of nonzero poles " + Short(c.spectral_abscissa) + ", near-zero poles " +
           std::to_string(c.near_zero_poles));
  if (!c.interpolation.empty())
  {
    line(c.interpolation_ok, "interpolation",
         std::to_string(c.interpolation.size()) + " shifts, max residual " +
             Short(c.max_interpolation_residual));
  }
  return os.str();
}

Json certificate_to_json(const Certificate &c)
{
  Json j;
  j["p"] = std::vector<double>(c.p.data(), c.p.data() + c.p.size());
  j["r"] = c.order;
  j["passed"] = c.Passed();
  j["residue_match"] = c.residue_match;
  j["residue_deviation"] = c.residue_deviation;
  j["kernel_angle_sine"] = c.kernel_angle_sine;
  j["structure"] = c.structure;
  j["mass_min_eig"] = c.mass_min_eig;
  j["damping_min_eig"] = c.damping_min_eig;
  j["zero_simple"] = c.zero_simple;
  j["lr_min_eig"] = c.lr_min_eig;
  j["lr_second_eig"] = std::isfinite(c.lr_second_eig) ? Json(c.lr_second_eig) : Json(nullptr);
  j["lr_norm"] = c.lr_norm;
  j["stable_poles"] = c.stable_poles;
  j["spectral_abscissa"] =
      std::isfinite(c.spectral_abscissa) ? Json(c.spectral_abscissa) : Json(nullptr);
  j["near_zero_poles"] = c.near_zero_poles;
  j["interpolation_ok"] = c.interpolation_ok;
  Json interp = Json::array();
  for (const auto &r : c.interpolation)
  {
    interp.push_back({{"sample", r.sample},
                      {"shift", {r.shift.real(), r.shift.imag()}},
                      {"residual", r.residual}});
  }
  j["interpolation"] = std::move(interp);
  if (!c.error.empty())
  {
    j["error"] = c.error;
  }
  return j;
}

CertificationError::CertificationError(Certificate cert)
  : Error("certification failed:\n" + format_certificate(cert)), cert_(std::move(cert))
{
}

std::string SweepSpec::Describe() const
{
  std::ostringstream os;
  if (!points.empty())
  {
    os << "list of " << points.size() << " points";
  }
  else if (samples > 0)
  {
    os << "random " << samples << " points, seed " << seed;
  }
  else
  {
    os << "tensor ";
    for (size_t k = 0; k < counts.size(); k++)
    {
      os << (k ? "x" : "") << counts[k];
    }
  }
  return os.str();
}

std::vector<Vector> sweep_points(const ParameterSpace &space, const SweepSpec &spec)
{
  const int nu = space.NumParams();
  if (!spec.points.empty())
  {
    for (const auto &p : spec.points)
    {
      if (p.size() != nu)
      {
        throw InvariantError("sweep point has the wrong number of parameters");
      }
    }
    return spec.points;
  }
  std::vector<Vector> out;
  if (spec.samples > 0)
  {
    std::mt19937_64 rng(spec.seed);
    for (int s = 0; s < spec.samples; s++)
    {
      Vector p(nu);
      for (int k = 0; k < nu; k++)
      {
        p[k] = space.Lower()[k] + (space.Upper()[k] - space.Lower()[k]) * Unit(rng);
      }
      out.push_back(std::move(p));
    }
    return out;
  }
  std::vector<int> counts = spec.counts;
  if (counts.size() == 1 && nu > 1)
  {
    counts.assign(nu, counts[0]);
  }
  if (static_cast<int>(counts.size()) != nu)
  {
    throw InvariantError("tensor grid needs one count per parameter (or a single count)");
  }
  long total = 1;
  for (int c : counts)
  {
    if (c < 1)
    {
      throw InvariantError("tensor grid counts must be positive");
    }
    total *= c;
  }
  // First parameter varies slowest.
  for (long idx = 0; idx < total; idx++)
  {
    Vector p(nu);
    long rest = idx;
    for (int k = nu - 1; k >= 0; k--)
    {
      const int i = static_cast<int>(rest % counts[k]);
      rest /= counts[k];
      const double lo = space.Lower()[k];
      const double hi = space.Upper()[k];
      p[k] = counts[k] == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (counts[k] - 1);
      if (counts[k] > 1 && i == counts[k] - 1)
      {
        p[k] = hi;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string to_string(Normalization n)
{
  return n == Normalization::Grid ? "grid" : "stable";
}

Normalization normalization_from_string(const std::string &name)
{
  if (name == "grid")
  {
    return Normalization::Grid;
  }
  if (name == "stable")
  {
    return Normalization::Stable;
  }
  throw InvariantError("unknown normalization '" + name + "' (expected grid or stable)");
}

SweepPoint sweep_point(const SecondOrderModel &model, const ParametricRom &rom, const Vector &p,
                       const SweepOptions &opts)
{
  const auto start = std::chrono::steady_clock::now();
  SweepPoint pt;
  pt.p = p;
  const ReducedModel red = rom_at(rom, model, p, opts.tol.angle);
  const SecondOrderSystem rsys = reduced_system(red, model, p);
  const ReducedResidue res = reduced_zero_residue(red, model, p, opts.tol.angle, opts.tol.zero_eig);
  pt.residue_deviation = residue_deviation(res.full.phi0, res.phi0r);

  const auto full = make_full_response(model, p);
  const auto reduced = make_response(rsys);
  const std::vector<double> omegas = opts.grid.Omegas();
  const std::vector<ComplexMatrix> hf = evaluate_grid(*full, omegas, Execution::Serial);
  const std::vector<ComplexMatrix> hr = evaluate_grid(*reduced, omegas, Execution::Serial);
  const ComplexMatrix phi0 = res.full.phi0.cast<Complex>();

  double norm = 0.0;
  int best = 0;
  std::vector<double> err(omegas.size());
  for (size_t k = 0; k < omegas.size(); k++)
  {
    err[k] = sigma_max(hf[k] - hr[k]);
    if (err[k] > err[best])
    {
      best = static_cast<int>(k);
    }
    const ComplexMatrix h = opts.normalization == Normalization::Grid
                                ? hf[k]
                                : ComplexMatrix(hf[k] - phi0 / Complex(0.0, omegas[k]));
    norm = std::max(norm, sigma_max(h));
  }
  pt.abs_hinf = err[best];
  pt.argmax_omega = omegas[best];
  const int count = static_cast<int>(omegas.size());
  auto error_at = [&](double t)
  {
    const Complex s(0.0, std::exp(t));
    return sigma_max(full->Evaluate(s) - reduced->Evaluate(s));
  };
  auto [t, value] = golden_section_max(error_at, std::log(omegas[std::max(best - 1, 0)]),
                                       std::log(omegas[std::min(best + 1, count - 1)]), 1.0e-10);
  if (value > pt.abs_hinf)
  {
    pt.abs_hinf = value;
    pt.argmax_omega = std::exp(t);
  }
  pt.rel_hinf = norm > 0.0 ? pt.abs_hinf / norm : pt.abs_hinf;

  if (opts.h2)
  {
    if (res.has_zero_pole && pt.residue_deviation <= 1.0e-8)
    {
      const FirstOrderRealization freal = companion_form(model, p);
      const SpectralSplit fsplit = deflate_zero_mode(freal, res.full, false);
      const FirstOrderRealization rreal = companion_form(rsys);
      const ResidueData rres =
          zero_residue(rsys.output, rsys.input, rsys.damping, res.kernel_r);
      const SpectralSplit rsplit = deflate_zero_mode(rreal, rres, false);
      const double base = h2_norm(fsplit);
      const double e = h2_error(fsplit, rsplit, 1.0e-8);
      pt.rel_h2 = base > 0.0 ? e / base : e;
    }
    else
    {
      pt.rel_h2 = std::numeric_limits<double>::infinity();
    }
  }
  pt.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return pt;
}

SweepReport sweep(const SecondOrderModel &model, const ParametricRom &rom, const SweepSpec &spec,
                  const SweepOptions &opts)
{
  check_rom_model(rom, model);
  SweepReport report;
  report.spec = spec;
  report.options = opts;
  if (opts.certify_corners)
  {
    for (const Vector &corner : model.Space().Corners())
    {
      Certificate c = certify(model, rom, corner, opts.tol);
      const bool ok = c.Passed();
      report.corners.push_back(c);
      if (!ok)
      {
        throw CertificationError(std::move(c));
      }
    }
  }
  const std::vector<Vector> points = sweep_points(model.Space(), spec);
  report.points.resize(points.size());
  std::vector<std::string> errors(points.size());
  const int count = static_cast<int>(points.size());
  auto run = [&](int k)
  {
    try
    {
      report.points[k] = sweep_point(model, rom, points[k], opts);
    }
    catch (const std::exception &e)
    {
      errors[k] = e.what();
    }
  };
  if (opts.exec == Execution::Parallel)
  {
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < count; k++)
    {
      run(k);
    }
  }
  else
  {
    for (int k = 0; k < count; k++)
    {
      run(k);
    }
  }
  for (int k = 0; k < count; k++)
  {
    if (!errors[k].empty())
    {
      throw Error("sweep point " + std::to_string(k) + ": " + errors[k]);
    }
  }
  for (int k = 0; k < count; k++)
  {
    if (report.argmax < 0 || report.points[k].rel_hinf > report.points[report.argmax].rel_hinf)
    {
      report.argmax = k;
    }
  }
  return report;
}

double SweepReport::MaxRelHinf() const
{
  return argmax >= 0 ? points[argmax].rel_hinf : std::numeric_limits<double>::quiet_NaN();
}

double SweepReport::MedianRelHinf() const
{
  std::vector<double> v;
  for (const auto &p : points)
  {
    v.push_back(p.rel_hinf);
  }
  return Median(std::move(v));
}

std::string sweep_csv(const SweepReport &report)
{
  std::ostringstream os;
  const auto &g = report.options.grid;
  os << "# swingrom " << kVersion << " sweep\n";
  os << "# normalization: " << to_string(report.options.normalization)
     << (report.options.normalization == Normalization::Grid
             ? " (per point, max over the frequency grid of sigma_max(H(iw,p)))"
             : " (per point, max over the frequency grid of sigma_max(H(iw,p) - phi0(p)/(iw)))")
     << "\n";
  os << "# omega: log grid [" << Num(g.omega_min) << ", " << Num(g.omega_max) << "], " << g.points
     << " points, golden-section refinement; rel_hinf is a lower bound\n";
  os << "# points: " << report.spec.Describe() << "\n";
  const int nu = report.points.empty() ? 0 : static_cast<int>(report.points[0].p.size());
  for (int k = 0; k < nu; k++)
  {
    os << "p_" << (k + 1) << ",";
  }
  os << "rel_hinf,argmax_omega";
  if (report.options.h2)
  {
    os << ",rel_h2";
  }
  os << "\n";
  for (const auto &pt : report.points)
  {
    for (int k = 0; k < nu; k++)
    {
      os << Num(pt.p[k]) << ",";
    }
    os << Num(pt.rel_hinf) << "," << Num(pt.argmax_omega);
    if (report.options.h2)
    {
      os << "," << Num(pt.rel_h2);
    }
    os << "\n";
  }
  return os.str();
}

Json sweep_json(const SweepReport &report)
{
  Json j;
  j["version"] = std::string(kVersion);
  j["normalization"] = to_string(report.options.normalization);
  j["omega"] = {{"min", report.options.grid.omega_min},
                {"max", report.options.grid.omega_max},
                {"points", report.options.grid.points}};
  j["points_spec"] = report.spec.Describe();
  Json pts = Json::array();
  for (const auto &pt : report.points)
  {
    Json e;
    e["p"] = std::vector<double>(pt.p.data(), pt.p.data() + pt.p.size());
    e["rel_hinf"] = pt.rel_hinf;
    e["argmax_omega"] = pt.argmax_omega;
    if (report.options.h2)
    {
      e["rel_h2"] = std::isfinite(pt.rel_h2) ? Json(pt.rel_h2) : Json(nullptr);
    }
    pts.push_back(std::move(e));
  }
  j["points"] = std::move(pts);
  j["max_rel_hinf"] = report.MaxRelHinf();
  j["median_rel_hinf"] = report.MedianRelHinf();
  return j;
}

std::vector<StudyRow> convergence_study(const SecondOrderModel &model,
                                        const std::vector<Vector> &samples,
                                        const std::vector<int> &orders, const SweepSpec &spec,
                                        const SweepOptions &sweep_opts,
                                        const ReduceOptions &reduce_opts)
{
  std::vector<int> unique;
  std::set<int> seen;
  for (int r : orders)
  {
    if (!seen.insert(r).second)
    {
      log::Warn("order " + std::to_string(r) + " listed more than once; dropping the duplicate");
      continue;
    }
    unique.push_back(r);
  }
  const int m = static_cast<int>(samples.size());
  std::vector<StudyRow> rows;
  for (int target : unique)
  {
    StudyRow row;
    row.target = target;
    ParametricRom rom;
    if (target >= model.Size())
    {
      rom = exact_rom(model);
    }
    else
    {
      if (m == 0)
      {
        throw InvariantError("convergence study needs parameter samples");
      }
      std::vector<int> per(m, target / m);
      for (int i = 0; i < target % m; i++)
      {
        per[i]++;
      }
      for (int &r : per)
      {
        r = std::max(r, 1);
      }
      rom = build_parametric_rom(model, samples, per, reduce_opts);
    }
    row.order = rom.reduced.Order();
    try
    {
      const SweepReport rep = sweep(model, rom, spec, sweep_opts);
      row.median = rep.MedianRelHinf();
      row.max = rep.MaxRelHinf();
      row.certified = true;
    }
    catch (const CertificationError &e)
    {
      log::Warn("order " + std::to_string(target) + ": " + e.what());
    }
    rows.push_back(row);
  }
  return rows;
}

std::string study_csv(const std::vector<StudyRow> &rows)
{
  std::ostringstream os;
  os << "# swingrom " << kVersion << " convergence study\n";
  os << "target_r,r,median_rel_hinf,max_rel_hinf,certified\n";
  for (const auto &r : rows)
  {
    os << r.target << "," << r.order << "," << Num(r.median) << "," << Num(r.max) << ","
       << (r.certified ? 1 : 0) << "\n";
  }
  return os.str();
}

}  // namespace swingrom
