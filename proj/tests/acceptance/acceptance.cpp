// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "swingrom/matpower.hpp"
#include "swingrom/validate.hpp"

namespace
{

using namespace swingrom;
using Clock = std::chrono::steady_clock;

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char *format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char *format, ...)
{
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

double Seconds(Clock::time_point since)
{
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::vector<Vector> RandomPoints(const ParameterSpace &space, int count, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vector> out;
  for (int i = 0; i < count; i++)
  {
    Vector p(space.NumParams());
    for (int k = 0; k < p.size(); k++)
    {
      p[k] = space.Lower()[k] + u(rng) * (space.Upper()[k] - space.Lower()[k]);
    }
    out.push_back(p);
  }
  return out;
}

// Residue at the zero pole from the reduced kernel vector, found here from
// the eigendecomposition of L_r(p) rather than through the library.
Matrix ReducedResidueOracle(const ReducedModel &red, const SecondOrderModel &model, const Vector &p)
{
  Eigen::SelfAdjointEigenSolver<Matrix> eig(assemble_Lr(red, model, p));
  const Vector w = eig.eigenvectors().col(0);
  return (red.C() * w) * (w.transpose() * red.B()) / w.dot(red.Damping() * w);
}

Matrix FullResidueOracle(const SecondOrderModel &model, const Vector &p)
{
  const Vector v = model.Space().Expand(p).cwiseInverse();
  return (model.C() * v) * (v.transpose() * model.B()) / v.dot(model.Damping().cwiseProduct(v));
}

// Residue at the eigenvalue nearest zero of the companion matrix, from
// A = X diag(lambda) X^{-1}.
Matrix PartialFractionResidue(const StateSpace &sys)
{
  Eigen::ComplexEigenSolver<Matrix> eig(sys.a);
  const ComplexMatrix x = eig.eigenvectors();
  const ComplexMatrix xinv = x.inverse();
  Eigen::Index k = 0;
  eig.eigenvalues().cwiseAbs().minCoeff(&k);
  return ((sys.c.cast<Complex>() * x.col(k)) * (xinv.row(k) * sys.b.cast<Complex>())).real();
}

struct Case1
{
  SecondOrderModel model;
  std::vector<Vector> samples;
  ParametricRom rom40;
  double build_seconds = 0.0;
};

SecondOrderModel Network200(int blocks)
{
  return SecondOrderModel(generate_network(GraphKind::RandomConnected, 200, 7),
                          ParameterSpace::Uniform(200, blocks));
}

Case1 &Case1Data()
{
  static Case1 data = [] {
    Vector a(2), b(2);
    a << 0.9572, 0.93399;
    b << 1.0304, 0.9522;
    const auto start = Clock::now();
    SecondOrderModel model = Network200(2);
    ParametricRom rom = build_parametric_rom(model, {a, b}, {20});
    return Case1{std::move(model), {a, b}, std::move(rom), Seconds(start)};
  }();
  return data;
}

Outcome ResidueMatching()
{
  const auto start = Clock::now();
  Case1 &c = Case1Data();
  double worst = 0.0;
  for (const Vector &p : RandomPoints(c.model.Space(), 50, 101))
  {
    const Matrix phi0 = FullResidueOracle(c.model, p);
    const Matrix phi0r = ReducedResidueOracle(c.rom40.reduced, c.model, p);
    worst = std::max(worst, (phi0 - phi0r).norm() / phi0.norm());
  }
  const double seconds = Seconds(start) + c.build_seconds;
  return {worst <= 1e-10 && seconds <= 120.0,
          Fmt("max relative residue deviation %.3e over 50 random p, r = %d, %.1f s", worst,
              c.rom40.reduced.Order(), seconds)};
}

Outcome Interpolation()
{
  Case1 &c = Case1Data();
  double worst = 0.0;
  int shifts = 0;
  int converged = 0;
  for (size_t i = 0; i < c.rom40.samples.size(); i++)
  {
    const SampleRecord &rec = c.rom40.samples[i];
    if (!rec.diagnostics.converged)
    {
      continue;
    }
    converged++;
    const SecondOrderSystem red = reduced_system(c.rom40.reduced, c.model, rec.p);
    for (int j = 0; j < rec.interpolation.Size(); j++)
    {
      const Complex s = rec.interpolation.shifts[j];
      const ComplexVector b = rec.interpolation.directions[j];
      const ComplexVector full = eval_transfer(c.model, s, rec.p) * b;
      const ComplexVector err = full - eval_transfer(red, s) * b;
      worst = std::max(worst, err.norm() / full.norm());
      shifts++;
    }
  }
  return {converged == static_cast<int>(c.rom40.samples.size()) && worst <= 1e-8,
          Fmt("max tangential residual %.3e over %d shifts, %d/%zu samples converged", worst, shifts,
              converged, c.rom40.samples.size())};
}

Outcome Structure()
{
  Case1 &c = Case1Data();
  const ReducedModel &red = c.rom40.reduced;
  const double m_min = Eigen::SelfAdjointEigenSolver<Matrix>(red.Mass()).eigenvalues().minCoeff();
  const double d_min = Eigen::SelfAdjointEigenSolver<Matrix>(red.Damping()).eigenvalues().minCoeff();
  const bool sym = red.Mass() == red.Mass().transpose() && red.Damping() == red.Damping().transpose();
  bool ok = m_min > 0.0 && d_min > 0.0 && sym;
  double min_gap = std::numeric_limits<double>::infinity();
  for (const Vector &p : RandomPoints(c.model.Space(), 50, 202))
  {
    const Matrix lr = assemble_Lr(red, c.model, p);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(lr).eigenvalues();
    const double gate = 1e-10 * ev.cwiseAbs().maxCoeff();
    ok = ok && lr == lr.transpose() && ev[0] >= -gate && std::abs(ev[0]) <= gate;
    min_gap = std::min(min_gap, ev[1] / gate);
  }
  ok = ok && min_gap >= 100.0;
  return {ok, Fmt("min eig M_r %.3e, D_r %.3e; lambda_2(L_r) / zero gate >= %.3e over 50 random p", m_min,
                  d_min, min_gap)};
}

Outcome Case1Sweep()
{
  const auto start = Clock::now();
  Case1 &c = Case1Data();
  const ParametricRom rom20 = build_parametric_rom(c.model, c.samples, {10});
  SweepSpec grid;
  grid.counts = {10, 10};
  const SweepReport r40 = sweep(c.model, c.rom40, grid);
  const SweepReport r20 = sweep(c.model, rom20, grid);
  bool finite = r40.points.size() == 100;
  for (const SweepPoint &pt : r40.points)
  {
    finite = finite && std::isfinite(pt.rel_hinf);
  }
  const double seconds = Seconds(start) + c.build_seconds;
  return {finite && r40.MaxRelHinf() <= 5e-2 && r40.MedianRelHinf() < r20.MedianRelHinf() && seconds <= 300.0,
          Fmt("r = %d: max %.3e, median %.3e; r = %d: median %.3e; 100 points finite: %s, %.1f s",
              c.rom40.reduced.Order(), r40.MaxRelHinf(), r40.MedianRelHinf(), rom20.reduced.Order(),
              r20.MedianRelHinf(), finite ? "yes" : "no", seconds)};
}

Outcome Case2Sweep()
{
  const auto start = Clock::now();
  const SecondOrderModel model = Network200(4);
  const Json doc = Json::parse(read_text_file(std::string(SWINGROM_FIXTURES) + "/case2_samples.json"));
  std::vector<Vector> samples;
  for (const auto &row : doc["samples"])
  {
    const auto values = row.get<std::vector<double>>();
    samples.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  const ParametricRom rom = build_parametric_rom(model, samples, {20});
  SweepSpec spec;
  spec.samples = 200;
  spec.seed = 2024;
  const SweepReport rep = sweep(model, rom, spec);
  bool finite = rep.points.size() == 200;
  for (const SweepPoint &pt : rep.points)
  {
    finite = finite && std::isfinite(pt.rel_hinf);
  }
  return {finite && rep.MaxRelHinf() <= 5e-2 && rom.reduced.Order() <= 80,
          Fmt("r = %d, 200 random points finite: %s, max %.3e, median %.3e, %.1f s", rom.reduced.Order(),
              finite ? "yes" : "no", rep.MaxRelHinf(), rep.MedianRelHinf(), Seconds(start))};
}

double ErrorHinf(const SecondOrderModel &model, const ReducedModel &red, const Vector &p, double omega_min)
{
  const auto full = make_full_response(model, p);
  const auto rsys = make_response(reduced_system(red, model, p));
  FrequencyGrid grid;
  grid.omega_min = omega_min;
  const FrequencyFn diff = [&](double w) {
    const Complex s(0.0, w);
    return ComplexMatrix(full->Evaluate(s) - rsys->Evaluate(s));
  };
  return hinf_norm(diff, grid).value;
}

Outcome NegativeControl()
{
  Case1 &c = Case1Data();
  ReduceOptions none;
  none.enrich = EnrichMode::None;
  const ParametricRom bare = build_parametric_rom(c.model, c.samples, {20}, none);
  Vector p(2);
  p << 1.1, 0.88;
  const double bare_hi = ErrorHinf(c.model, bare.reduced, p, 1e-2);
  const double bare_lo = ErrorHinf(c.model, bare.reduced, p, 1e-6);
  const ReducedModel enriched = rom_at(c.rom40, c.model, p);
  const double enr_hi = ErrorHinf(c.model, enriched, p, 1e-2);
  const double enr_lo = ErrorHinf(c.model, enriched, p, 1e-6);
  const double growth = bare_lo / bare_hi;
  const double change = std::abs(enr_lo / enr_hi - 1.0);
  return {growth >= 10.0 && change <= 0.05,
          Fmt("without enrichment %.3e -> %.3e (x%.3g); enriched %.3e -> %.3e (%.2f%%)", bare_hi, bare_lo,
              growth, enr_hi, enr_lo, 100.0 * change)};
}

Outcome NormOracles()
{
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  double worst = 0.0;
  int max_modes = 0;
  for (int t = 0; t < 10; t++)
  {
    StateSpace sys;
    if (t % 2 == 0)
    {
      const int n = 6 + 9 * (t / 2);
      sys.a = Matrix::NullaryExpr(n, n, [&](Eigen::Index, Eigen::Index) { return g(rng); });
      sys.a -= (sys.a.eigenvalues().real().maxCoeff() + 0.2) * Matrix::Identity(n, n);
      sys.b = Matrix::NullaryExpr(n, 1 + t % 3, [&](Eigen::Index, Eigen::Index) { return g(rng); });
      sys.c = Matrix::NullaryExpr(2, n, [&](Eigen::Index, Eigen::Index) { return g(rng); });
    }
    else
    {
      // Stable part of a swing model after removing the pole at zero.
      const int n = 5 + 4 * (t / 2);
      const SecondOrderModel model(generate_network(GraphKind::RandomConnected, n, 40 + t, {}, {0, 1}, {n - 1}),
                                   ParameterSpace::Uniform(n, 1));
      const Vector p = Vector::Ones(1);
      const ResidueData res = zero_residue(model.C(), model.B(), Matrix(model.Damping().asDiagonal()),
                                           null_vector(model.Space(), p));
      sys = deflate_zero_mode(companion_form(model, p), res).stable_part;
    }
    max_modes = std::max(max_modes, sys.Order());
    const double lyap = h2_norm(sys);
    const double quad = h2_quadrature([&](double w) { return eval_transfer(sys, Complex(0.0, w)); });
    worst = std::max(worst, std::abs(lyap - quad) / lyap);
  }
  return {worst <= 1e-2 && max_modes <= 50,
          Fmt("max relative gap %.3e between Lyapunov and quadrature over 10 systems (<= %d modes)", worst,
              max_modes)};
}

Outcome SmallExactness()
{
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_tf = 0.0;
  double worst_res = 0.0;
  for (int n = 2; n <= 6; n++)
  {
    const SecondOrderModel model(generate_network(GraphKind::RandomConnected, n, 60 + n, {}, {0}, {n - 1}),
                                 ParameterSpace::Uniform(n, std::min(n, 2)));
    const ParametricRom rom = exact_rom(model);
    for (const Vector &p : RandomPoints(model.Space(), 20, 70 + n))
    {
      const Complex s(0.5 * u(rng), std::pow(10.0, -3.0 + 6.0 * u(rng)));
      const ComplexMatrix full = eval_transfer(model, s, p);
      const ComplexMatrix red = eval_transfer(reduced_system(rom.reduced, model, p), s);
      worst_tf = std::max(worst_tf, (full - red).norm() / full.norm());
    }
    for (const Vector &p : RandomPoints(model.Space(), 4, 80 + n))
    {
      const ResidueData res = zero_residue(model.C(), model.B(), Matrix(model.Damping().asDiagonal()),
                                           null_vector(model.Space(), p));
      const Matrix oracle = PartialFractionResidue(companion_form(model, p).sys);
      worst_res = std::max(worst_res, (res.phi0 - oracle).norm() / oracle.norm());
    }
  }
  return {worst_tf <= 1e-9 && worst_res <= 1e-10,
          Fmt("n = 2..6, r = n: max transfer deviation %.3e over 100 probes, residue vs partial fractions %.3e",
              worst_tf, worst_res)};
}

Outcome Parser()
{
  const CaseImport imp = parse_matpower_case(read_text_file(std::string(SWINGROM_FIXTURES) + "/case3_path.m"));
  Matrix expected(3, 3);
  expected << 1, -1, 0, -1, 3, -2, 0, -2, 2;
  const Matrix l = Matrix(build_laplacian(imp.network));
  bool merged = false;
  bool skipped_edge = true;
  for (const Edge &e : imp.network.edges)
  {
    merged = merged || (std::min(e.i, e.j) == 0 && std::max(e.i, e.j) == 1 && e.susceptance == 1.0);
    skipped_edge = skipped_edge && !(std::min(e.i, e.j) == 0 && std::max(e.i, e.j) == 2);
  }
  return {l == expected && merged && skipped_edge && imp.network.edges.size() == 2,
          Fmt("laplacian exact: %s, parallel branches merged: %s, status-0 branch skipped: %s",
              l == expected ? "yes" : "no", merged ? "yes" : "no", skipped_edge ? "yes" : "no")};
}

Outcome Determinism()
{
  auto model_text = [] {
    return dump_model(SecondOrderModel(generate_network(GraphKind::RandomConnected, 120, 99),
                                       ParameterSpace::Uniform(120, 2)));
  };
  const std::string m1 = model_text();
  const std::string m2 = model_text();
  const SecondOrderModel model = model_from_json(Json::parse(m1));
  Vector a(2), b(2);
  a << 0.9572, 0.93399;
  b << 1.0304, 0.9522;
  const std::string r1 = dump_rom(build_parametric_rom(model, {a, b}, {8}));
  const std::string r2 = dump_rom(build_parametric_rom(model, {a, b}, {8}));
  const ParametricRom rom = rom_from_json(Json::parse(r1));
  SweepSpec spec;
  spec.samples = 8;
  spec.seed = 5;
  SweepOptions opts;
  opts.h2 = true;
  const std::string c1 = sweep_csv(sweep(model, rom, spec, opts));
  opts.exec = Execution::Serial;
  const std::string c2 = sweep_csv(sweep(model, rom, spec, opts));
  return {m1 == m2 && r1 == r2 && c1 == c2,
          Fmt("model %s, ROM %s, sweep CSV %s (%zu, %zu, %zu bytes)", m1 == m2 ? "identical" : "DIFFERS",
              r1 == r2 ? "identical" : "DIFFERS", c1 == c2 ? "identical" : "DIFFERS", m1.size(), r1.size(),
              c1.size())};
}

}  // namespace

int main()
{
  log::SetWarningSink([](std::string_view w) { std::fprintf(stderr, "warning: %.*s\n", int(w.size()), w.data()); });
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 residue matching", ResidueMatching},
      {"AC2 interpolation", Interpolation},
      {"AC3 structure", Structure},
      {"AC4 two-parameter sweep", Case1Sweep},
      {"AC5 four-parameter sweep", Case2Sweep},
      {"AC6 negative control", NegativeControl},
      {"AC7 norm oracles", NormOracles},
      {"AC8 small-instance exactness", SmallExactness},
      {"AC9 parser", Parser},
      {"AC10 determinism", Determinism},
  };
  int failed = 0;
  for (const auto &[name, run] : criteria)
  {
    Outcome out;
    try
    {
      out = run();
    }
    catch (const std::exception &e)
    {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += out.pass ? 0 : 1;
    std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
