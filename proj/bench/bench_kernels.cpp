// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to the
// number of cores to see the speedup.

#include <benchmark/benchmark.h>

#include "swingrom/validate.hpp"

namespace
{

using namespace swingrom;

const SecondOrderModel &Model()
{
  static const SecondOrderModel model(generate_network(GraphKind::RandomConnected, 200, 7),
                                      ParameterSpace::Uniform(200, 2));
  return model;
}

const ParametricRom &Rom()
{
  static const ParametricRom rom = [] {
    Vector a(2), b(2);
    a << 0.9572, 0.93399;
    b << 1.0304, 0.9522;
    return build_parametric_rom(Model(), {a, b}, {10});
  }();
  return rom;
}

Execution Policy(const benchmark::State &state)
{
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_FullResponseGrid(benchmark::State &state)
{
  const Vector p = Vector::Ones(2);
  const auto h = make_full_response(Model(), p);
  FrequencyGrid grid;
  grid.points = 100;
  const auto omegas = grid.Omegas();
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(evaluate_grid(*h, omegas, Policy(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}
BENCHMARK(BM_FullResponseGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ReducedResponseGrid(benchmark::State &state)
{
  const Vector p = Vector::Ones(2);
  const auto h = make_response(reduced_system(Rom().reduced, Model(), p));
  FrequencyGrid grid;
  const auto omegas = grid.Omegas();
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(evaluate_grid(*h, omegas, Policy(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}
BENCHMARK(BM_ReducedResponseGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State &state)
{
  SweepSpec spec;
  spec.counts = {2};
  SweepOptions opts;
  opts.grid.points = 100;
  opts.exec = Policy(state);
  opts.certify_corners = false;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(sweep(Model(), Rom(), spec, opts));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
