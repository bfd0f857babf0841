// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace testing;

namespace
{

SecondOrderModel Network(int n, int nu, std::uint64_t seed, std::vector<int> in = {0},
                         std::vector<int> out = {0})
{
  return SecondOrderModel(generate_network(GraphKind::RandomConnected, n, seed, {}, in, out),
                          ParameterSpace::Uniform(n, nu));
}

Matrix RandomOrthonormal(int n, int r, std::mt19937_64 &rng)
{
  std::normal_distribution<double> g;
  Matrix x(n, r);
  for (int i = 0; i < n; i++)
  {
    for (int j = 0; j < r; j++)
    {
      x(i, j) = g(rng);
    }
  }
  return Eigen::HouseholderQR<Matrix>(x).householderQ() * Matrix::Identity(n, r);
}

ReductionBasis Plain(const Matrix &v)
{
  return {v, std::vector<ColumnTag>(v.cols())};
}

}  // namespace

TEST_SUITE("mor")
{
  TEST_CASE("interpolation set validation")
  {
    InterpolationSet ok;
    ok.shifts = {Complex(0.0, 1.0), Complex(0.0, -1.0), Complex(2.0, 0.0)};
    ok.directions = {ComplexVector::Ones(1), ComplexVector::Ones(1), ComplexVector::Ones(1)};
    CHECK_NOTHROW(ok.Validate(1));
    CHECK_THROWS_AS(ok.Validate(2), InvariantError);

    InterpolationSet unpaired = ok;
    unpaired.shifts[1] = Complex(0.0, -2.0);
    CHECK_THROWS_AS(unpaired.Validate(1), InvariantError);

    InterpolationSet zero = ok;
    zero.shifts[2] = 0.0;
    CHECK_THROWS_AS(zero.Validate(1), InvariantError);
  }

  TEST_CASE("local basis spans the shifted solves")
  {
    const SecondOrderModel model = Network(30, 2, 1, {0, 7});
    Vector p(2);
    p << 0.95, 1.05;
    const SampleSystem sys = sample_system(model, p);
    InterpolationSet interp;
    interp.shifts = {Complex(0.1, 0.8), Complex(0.1, -0.8), Complex(0.5, 0.0)};
    ComplexVector b(2);
    b << Complex(1.0, 0.5), Complex(-0.3, 0.0);
    ComplexVector c(2);
    c << 0.6, 0.8;
    interp.directions = {b, b.conjugate(), c};
    const LocalBasis local = local_basis(sys, interp, 3, true);
    REQUIRE(local.columns.cols() == 4);
    CHECK(local.tags[0].kind == ColumnTag::Kind::NullVector);
    CHECK(local.tags[1].kind == ColumnTag::Kind::Shift);
    CHECK(local.tags[1].sample == 3);
    CHECK(principal_angle_sine(Eigen::HouseholderQR<Matrix>(local.columns).householderQ() *
                                   Matrix::Identity(30, 4),
                               null_vector(model.Space(), p)) <= 1e-12);
    Matrix q;
    orthonormalize(local.columns, 1e-10, q);
    for (int j = 0; j < 3; j++)
    {
      const Complex s = interp.shifts[j];
      const Matrix k_re = Dense(sys.stiffness);
      ComplexMatrix k = (s * s) * Matrix(sys.mass.asDiagonal()).cast<Complex>() +
                        s * Matrix(sys.damping.asDiagonal()).cast<Complex>() + k_re.cast<Complex>();
      const ComplexVector x = k.partialPivLu().solve(sys.input.cast<Complex>() * interp.directions[j]);
      CHECK(principal_angle_sine(q, x.real()) <= 1e-10);
      CHECK(principal_angle_sine(q, x.imag()) <= 1e-10);
    }
  }

  TEST_CASE("orthonormalize drops dependent columns")
  {
    std::mt19937_64 rng(2);
    const Matrix base = RandomOrthonormal(10, 3, rng) * 4.0;
    Matrix cols(10, 5);
    cols << base.col(0), base.col(1), base.col(0) - 2.0 * base.col(1), base.col(2), 1e-14 * base.col(0);
    Matrix q;
    const auto kept = orthonormalize(cols, 1e-10, q);
    CHECK(kept == std::vector<int>{0, 1, 3});
    CHECK((q.transpose() * q - Matrix::Identity(3, 3)).norm() <= 1e-14);
  }

  TEST_CASE("global basis merges overlapping local bases")
  {
    const Matrix e = Matrix::Identity(8, 8);
    LocalBasis a;
    a.columns.resize(8, 3);
    a.columns << e.col(0), e.col(1), e.col(2);
    a.tags.assign(3, {ColumnTag::Kind::Shift, 0});
    LocalBasis b;
    b.columns.resize(8, 3);
    b.columns << e.col(2), e.col(1) + e.col(3), e.col(4);
    b.tags.assign(3, {ColumnTag::Kind::Shift, 1});
    const ReductionBasis g = global_basis({a, b});
    CHECK(g.Rank() == 5);
    CHECK((g.v.transpose() * g.v - Matrix::Identity(5, 5)).norm() <= 1e-14);
    CHECK(g.provenance[0].sample == 0);
    CHECK(g.provenance[4].sample == 1);
    CHECK_THROWS_AS(global_basis({}), Error);
  }

  TEST_CASE("global basis puts enrichment first")
  {
    const SecondOrderModel model = Network(20, 3, 4);
    const LocalBasis extras = enrich_for_blocks(model.Space());
    REQUIRE(extras.columns.cols() == 3);
    std::mt19937_64 rng(6);
    LocalBasis local;
    local.columns = RandomOrthonormal(20, 6, rng);
    local.tags.assign(6, {ColumnTag::Kind::Shift, 0});
    const ReductionBasis g = global_basis({local}, extras);
    CHECK(g.Rank() == 9);
    for (int k = 0; k < 3; k++)
    {
      CHECK(g.provenance[k].kind == ColumnTag::Kind::BlockIndicator);
      CHECK(g.provenance[k].block == k);
    }
    std::mt19937_64 prng(1);
    for (int t = 0; t < 10; t++)
    {
      CHECK(principal_angle_sine(g.v, null_vector(model.Space(), RandomInBox(model.Space(), prng))) <= 1e-14);
    }
  }

  TEST_CASE("principal angle")
  {
    Matrix v = Matrix::Zero(3, 1);
    v(0, 0) = 1.0;
    Vector x(3);
    x << 1.0, 1.0, 0.0;
    CHECK(principal_angle_sine(v, x) == doctest::Approx(std::sqrt(0.5)));
    CHECK(principal_angle_sine(v, Vector::Unit(3, 0)) == 0.0);
    CHECK(principal_angle_sine(v, Vector::Unit(3, 2)) == doctest::Approx(1.0));
  }

  TEST_CASE("shift distance")
  {
    const std::vector<Complex> a = {Complex(1, 2), Complex(1, -2), 3.0};
    const std::vector<Complex> b = {3.0, Complex(1, -2), Complex(1, 2)};
    CHECK(shift_distance(a, b) == 0.0);
    std::vector<Complex> c = a;
    c[2] = 3.3;
    CHECK(shift_distance(a, c) > 0.0);
    CHECK(shift_distance(a, c) == doctest::Approx(shift_distance(c, a)));
  }

  TEST_CASE("projection with the identity is exact")
  {
    const SecondOrderModel model = Network(6, 2, 3);
    const ReducedModel reduced = reduce(model, Plain(Matrix::Identity(6, 6)));
    CHECK(reduced.Mass() == Matrix(model.Inertia().asDiagonal()));
    CHECK(reduced.Damping() == Matrix(model.Damping().asDiagonal()));
    CHECK(reduced.B() == model.B());
    Vector p(2);
    p << 0.9, 1.1;
    const Matrix lp = Dense(scale_laplacian(model, p));
    CHECK((assemble_Lr(reduced, model, p) - lp).norm() <= 1e-14 * lp.norm());
  }

  TEST_CASE("galerkin projection preserves structure")
  {
    std::mt19937_64 rng(9);
    const SecondOrderModel model = Network(10, 2, 5);
    const ReducedModel reduced = reduce(model, Plain(RandomOrthonormal(10, 4, rng)));
    CHECK((reduced.Mass() - reduced.Mass().transpose()).norm() <= 1e-13);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(reduced.Mass()).eigenvalues().minCoeff() > 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(reduced.Damping()).eigenvalues().minCoeff() > 0.0);
    const Matrix lr = assemble_Lr(reduced, model, Vector::Ones(2));
    const Matrix v = reduced.V();
    CHECK((lr - v.transpose() * Dense(model.Laplacian()) * v).norm() <= 1e-13 * lr.norm());
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(lr).eigenvalues().minCoeff() >= -1e-13 * lr.norm());
    // Generic basis without the kernel vector: L_r is definite.
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(lr).eigenvalues().minCoeff() > 1e-8);

    Matrix bad = reduced.V();
    bad.col(0) *= 1.1;
    CHECK_THROWS_AS(reduce(model, Plain(bad)), InvariantError);
  }

  TEST_CASE("reduced model interpolates at its shifts")
  {
    // Interpolation holds at the shifts that built the returned basis whether
    // or not the iteration converged; the MIMO run may stop at the cap.
    for (const bool mimo : {false, true})
    {
      CAPTURE(mimo);
      const SecondOrderModel model = mimo ? Network(80, 2, 12, {0, 30}, {5, 11}) : Network(80, 2, 12, {0}, {5});
      Vector p(2);
      p << 1.04, 0.91;
      const IrkaResult result = sor_irka(model, p, 8);
      if (!mimo)
      {
        CHECK(result.diagnostics.converged);
      }
      CHECK(result.diagnostics.null_vector_column);
      const int size = result.interpolation.Size();
      CHECK((size == 7 || size == 8));
      CHECK(result.basis.columns.cols() == size + 1);
      CHECK_NOTHROW(result.interpolation.Validate(model.Inputs()));
      CHECK(principal_angle_sine(result.basis.columns, null_vector(model.Space(), p)) <= 1e-12);
      const Matrix &v = result.basis.columns;
      CHECK((v.transpose() * v - Matrix::Identity(size + 1, size + 1)).norm() <= 1e-12);

      for (int j = 0; j < size; j++)
      {
        const Complex s = result.interpolation.shifts[j];
        const ComplexVector b = result.interpolation.directions[j];
        CHECK(b.norm() == doctest::Approx(1.0));
        const ComplexVector full = eval_transfer(model, s, p) * b;
        const ComplexVector red = eval_transfer(result.reduced, s) * b;
        CHECK((full - red).norm() <= 1e-8 * full.norm());
      }
    }
  }

  TEST_CASE("converged shifts mirror the retained reduced poles")
  {
    const SecondOrderModel model = Network(40, 1, 21);
    const IrkaResult result = sor_irka(model, Vector::Ones(1), 6);
    REQUIRE(result.diagnostics.converged);
    for (Complex s : result.interpolation.shifts)
    {
      double best = std::numeric_limits<double>::infinity();
      for (Complex lambda : result.reduced_poles)
      {
        best = std::min(best, std::abs(s + lambda));
      }
      CHECK(best <= 1e-4 * std::abs(s));
      CHECK(s.real() > 0.0);
    }
  }

  TEST_CASE("sor-irka is deterministic and reports diagnostics")
  {
    const SecondOrderModel model = Network(50, 2, 2);
    Vector p(2);
    p << 0.9572, 0.93399;
    const IrkaResult a = sor_irka(model, p, 10);
    const IrkaResult b = sor_irka(model, p, 10);
    CHECK(a.basis.columns == b.basis.columns);
    CHECK(a.interpolation.shifts == b.interpolation.shifts);
    CHECK(a.diagnostics.iterations >= 1);
    CHECK(a.diagnostics.movement.size() == static_cast<size_t>(a.diagnostics.iterations));
    IrkaOptions one;
    one.max_iter = 1;
    const IrkaResult c = sor_irka(model, p, 10, one);
    CHECK(c.diagnostics.iterations == 1);
    CHECK_THROWS_AS(sor_irka(model, p, 0), Error);
  }

  TEST_CASE("initial interpolation covers the modal band")
  {
    const SecondOrderModel model = Network(30, 1, 8, {0, 1});
    const SampleSystem sys = sample_system(model, Vector::Ones(1));
    const InterpolationSet even = initial_interpolation(sys, 6);
    CHECK(even.Size() == 6);
    CHECK_NOTHROW(even.Validate(2));
    for (Complex s : even.shifts)
    {
      CHECK(s.real() == 0.0);
    }
    const InterpolationSet odd = initial_interpolation(sys, 5);
    CHECK(odd.Size() == 5);
    int real_count = 0;
    for (Complex s : odd.shifts)
    {
      real_count += s.imag() == 0.0 ? 1 : 0;
    }
    CHECK(real_count == 1);
  }

  TEST_CASE("augmentation for a fully parametrized model")
  {
    const int n = 12;
    const SecondOrderModel model(generate_network(GraphKind::RandomConnected, n, 3), Singletons(n));
    std::mt19937_64 rng(4);
    const Vector p0 = RandomInBox(model.Space(), rng);
    const IrkaResult local = sor_irka(model, p0, 4);
    const ReducedModel reduced = reduce(model, global_basis({local.basis}));
    const Vector p1 = RandomInBox(model.Space(), rng);

    const ReducedResidue before = reduced_zero_residue(reduced, model, p1);
    CHECK_FALSE(before.kernel_in_span);
    CHECK(residue_deviation(before.full.phi0, before.phi0r) > 1e-6);

    const ReducedModel augmented = augment_for_parameter(reduced, model, p1);
    CHECK(augmented.Order() == reduced.Order() + 1);
    CHECK(augmented.Basis().provenance.back().kind == ColumnTag::Kind::Augmentation);
    const ReducedModel fresh = reduce(model, augmented.Basis());
    CHECK((fresh.Mass() - augmented.Mass()).norm() <= 1e-13 * fresh.Mass().norm());
    CHECK((fresh.Damping() - augmented.Damping()).norm() <= 1e-13 * fresh.Damping().norm());
    CHECK((fresh.B() - augmented.B()).norm() <= 1e-13);
    CHECK((fresh.C() - augmented.C()).norm() <= 1e-13);

    const ReducedResidue after = reduced_zero_residue(augmented, model, p1);
    CHECK(after.kernel_in_span);
    CHECK(residue_deviation(after.full.phi0, after.phi0r) <= 1e-10);

    const ReducedModel twice = augment_for_parameter(augmented, model, p1);
    CHECK(twice.Order() == augmented.Order());
    CHECK(twice.V() == augmented.V());
  }

  TEST_CASE("block enrichment never needs augmentation")
  {
    const SecondOrderModel model = Network(30, 3, 7);
    std::mt19937_64 rng(8);
    const IrkaResult local = sor_irka(model, Vector::Ones(3), 6);
    const ReducedModel reduced = reduce(model, global_basis({local.basis}, enrich_for_blocks(model.Space())));
    for (int t = 0; t < 20; t++)
    {
      const Vector p = RandomInBox(model.Space(), rng);
      CHECK(augment_for_parameter(reduced, model, p).Order() == reduced.Order());
      const ReducedResidue res = reduced_zero_residue(reduced, model, p);
      CHECK(res.kernel_in_span);
      CHECK(res.has_zero_pole);
      CHECK(residue_deviation(res.full.phi0, res.phi0r) <= 1e-10);
      const Matrix lr = assemble_Lr(reduced, model, p);
      CHECK((lr * res.kernel_r).norm() <= 1e-10 * lr.norm() * res.kernel_r.norm());
    }
  }
}
