// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/freqresp.hpp"

#include <Eigen/Eigenvalues>

namespace swingrom
{

namespace
{

using RowMajorComplex = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

HessenbergResponse::HessenbergResponse(const StateSpace &sys)
{
  Eigen::HessenbergDecomposition<Matrix> hess(sys.a);
  h_ = hess.matrixH();
  const Matrix q = hess.matrixQ();
  qt_b_ = q.transpose() * sys.b;
  c_q_ = sys.c * q;
}

ComplexMatrix HessenbergResponse::Evaluate(Complex s) const
{
  const Eigen::Index n = h_.rows();
  const Eigen::Index m = qt_b_.cols();
  RowMajorComplex w = -h_.cast<Complex>();
  w.diagonal().array() += s;
  RowMajorComplex x = qt_b_.cast<Complex>();

  // Gaussian elimination with partial pivoting; only the subdiagonal needs
  // eliminating, so the pivot candidates are rows k and k + 1.
  for (Eigen::Index k = 0; k + 1 < n; k++)
  {
    if (std::abs(w(k + 1, k)) > std::abs(w(k, k)))
    {
      w.row(k).tail(n - k).swap(w.row(k + 1).tail(n - k));
      x.row(k).swap(x.row(k + 1));
    }
    if (w(k, k) == Complex(0.0))
    {
      throw SingularPencilError(s, 0.0);
    }
    const Complex l = w(k + 1, k) / w(k, k);
    if (l != Complex(0.0))
    {
      w.row(k + 1).tail(n - k - 1) -= l * w.row(k).tail(n - k - 1);
      x.row(k + 1) -= l * x.row(k);
    }
  }
  for (Eigen::Index k = n - 1; k >= 0; k--)
  {
    if (w(k, k) == Complex(0.0))
    {
      throw SingularPencilError(s, 0.0);
    }
    for (Eigen::Index j = 0; j < m; j++)
    {
      Complex acc = x(k, j);
      for (Eigen::Index i = k + 1; i < n; i++)
      {
        acc -= w(k, i) * x(i, j);
      }
      x(k, j) = acc / w(k, k);
    }
  }
  return c_q_.cast<Complex>() * x;
}

PencilResponse::PencilResponse(SampleSystem sys) : sys_(std::move(sys)) {}

ComplexMatrix PencilResponse::Evaluate(Complex s) const
{
  ShiftedPencil pencil(sys_, ShiftedPencil::Backend::Sparse);
  return sys_.output.cast<Complex>() * pencil.Solve(s, sys_.input.cast<Complex>());
}

std::unique_ptr<ResponseEvaluator> make_full_response(const SecondOrderModel &model,
                                                      const Vector &p)
{
  return std::make_unique<PencilResponse>(sample_system(model, p));
}

std::unique_ptr<ResponseEvaluator> make_response(const SecondOrderSystem &sys)
{
  return std::make_unique<HessenbergResponse>(companion_form(sys).sys);
}

std::vector<ComplexMatrix> evaluate_grid(const ResponseEvaluator &h, std::span<const double> omegas,
                                         Execution exec)
{
  std::vector<ComplexMatrix> out(omegas.size());
  const int count = static_cast<int>(omegas.size());
  if (exec == Execution::Parallel)
  {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < count; k++)
    {
      out[k] = h.Evaluate(Complex(0.0, omegas[k]));
    }
  }
  else
  {
    for (int k = 0; k < count; k++)
    {
      out[k] = h.Evaluate(Complex(0.0, omegas[k]));
    }
  }
  return out;
}

FrequencyFn as_frequency_fn(const ResponseEvaluator &h)
{
  return [&h](double omega) { return h.Evaluate(Complex(0.0, omega)); };
}

}  // namespace swingrom
