// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_FREQRESP_HPP
#define SWINGROM_FREQRESP_HPP

#include <memory>
#include <span>
#include <vector>
#include "swingrom/sysops.hpp"

namespace swingrom
{

// Thread-safe evaluator of H(s) for one system at one parameter value.
class ResponseEvaluator
{
public:
  virtual ~ResponseEvaluator() = default;
  virtual ComplexMatrix Evaluate(Complex s) const = 0;
  virtual int StateDimension() const = 0;
};

// Frequency response through an orthogonal Hessenberg form A = Q H Q^T,
// computed once; each evaluation is an O(N^2) Hessenberg solve of
// (sI - H) X = Q^T B. Backward stable, unlike eigenvector expansions.
class HessenbergResponse final : public ResponseEvaluator
{
public:
  explicit HessenbergResponse(const StateSpace &sys);

  ComplexMatrix Evaluate(Complex s) const override;
  int StateDimension() const override { return static_cast<int>(h_.rows()); }

private:
  Matrix h_;
  Matrix qt_b_;
  Matrix c_q_;
};

// Sparse LU of K(s) = s^2 M + s D + L(p) per evaluation. Cheaper than the
// Hessenberg form for network models, whose Laplacian has O(n) entries.
class PencilResponse final : public ResponseEvaluator
{
public:
  explicit PencilResponse(SampleSystem sys);

  ComplexMatrix Evaluate(Complex s) const override;
  int StateDimension() const override { return 2 * sys_.Order(); }

private:
  SampleSystem sys_;
};

// Sparse pencil for the full model, Hessenberg form for dense (reduced) systems.
std::unique_ptr<ResponseEvaluator> make_full_response(const SecondOrderModel &model,
                                                      const Vector &p);
std::unique_ptr<ResponseEvaluator> make_response(const SecondOrderSystem &sys);

// H(i w_k) for every w_k. The parallel path writes each point into its own
// slot, so both policies return bitwise-identical results.
std::vector<ComplexMatrix> evaluate_grid(const ResponseEvaluator &h, std::span<const double> omegas,
                                         Execution exec = Execution::Parallel);

FrequencyFn as_frequency_fn(const ResponseEvaluator &h);

}  // namespace swingrom

#endif  // SWINGROM_FREQRESP_HPP
