// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/mor.hpp"

#include <sstream>

namespace swingrom
{

namespace
{

bool NearlyEqual(Complex a, Complex b)
{
  return std::abs(a - b) <= 1.0e-12 * std::max({std::abs(a), std::abs(b), 1.0e-300});
}

int FindPartner(const InterpolationSet &interp, int j)
{
  const Complex target = std::conj(interp.shifts[j]);
  for (int k = 0; k < interp.Size(); k++)
  {
    if (k != j && NearlyEqual(interp.shifts[k], target) &&
        (interp.directions[k] - interp.directions[j].conjugate()).norm() <=
            1.0e-12 * std::max(interp.directions[j].norm(), 1.0e-300))
    {
      return k;
    }
  }
  return -1;
}

}  // namespace

std::string to_string(ColumnTag::Kind kind)
{
  switch (kind)
  {
    case ColumnTag::Kind::Shift:
      return "shift";
    case ColumnTag::Kind::NullVector:
      return "null-vector";
    case ColumnTag::Kind::BlockIndicator:
      return "block-indicator";
    case ColumnTag::Kind::Augmentation:
      return "augmentation";
    case ColumnTag::Kind::Identity:
      return "identity";
  }
  return "shift";
}

ColumnTag::Kind column_kind_from_string(const std::string &name)
{
  for (auto kind : {ColumnTag::Kind::Shift, ColumnTag::Kind::NullVector,
                    ColumnTag::Kind::BlockIndicator, ColumnTag::Kind::Augmentation,
                    ColumnTag::Kind::Identity})
  {
    if (to_string(kind) == name)
    {
      return kind;
    }
  }
  throw InvariantError("unknown column provenance '" + name + "'");
}

void InterpolationSet::Validate(int inputs) const
{
  if (shifts.size() != directions.size())
  {
    throw InvariantError("interpolation set needs one direction per shift");
  }
  for (int j = 0; j < Size(); j++)
  {
    if (shifts[j] == Complex(0.0))
    {
      throw InvariantError("zero interpolation shift; the pole at zero is handled by the kernel "
                           "vector column");
    }
    if (directions[j].size() != inputs)
    {
      std::ostringstream os;
      os << "direction " << j << " has length " << directions[j].size() << ", expected "
         << inputs;
      throw InvariantError(os.str());
    }
    if (shifts[j].imag() != 0.0 && FindPartner(*this, j) < 0)
    {
      std::ostringstream os;
      os << "shift " << shifts[j] << " has no conjugate partner";
      throw InvariantError(os.str());
    }
  }
}

LocalBasis local_basis(const SampleSystem &sys, const InterpolationSet &interp, int sample,
                       bool include_null_vector)
{
  interp.Validate(static_cast<int>(sys.input.cols()));
  const int n = sys.Order();
  ShiftedPencil pencil(sys);
  const ComplexMatrix b = sys.input.cast<Complex>();
  std::vector<Vector> cols;
  LocalBasis out;
  if (include_null_vector)
  {
    if (!sys.null_vector)
    {
      throw InvariantError("sample system has no kernel vector to append");
    }
    cols.push_back(*sys.null_vector);
    out.tags.push_back({ColumnTag::Kind::NullVector, sample, {}, 0, -1});
  }
  for (int j = 0; j < interp.Size(); j++)
  {
    const Complex sigma = interp.shifts[j];
    if (sigma.imag() < 0.0)
    {
      continue;
    }
    const ComplexVector x = pencil.Solve(sigma, b * interp.directions[j]);
    ColumnTag tag{ColumnTag::Kind::Shift, sample, sigma, 0, -1};
    cols.push_back(x.real());
    out.tags.push_back(tag);
    if (sigma.imag() > 0.0 || interp.directions[j].imag().norm() > 0.0)
    {
      tag.part = 1;
      cols.push_back(x.imag());
      out.tags.push_back(tag);
    }
  }
  out.columns.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); k++)
  {
    out.columns.col(static_cast<Eigen::Index>(k)) = cols[k];
  }
  return out;
}

LocalBasis local_basis(const SecondOrderModel &model, const Vector &p,
                       const InterpolationSet &interp, int sample, bool include_null_vector)
{
  return local_basis(sample_system(model, p), interp, sample, include_null_vector);
}

std::vector<int> orthonormalize(const Matrix &columns, double rank_tol, Matrix &q)
{
  const Eigen::Index n = columns.rows();
  q.resize(n, columns.cols());
  std::vector<int> kept;
  Eigen::Index r = 0;
  for (Eigen::Index j = 0; j < columns.cols(); j++)
  {
    const double norm = columns.col(j).norm();
    if (!(norm > 0.0))
    {
      continue;
    }
    Vector v = columns.col(j) / norm;
    for (int pass = 0; pass < 2 && r > 0; pass++)
    {
      v -= q.leftCols(r) * (q.leftCols(r).transpose() * v);
    }
    const double res = v.norm();
    if (res <= rank_tol)
    {
      continue;
    }
    v /= res;
    // Third pass only when cancellation was severe.
    if (res < 1.0e-4 && r > 0)
    {
      v -= q.leftCols(r) * (q.leftCols(r).transpose() * v);
      v.normalize();
    }
    q.col(r++) = v;
    kept.push_back(static_cast<int>(j));
  }
  q.conservativeResize(n, r);
  return kept;
}

ReductionBasis global_basis(const std::vector<LocalBasis> &locals, const LocalBasis &extras,
                            double rank_tol)
{
  std::vector<Vector> cols;
  std::vector<ColumnTag> tags;
  Eigen::Index n = extras.columns.rows();
  for (const auto &l : locals)
  {
    if (l.columns.cols() > 0)
    {
      if (n > 0 && l.columns.rows() != n)
      {
        throw InvariantError("local bases have different row counts");
      }
      n = l.columns.rows();
    }
  }
  auto take = [&](const LocalBasis &l, bool null_columns)
  {
    for (Eigen::Index j = 0; j < l.columns.cols(); j++)
    {
      const bool is_null = l.tags[j].kind == ColumnTag::Kind::NullVector;
      if (is_null == null_columns)
      {
        cols.push_back(l.columns.col(j));
        tags.push_back(l.tags[j]);
      }
    }
  };
  for (Eigen::Index j = 0; j < extras.columns.cols(); j++)
  {
    cols.push_back(extras.columns.col(j));
    tags.push_back(extras.tags[j]);
  }
  for (const auto &l : locals)
  {
    take(l, true);
  }
  for (const auto &l : locals)
  {
    take(l, false);
  }
  if (cols.empty())
  {
    throw InvariantError("global basis needs at least one column");
  }
  Matrix all(n, static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); k++)
  {
    all.col(static_cast<Eigen::Index>(k)) = cols[k];
  }
  ReductionBasis basis;
  const std::vector<int> kept = orthonormalize(all, rank_tol, basis.v);
  for (int k : kept)
  {
    basis.provenance.push_back(tags[k]);
  }
  for (Eigen::Index j = 0; j < extras.columns.cols(); j++)
  {
    const double s = principal_angle_sine(basis.v, extras.columns.col(j));
    if (!(s <= 1.0e-8))
    {
      std::ostringstream os;
      os << "enrichment vector " << j << " is not in the span of the basis (sin angle " << s
         << ")";
      throw InvariantError(os.str());
    }
  }
  return basis;
}

LocalBasis enrich_for_blocks(const ParameterSpace &space)
{
  LocalBasis out;
  out.columns = Matrix::Zero(space.Dim(), space.NumParams());
  int offset = 0;
  for (int k = 0; k < space.NumParams(); k++)
  {
    const int size = space.BlockSizes()[k];
    out.columns.col(k).segment(offset, size).setOnes();
    offset += size;
    out.tags.push_back({ColumnTag::Kind::BlockIndicator, -1, {}, 0, k});
  }
  return out;
}

double principal_angle_sine(const Matrix &v, const Vector &x)
{
  const double norm = x.norm();
  if (!(norm > 0.0))
  {
    return 0.0;
  }
  if (v.cols() == 0)
  {
    return 1.0;
  }
  Vector y = x / norm;
  for (int pass = 0; pass < 2; pass++)
  {
    y -= v * (v.transpose() * y);
  }
  return std::min(y.norm(), 1.0);
}

}  // namespace swingrom
