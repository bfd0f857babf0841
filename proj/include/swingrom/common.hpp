// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_COMMON_HPP
#define SWINGROM_COMMON_HPP

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>
#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace swingrom
{

inline constexpr std::string_view kVersion = "0.3.1";

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Parallel kernels take an explicit policy; the serial path is the reference
// implementation the OpenMP path is tested against.
enum class Execution
{
  Serial,
  Parallel
};

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Violated structural or physical invariant of a model (negative coefficient,
// self-loop, block sizes that do not add up, ...).
class InvariantError : public Error
{
public:
  using Error::Error;
};

class DisconnectedGraphError : public InvariantError
{
public:
  DisconnectedGraphError(std::vector<std::vector<int>> components);
  const std::vector<std::vector<int>> &Components() const { return components_; }

private:
  std::vector<std::vector<int>> components_;
};

// JSON document does not follow the model/ROM schema. The message carries the
// JSON pointer of the offending element.
class SchemaError : public Error
{
public:
  SchemaError(const std::string &path, const std::string &what);
  const std::string &Path() const { return path_; }

private:
  std::string path_;
};

class ParseError : public Error
{
public:
  ParseError(int line, const std::string &what);
  int Line() const { return line_; }

private:
  int line_;
};

// s^2 M + s D + L(p) is singular to working precision at the requested s.
class SingularPencilError : public Error
{
public:
  SingularPencilError(Complex s, double rcond);
  Complex Shift() const { return s_; }
  double Rcond() const { return rcond_; }

private:
  Complex s_;
  double rcond_;
};

// Zero-pole residues of the full and reduced model differ, so the error system
// carries a 1/s term and neither its H2 nor its H-infinity norm is finite.
class ResidueMismatchError : public Error
{
public:
  using Error::Error;
};

class UnstableSystemError : public Error
{
public:
  using Error::Error;
};

namespace log
{

using Sink = std::function<void(std::string_view)>;

// Replaces the warning sink (stderr by default) and returns the previous one.
Sink SetWarningSink(Sink sink);
void Warn(std::string_view message);

}  // namespace log

}  // namespace swingrom

#endif  // SWINGROM_COMMON_HPP
