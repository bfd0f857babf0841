// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_TESTS_SUPPORT_HPP
#define SWINGROM_TESTS_SUPPORT_HPP

#include <random>
#include <string>
#include <vector>

#include "swingrom/matpower.hpp"
#include "swingrom/validate.hpp"

namespace testing
{

using namespace swingrom;

// Path 0 - 1 - 2 with b_01 = 1, b_12 = 2, unit inertia and damping, SISO at node 0.
inline NetworkModel Path3()
{
  NetworkModel net;
  net.n = 3;
  net.edges = {{0, 1, 1.0}, {1, 2, 2.0}};
  net.inertia = Vector::Ones(3);
  net.damping = Vector::Ones(3);
  net.input_map = input_selector(3, {0});
  net.output_map = output_selector(3, {0});
  return net;
}

inline ParameterSpace Singletons(int n)
{
  return ParameterSpace(std::vector<int>(n, 1), Vector::Constant(n, 0.85), Vector::Constant(n, 1.15));
}

inline Vector RandomInBox(const ParameterSpace &space, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector p(space.NumParams());
  for (int k = 0; k < p.size(); k++)
  {
    p[k] = space.Lower()[k] + u(rng) * (space.Upper()[k] - space.Lower()[k]);
  }
  return p;
}

inline Matrix Dense(const SparseMatrix &a)
{
  return Matrix(a);
}

inline double RelDiff(const ComplexMatrix &a, const ComplexMatrix &b)
{
  return (a - b).norm() / std::max(b.norm(), 1.0e-300);
}

// Random stable A with spectral abscissa <= -margin.
inline StateSpace RandomStable(int n, int m, int q, std::mt19937_64 &rng, double margin = 0.1)
{
  std::normal_distribution<double> g(0.0, 1.0);
  auto fill = [&](int r, int c) {
    Matrix x(r, c);
    for (int i = 0; i < r; i++)
    {
      for (int j = 0; j < c; j++)
      {
        x(i, j) = g(rng);
      }
    }
    return x;
  };
  StateSpace sys;
  sys.a = fill(n, n);
  const double abscissa = sys.a.eigenvalues().real().maxCoeff();
  sys.a -= (abscissa + margin) * Matrix::Identity(n, n);
  sys.b = fill(n, m);
  sys.c = fill(q, n);
  return sys;
}

// Captures warnings for the lifetime of the object.
class WarningCapture
{
public:
  WarningCapture()
  {
    previous_ = log::SetWarningSink([this](std::string_view w) { messages.emplace_back(w); });
  }
  ~WarningCapture() { log::SetWarningSink(previous_); }
  WarningCapture(const WarningCapture &) = delete;
  WarningCapture &operator=(const WarningCapture &) = delete;

  bool Contains(const std::string &needle) const
  {
    for (const auto &m : messages)
    {
      if (m.find(needle) != std::string::npos)
      {
        return true;
      }
    }
    return false;
  }

  std::vector<std::string> messages;

private:
  log::Sink previous_;
};

}  // namespace testing

#endif  // SWINGROM_TESTS_SUPPORT_HPP
