// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_NETMODEL_HPP
#define SWINGROM_NETMODEL_HPP

#include <cstdint>
#include <utility>
#include <vector>
#include "swingrom/common.hpp"

namespace swingrom
{

struct Edge
{
  int i = 0;
  int j = 0;
  double susceptance = 0.0;  // b_ij = 1/x_ij, per unit

  bool operator==(const Edge &) const = default;
};

// Graph and physical coefficients of a linearized swing network. Node indices
// are 0-based. input_map is n x m, output_map is q x n.
struct NetworkModel
{
  int n = 0;
  std::vector<Edge> edges;
  Vector inertia;
  Vector damping;
  Matrix input_map;
  Matrix output_map;
};

// Throws InvariantError (or DisconnectedGraphError) naming the first violation.
void validate_network(const NetworkModel &net);

// Union-find over the edge list; components are sorted by smallest node.
std::vector<std::vector<int>> connected_components(int n, const std::vector<Edge> &edges);

Matrix input_selector(int n, const std::vector<int> &nodes);
Matrix output_selector(int n, const std::vector<int> &nodes);

// Box-constrained block parametrization P = diag(p_1 I_{n_1}, ..., p_nu I_{n_nu}).
// Blocks are contiguous in node order.
class ParameterSpace
{
public:
  ParameterSpace() = default;
  ParameterSpace(std::vector<int> block_sizes, Vector lower, Vector upper);

  // nu contiguous blocks of near-equal size on the box [1-alpha, 1+alpha]^nu.
  static ParameterSpace Uniform(int n, int blocks, double alpha = 0.15);

  int NumParams() const { return static_cast<int>(block_sizes_.size()); }
  int Dim() const { return dim_; }
  const std::vector<int> &BlockSizes() const { return block_sizes_; }
  const Vector &Lower() const { return lower_; }
  const Vector &Upper() const { return upper_; }
  int BlockOf(int node) const { return block_of_[node]; }

  // Diagonal of P (length n). Throws InvariantError for wrong length or p_k <= 0.
  Vector Expand(const Vector &p) const;
  bool Contains(const Vector &p) const;
  std::vector<Vector> Corners() const;

  bool operator==(const ParameterSpace &other) const;

private:
  std::vector<int> block_sizes_;
  std::vector<int> block_of_;
  Vector lower_;
  Vector upper_;
  int dim_ = 0;
};

// Immutable parametric second-order model M x'' + D x' + L(p) x = B u, y = C x.
class SecondOrderModel
{
public:
  SecondOrderModel(NetworkModel net, ParameterSpace space);

  const NetworkModel &Network() const { return net_; }
  const ParameterSpace &Space() const { return space_; }
  const SparseMatrix &Laplacian() const { return laplacian_; }
  const Vector &Inertia() const { return net_.inertia; }
  const Vector &Damping() const { return net_.damping; }
  const Matrix &B() const { return net_.input_map; }
  const Matrix &C() const { return net_.output_map; }
  int Size() const { return net_.n; }
  int Inputs() const { return static_cast<int>(net_.input_map.cols()); }
  int Outputs() const { return static_cast<int>(net_.output_map.rows()); }

private:
  NetworkModel net_;
  ParameterSpace space_;
  SparseMatrix laplacian_;
};

// L with L_ij = -b_ij on edges and row sums zero. Built symmetrically, so
// L == L^T exactly.
SparseMatrix build_laplacian(const NetworkModel &net);

// L(p) = P L P. Warns when p leaves the box; throws for p_k <= 0.
SparseMatrix scale_laplacian(const SecondOrderModel &model, const Vector &p);

// Closed-form kernel vector of L(p): entries 1/p_{block(i)}, not normalized.
Vector null_vector(const ParameterSpace &space, const Vector &p);

// Ascending eigenvalues of a symmetric sparse matrix (dense solve).
Vector symmetric_spectrum(const SparseMatrix &a);

enum class GraphKind
{
  Path,
  Ring,
  RandomConnected
};

struct CoefficientRanges
{
  std::pair<double, double> inertia{0.5, 2.0};
  std::pair<double, double> damping{0.5, 1.5};
  std::pair<double, double> susceptance{0.5, 2.0};
  // Extra edges beyond the spanning tree, as a fraction of n.
  double extra_edge_density = 0.5;
};

// Deterministic in (kind, n, seed, ranges). Random graphs are a uniform spanning
// tree (Aldous-Broder walk on K_n) plus round(density * n) extra distinct edges.
NetworkModel generate_network(GraphKind kind, int n, std::uint64_t seed,
                              const CoefficientRanges &ranges = {},
                              const std::vector<int> &inputs = {0},
                              const std::vector<int> &outputs = {0});

}  // namespace swingrom

#endif  // SWINGROM_NETMODEL_HPP
