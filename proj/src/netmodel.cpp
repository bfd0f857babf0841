// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/netmodel.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace swingrom
{

namespace
{

class DisjointSets
{
public:
  explicit DisjointSets(int n) : parent_(n), rank_(n, 0)
  {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int Find(int x)
  {
    while (parent_[x] != x)
    {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void Union(int a, int b)
  {
    a = Find(a);
    b = Find(b);
    if (a == b)
    {
      return;
    }
    if (rank_[a] < rank_[b])
    {
      std::swap(a, b);
    }
    parent_[b] = a;
    if (rank_[a] == rank_[b])
    {
      rank_[a]++;
    }
  }

private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

void CheckRange(const char *name, const std::pair<double, double> &range)
{
  if (!(range.first > 0.0) || !(range.second >= range.first))
  {
    std::ostringstream os;
    os << name << " range [" << range.first << ", " << range.second
       << "] must satisfy 0 < lower <= upper";
    throw InvariantError(os.str());
  }
}

}  // namespace

std::vector<std::vector<int>> connected_components(int n, const std::vector<Edge> &edges)
{
  DisjointSets sets(n);
  for (const auto &e : edges)
  {
    if (e.i >= 0 && e.i < n && e.j >= 0 && e.j < n)
    {
      sets.Union(e.i, e.j);
    }
  }
  std::vector<std::vector<int>> components;
  std::vector<int> slot(n, -1);
  for (int v = 0; v < n; v++)
  {
    const int root = sets.Find(v);
    if (slot[root] < 0)
    {
      slot[root] = static_cast<int>(components.size());
      components.emplace_back();
    }
    components[slot[root]].push_back(v);
  }
  return components;
}

void validate_network(const NetworkModel &net)
{
  if (net.n < 1)
  {
    throw InvariantError("network must have at least one node");
  }
  if (net.inertia.size() != net.n || net.damping.size() != net.n)
  {
    throw InvariantError("inertia and damping must have length n");
  }
  for (int i = 0; i < net.n; i++)
  {
    if (!(net.inertia[i] > 0.0))
    {
      throw InvariantError("inertia[" + std::to_string(i) + "] must be positive");
    }
    if (!(net.damping[i] > 0.0))
    {
      throw InvariantError("damping[" + std::to_string(i) + "] must be positive");
    }
  }
  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < net.edges.size(); k++)
  {
    const auto &e = net.edges[k];
    const std::string tag = "edge " + std::to_string(k) + " (" + std::to_string(e.i) + "," +
                            std::to_string(e.j) + ")";
    if (e.i < 0 || e.i >= net.n || e.j < 0 || e.j >= net.n)
    {
      throw InvariantError(tag + ": node index out of range");
    }
    if (e.i == e.j)
    {
      throw InvariantError(tag + ": self-loop");
    }
    if (!(e.susceptance > 0.0))
    {
      throw InvariantError(tag + ": susceptance must be positive");
    }
    if (!seen.emplace(std::min(e.i, e.j), std::max(e.i, e.j)).second)
    {
      throw InvariantError(tag + ": duplicate undirected edge");
    }
  }
  if (net.input_map.rows() != net.n || net.input_map.cols() < 1)
  {
    throw InvariantError("input_map must be n x m with m >= 1");
  }
  if (net.output_map.cols() != net.n || net.output_map.rows() < 1)
  {
    throw InvariantError("output_map must be q x n with q >= 1");
  }
  auto components = connected_components(net.n, net.edges);
  if (components.size() > 1)
  {
    throw DisconnectedGraphError(std::move(components));
  }
}

Matrix input_selector(int n, const std::vector<int> &nodes)
{
  Matrix b = Matrix::Zero(n, static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); k++)
  {
    if (nodes[k] < 0 || nodes[k] >= n)
    {
      throw InvariantError("input selector index " + std::to_string(nodes[k]) + " out of range");
    }
    b(nodes[k], static_cast<Eigen::Index>(k)) = 1.0;
  }
  return b;
}

Matrix output_selector(int n, const std::vector<int> &nodes)
{
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(nodes.size()), n);
  for (std::size_t k = 0; k < nodes.size(); k++)
  {
    if (nodes[k] < 0 || nodes[k] >= n)
    {
      throw InvariantError("output selector index " + std::to_string(nodes[k]) + " out of range");
    }
    c(static_cast<Eigen::Index>(k), nodes[k]) = 1.0;
  }
  return c;
}

ParameterSpace::ParameterSpace(std::vector<int> block_sizes, Vector lower, Vector upper)
  : block_sizes_(std::move(block_sizes)), lower_(std::move(lower)), upper_(std::move(upper))
{
  const auto nu = static_cast<Eigen::Index>(block_sizes_.size());
  if (nu == 0)
  {
    throw InvariantError("parameter space needs at least one block");
  }
  if (lower_.size() != nu || upper_.size() != nu)
  {
    throw InvariantError("parameter box bounds must have one entry per block");
  }
  for (Eigen::Index k = 0; k < nu; k++)
  {
    if (block_sizes_[k] < 1)
    {
      throw InvariantError("block " + std::to_string(k) + " must have positive size");
    }
    if (!(lower_[k] > 0.0) || !(upper_[k] >= lower_[k]))
    {
      throw InvariantError("parameter box for block " + std::to_string(k) +
                           " must satisfy 0 < lower <= upper");
    }
  }
  dim_ = std::accumulate(block_sizes_.begin(), block_sizes_.end(), 0);
  block_of_.reserve(dim_);
  for (int k = 0; k < static_cast<int>(nu); k++)
  {
    block_of_.insert(block_of_.end(), block_sizes_[k], k);
  }
}

ParameterSpace ParameterSpace::Uniform(int n, int blocks, double alpha)
{
  if (blocks < 1 || blocks > n)
  {
    throw InvariantError("number of parameter blocks must lie in [1, n]");
  }
  if (!(alpha >= 0.0 && alpha < 1.0))
  {
    throw InvariantError("box half-width alpha must lie in [0, 1)");
  }
  std::vector<int> sizes(blocks, n / blocks);
  for (int k = 0; k < n % blocks; k++)
  {
    sizes[blocks - 1 - k]++;
  }
  return ParameterSpace(std::move(sizes), Vector::Constant(blocks, 1.0 - alpha),
                        Vector::Constant(blocks, 1.0 + alpha));
}

Vector ParameterSpace::Expand(const Vector &p) const
{
  if (p.size() != NumParams())
  {
    throw InvariantError("parameter vector has length " + std::to_string(p.size()) +
                         ", expected " + std::to_string(NumParams()));
  }
  for (Eigen::Index k = 0; k < p.size(); k++)
  {
    if (!(p[k] > 0.0))
    {
      throw InvariantError("parameter p_" + std::to_string(k + 1) +
                           " must be positive (P would be singular or flip signs)");
    }
  }
  Vector diag(dim_);
  for (int i = 0; i < dim_; i++)
  {
    diag[i] = p[block_of_[i]];
  }
  return diag;
}

bool ParameterSpace::Contains(const Vector &p) const
{
  if (p.size() != NumParams())
  {
    return false;
  }
  return ((p.array() >= lower_.array()) && (p.array() <= upper_.array())).all();
}

std::vector<Vector> ParameterSpace::Corners() const
{
  const int nu = NumParams();
  std::vector<Vector> corners;
  if (nu > 16)
  {
    // 2^nu corners is not enumerable; keep the two extreme ones.
    return {lower_, upper_};
  }
  for (unsigned mask = 0; mask < (1u << nu); mask++)
  {
    Vector c(nu);
    for (int k = 0; k < nu; k++)
    {
      c[k] = (mask >> k) & 1u ? upper_[k] : lower_[k];
    }
    corners.push_back(std::move(c));
  }
  return corners;
}

bool ParameterSpace::operator==(const ParameterSpace &other) const
{
  return block_sizes_ == other.block_sizes_ && lower_ == other.lower_ && upper_ == other.upper_;
}

SecondOrderModel::SecondOrderModel(NetworkModel net, ParameterSpace space)
  : net_(std::move(net)), space_(std::move(space))
{
  validate_network(net_);
  if (space_.Dim() != net_.n)
  {
    throw InvariantError("parameter blocks sum to " + std::to_string(space_.Dim()) +
                         " but the network has n = " + std::to_string(net_.n));
  }
  laplacian_ = build_laplacian(net_);
}

SparseMatrix build_laplacian(const NetworkModel &net)
{
  auto components = connected_components(net.n, net.edges);
  if (components.size() > 1)
  {
    throw DisconnectedGraphError(std::move(components));
  }
  // Off-diagonals first, then each diagonal entry as the sum of its own row's
  // susceptances in a fixed order, so row sums cancel to rounding.
  std::vector<std::vector<std::pair<int, double>>> rows(net.n);
  for (const auto &e : net.edges)
  {
    rows[e.i].emplace_back(e.j, e.susceptance);
    rows[e.j].emplace_back(e.i, e.susceptance);
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(net.n + 2 * net.edges.size());
  for (int i = 0; i < net.n; i++)
  {
    std::sort(rows[i].begin(), rows[i].end());
    double diag = 0.0;
    for (const auto &[j, b] : rows[i])
    {
      triplets.emplace_back(i, j, -b);
      diag += b;
    }
    triplets.emplace_back(i, i, diag);
  }
  SparseMatrix l(net.n, net.n);
  l.setFromTriplets(triplets.begin(), triplets.end());
  l.makeCompressed();
  return l;
}

SparseMatrix scale_laplacian(const SecondOrderModel &model, const Vector &p)
{
  const Vector diag = model.Space().Expand(p);
  if (!model.Space().Contains(p))
  {
    log::Warn("parameter vector lies outside the declared parameter box");
  }
  SparseMatrix lp = model.Laplacian();
  for (int col = 0; col < lp.outerSize(); col++)
  {
    for (SparseMatrix::InnerIterator it(lp, col); it; ++it)
    {
      // d_i * d_j is commutative, so the result stays bitwise symmetric.
      it.valueRef() = it.value() * (diag[it.row()] * diag[it.col()]);
    }
  }
  return lp;
}

Vector null_vector(const ParameterSpace &space, const Vector &p)
{
  return space.Expand(p).cwiseInverse();
}

Vector symmetric_spectrum(const SparseMatrix &a)
{
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix(a), Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

NetworkModel generate_network(GraphKind kind, int n, std::uint64_t seed,
                              const CoefficientRanges &ranges, const std::vector<int> &inputs,
                              const std::vector<int> &outputs)
{
  if (n < 2)
  {
    throw InvariantError("generated networks need n >= 2");
  }
  CheckRange("inertia", ranges.inertia);
  CheckRange("damping", ranges.damping);
  CheckRange("susceptance", ranges.susceptance);
  if (!(ranges.extra_edge_density >= 0.0))
  {
    throw InvariantError("extra edge density must be nonnegative");
  }

  std::mt19937_64 rng(seed);
  auto uniform = [&rng](const std::pair<double, double> &r)
  {
    if (r.first == r.second)
    {
      return r.first;
    }
    return std::uniform_real_distribution<double>(r.first, r.second)(rng);
  };

  std::vector<std::pair<int, int>> pairs;
  switch (kind)
  {
    case GraphKind::Path:
      for (int i = 0; i + 1 < n; i++)
      {
        pairs.emplace_back(i, i + 1);
      }
      break;
    case GraphKind::Ring:
      for (int i = 0; i + 1 < n; i++)
      {
        pairs.emplace_back(i, i + 1);
      }
      if (n > 2)
      {
        pairs.emplace_back(0, n - 1);
      }
      break;
    case GraphKind::RandomConnected:
    {
      std::uniform_int_distribution<int> node(0, n - 1);
      std::vector<char> visited(n, 0);
      int current = node(rng);
      visited[current] = 1;
      int remaining = n - 1;
      while (remaining > 0)
      {
        const int next = node(rng);
        if (next == current)
        {
          continue;
        }
        if (!visited[next])
        {
          visited[next] = 1;
          remaining--;
          pairs.emplace_back(std::min(current, next), std::max(current, next));
        }
        current = next;
      }
      std::set<std::pair<int, int>> present(pairs.begin(), pairs.end());
      const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
      long long extra = std::llround(ranges.extra_edge_density * n);
      extra = std::min(extra, max_edges - static_cast<long long>(pairs.size()));
      while (extra > 0)
      {
        int a = node(rng);
        int b = node(rng);
        if (a == b)
        {
          continue;
        }
        if (a > b)
        {
          std::swap(a, b);
        }
        if (present.emplace(a, b).second)
        {
          pairs.emplace_back(a, b);
          extra--;
        }
      }
      break;
    }
  }

  NetworkModel net;
  net.n = n;
  net.inertia.resize(n);
  net.damping.resize(n);
  for (int i = 0; i < n; i++)
  {
    net.inertia[i] = uniform(ranges.inertia);
    net.damping[i] = uniform(ranges.damping);
  }
  for (const auto &[a, b] : pairs)
  {
    net.edges.push_back({a, b, uniform(ranges.susceptance)});
  }
  net.input_map = input_selector(n, inputs);
  net.output_map = output_selector(n, outputs);
  validate_network(net);
  return net;
}

}  // namespace swingrom
