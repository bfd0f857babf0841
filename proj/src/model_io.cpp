// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace swingrom
{

namespace
{

constexpr double kDefaultAlpha = 0.15;

const Json &Field(const Json &doc, const std::string &path, const char *key)
{
  if (!doc.is_object())
  {
    throw SchemaError(path.empty() ? "/" : path, "expected an object");
  }
  auto it = doc.find(key);
  if (it == doc.end())
  {
    throw SchemaError(path + "/" + key, "required field is missing");
  }
  return *it;
}

double Number(const Json &v, const std::string &path)
{
  if (!v.is_number())
  {
    throw SchemaError(path, "expected a number");
  }
  return v.get<double>();
}

int Integer(const Json &v, const std::string &path)
{
  if (!v.is_number_integer())
  {
    throw SchemaError(path, "expected an integer");
  }
  return v.get<int>();
}

Vector VectorField(const Json &v, const std::string &path, Eigen::Index expected)
{
  if (!v.is_array())
  {
    throw SchemaError(path, "expected an array");
  }
  if (expected >= 0 && static_cast<Eigen::Index>(v.size()) != expected)
  {
    throw SchemaError(path, "expected " + std::to_string(expected) + " entries, found " +
                                std::to_string(v.size()));
  }
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); k++)
  {
    out[static_cast<Eigen::Index>(k)] = Number(v[k], path + "/" + std::to_string(k));
  }
  return out;
}

std::vector<int> IndexList(const Json &v, const std::string &path, int n)
{
  if (!v.is_array() || v.empty())
  {
    throw SchemaError(path, "expected a nonempty array of node indices");
  }
  std::vector<int> out;
  for (std::size_t k = 0; k < v.size(); k++)
  {
    const std::string p = path + "/" + std::to_string(k);
    const int idx = Integer(v[k], p);
    if (idx < 0 || idx >= n)
    {
      throw SchemaError(p, "node index " + std::to_string(idx) + " out of range [0, n)");
    }
    out.push_back(idx);
  }
  return out;
}

// Returns the selected node list when m is a 0/1 selector of the given orientation.
std::optional<std::vector<int>> AsSelector(const Matrix &m, bool columns)
{
  const Eigen::Index count = columns ? m.cols() : m.rows();
  std::vector<int> nodes;
  for (Eigen::Index k = 0; k < count; k++)
  {
    const Vector v = columns ? Vector(m.col(k)) : Vector(m.row(k).transpose());
    int hit = -1;
    for (Eigen::Index i = 0; i < v.size(); i++)
    {
      if (v[i] == 1.0 && hit < 0)
      {
        hit = static_cast<int>(i);
      }
      else if (v[i] != 0.0)
      {
        return std::nullopt;
      }
    }
    if (hit < 0)
    {
      return std::nullopt;
    }
    nodes.push_back(hit);
  }
  return nodes;
}

}  // namespace

Json matrix_to_json(const Matrix &m)
{
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); i++)
  {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); j++)
    {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json &doc, const std::string &path)
{
  if (!doc.is_array() || doc.empty())
  {
    throw SchemaError(path, "expected a nonempty array of rows");
  }
  const std::size_t cols = doc[0].is_array() ? doc[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(doc.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < doc.size(); i++)
  {
    const std::string rp = path + "/" + std::to_string(i);
    if (!doc[i].is_array() || doc[i].size() != cols)
    {
      throw SchemaError(rp, "rows must be arrays of equal length " + std::to_string(cols));
    }
    for (std::size_t j = 0; j < cols; j++)
    {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          Number(doc[i][j], rp + "/" + std::to_string(j));
    }
  }
  return m;
}

Json model_to_json(const SecondOrderModel &model)
{
  const auto &net = model.Network();
  Json doc;
  doc["n"] = net.n;
  Json edges = Json::array();
  for (const auto &e : net.edges)
  {
    edges.push_back(Json::array({e.i, e.j, e.susceptance}));
  }
  doc["edges"] = std::move(edges);
  doc["inertia"] = std::vector<double>(net.inertia.data(), net.inertia.data() + net.n);
  doc["damping"] = std::vector<double>(net.damping.data(), net.damping.data() + net.n);
  if (auto sel = AsSelector(net.input_map, true))
  {
    doc["input_map"] = {{"selector", *sel}};
  }
  else
  {
    doc["input_map"] = matrix_to_json(net.input_map);
  }
  if (auto sel = AsSelector(net.output_map, false))
  {
    doc["output_map"] = {{"selector", *sel}};
  }
  else
  {
    doc["output_map"] = matrix_to_json(net.output_map);
  }
  const auto &space = model.Space();
  doc["param_blocks"] = space.BlockSizes();
  doc["param_box"] = {
      {"lower", std::vector<double>(space.Lower().data(), space.Lower().data() + space.NumParams())},
      {"upper", std::vector<double>(space.Upper().data(), space.Upper().data() + space.NumParams())}};
  return doc;
}

SecondOrderModel model_from_json(const Json &doc)
{
  NetworkModel net;
  net.n = Integer(Field(doc, "", "n"), "/n");
  if (net.n < 1)
  {
    throw SchemaError("/n", "must be positive");
  }
  const Json &edges = Field(doc, "", "edges");
  if (!edges.is_array())
  {
    throw SchemaError("/edges", "expected an array of [i, j, b] triples");
  }
  for (std::size_t k = 0; k < edges.size(); k++)
  {
    const std::string p = "/edges/" + std::to_string(k);
    if (!edges[k].is_array() || edges[k].size() != 3)
    {
      throw SchemaError(p, "expected [i, j, b]");
    }
    Edge e{Integer(edges[k][0], p + "/0"), Integer(edges[k][1], p + "/1"),
           Number(edges[k][2], p + "/2")};
    if (e.i < 0 || e.i >= net.n || e.j < 0 || e.j >= net.n)
    {
      throw SchemaError(p, "node index out of range [0, n)");
    }
    if (!(e.susceptance > 0.0))
    {
      std::ostringstream os;
      os << p << ": edge (" << e.i << "," << e.j << ") has susceptance " << e.susceptance
         << "; susceptances must be positive";
      throw InvariantError(os.str());
    }
    net.edges.push_back(e);
  }
  net.inertia = VectorField(Field(doc, "", "inertia"), "/inertia", net.n);
  net.damping = VectorField(Field(doc, "", "damping"), "/damping", net.n);

  const Json &in = Field(doc, "", "input_map");
  if (in.is_object())
  {
    net.input_map = input_selector(net.n, IndexList(Field(in, "/input_map", "selector"),
                                                    "/input_map/selector", net.n));
  }
  else
  {
    net.input_map = matrix_from_json(in, "/input_map");
    if (net.input_map.rows() != net.n)
    {
      throw SchemaError("/input_map", "dense input_map must have n rows");
    }
  }
  const Json &out = Field(doc, "", "output_map");
  if (out.is_object())
  {
    net.output_map = output_selector(net.n, IndexList(Field(out, "/output_map", "selector"),
                                                      "/output_map/selector", net.n));
  }
  else
  {
    net.output_map = matrix_from_json(out, "/output_map");
    if (net.output_map.cols() != net.n)
    {
      throw SchemaError("/output_map", "dense output_map must have n columns");
    }
  }

  std::vector<int> blocks{net.n};
  if (auto it = doc.find("param_blocks"); it != doc.end())
  {
    if (!it->is_array() || it->empty())
    {
      throw SchemaError("/param_blocks", "expected a nonempty array of block sizes");
    }
    blocks.clear();
    long long total = 0;
    for (std::size_t k = 0; k < it->size(); k++)
    {
      const int size = Integer((*it)[k], "/param_blocks/" + std::to_string(k));
      if (size < 1)
      {
        throw SchemaError("/param_blocks/" + std::to_string(k), "block sizes must be positive");
      }
      blocks.push_back(size);
      total += size;
    }
    if (total != net.n)
    {
      throw SchemaError("/param_blocks", "block sizes sum to " + std::to_string(total) +
                                             " but n = " + std::to_string(net.n));
    }
  }
  const auto nu = static_cast<Eigen::Index>(blocks.size());
  Vector lower = Vector::Constant(nu, 1.0 - kDefaultAlpha);
  Vector upper = Vector::Constant(nu, 1.0 + kDefaultAlpha);
  if (auto it = doc.find("param_box"); it != doc.end())
  {
    lower = VectorField(Field(*it, "/param_box", "lower"), "/param_box/lower", nu);
    upper = VectorField(Field(*it, "/param_box", "upper"), "/param_box/upper", nu);
    for (Eigen::Index k = 0; k < nu; k++)
    {
      if (!(lower[k] > 0.0) || !(upper[k] >= lower[k]))
      {
        throw SchemaError("/param_box", "bounds must satisfy 0 < lower <= upper (block " +
                                            std::to_string(k) + ")");
      }
    }
  }
  return SecondOrderModel(std::move(net),
                          ParameterSpace(std::move(blocks), std::move(lower), std::move(upper)));
}

std::string dump_model(const SecondOrderModel &model)
{
  return model_to_json(model).dump(1) + "\n";
}

std::string read_text_file(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw Error("cannot write " + path.string());
  }
  out << text;
  if (!out)
  {
    throw Error("write failed for " + path.string());
  }
}

void save_model(const SecondOrderModel &model, const std::filesystem::path &path)
{
  write_text_file(path, dump_model(model));
}

SecondOrderModel load_model(const std::filesystem::path &path)
{
  Json doc;
  try
  {
    doc = Json::parse(read_text_file(path));
  }
  catch (const Json::parse_error &e)
  {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

std::uint64_t model_hash(const SecondOrderModel &model)
{
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : dump_model(model))
  {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_string(std::uint64_t hash)
{
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace swingrom
