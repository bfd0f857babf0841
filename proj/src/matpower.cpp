// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/matpower.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>

namespace swingrom
{

namespace
{

struct Row
{
  int line = 0;
  std::vector<double> values;
};

struct Table
{
  int line = 0;
  std::vector<Row> rows;
};

const std::set<std::string> kTolerated = {"version", "baseMVA", "gen",      "gencost",
                                          "areas",   "bus_name", "gentype", "genfuel"};

std::string StripComment(const std::string &line)
{
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); i++)
  {
    if (line[i] == '\'')
    {
      quoted = !quoted;
    }
    else if (line[i] == '%' && !quoted)
    {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string Trim(const std::string &s)
{
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
  {
    a++;
  }
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
  {
    b--;
  }
  return s.substr(a, b - a);
}

double ParseNumber(const std::string &token, int line)
{
  const char *begin = token.c_str();
  char *end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
  {
    throw ParseError(line, "malformed matrix entry '" + token + "'");
  }
  return v;
}

class CaseReader
{
public:
  explicit CaseReader(std::string_view text)
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line))
    {
      lines_.push_back(StripComment(line));
    }
  }

  void Read(std::vector<std::string> &warnings)
  {
    std::size_t i = 0;
    while (i < lines_.size())
    {
      const std::string line = Trim(lines_[i]);
      const int lineno = static_cast<int>(i) + 1;
      if (line.rfind("mpc.", 0) != 0)
      {
        i++;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
      {
        throw ParseError(lineno, "expected '=' after field name");
      }
      const std::string name = Trim(line.substr(4, eq - 4));
      const std::string rhs = Trim(line.substr(eq + 1));
      if (name == "bus" || name == "branch")
      {
        auto &slot = name == "bus" ? bus_ : branch_;
        if (slot)
        {
          throw ParseError(lineno, "mpc." + name + " defined twice");
        }
        slot = ReadMatrix(i);
        continue;
      }
      if (!kTolerated.count(name))
      {
        warnings.push_back("line " + std::to_string(lineno) + ": ignoring unknown field mpc." +
                           name);
      }
      i = SkipStatement(i, rhs);
    }
  }

  const std::optional<Table> &Bus() const { return bus_; }
  const std::optional<Table> &Branch() const { return branch_; }

private:
  // Skips a literal that may span lines ([...] or {...}); returns the next line index.
  std::size_t SkipStatement(std::size_t i, const std::string &rhs) const
  {
    char close = 0;
    if (!rhs.empty() && rhs[0] == '[')
    {
      close = ']';
    }
    else if (!rhs.empty() && rhs[0] == '{')
    {
      close = '}';
    }
    if (!close)
    {
      return i + 1;
    }
    for (std::size_t k = i; k < lines_.size(); k++)
    {
      const std::string &text = k == i ? rhs : lines_[k];
      if (text.find(close) != std::string::npos)
      {
        return k + 1;
      }
    }
    throw ParseError(static_cast<int>(i) + 1, std::string("unterminated literal, missing '") +
                                                  close + "'");
  }

  Table ReadMatrix(std::size_t &i)
  {
    Table table;
    table.line = static_cast<int>(i) + 1;
    std::string first = lines_[i].substr(lines_[i].find('=') + 1);
    const auto open = first.find('[');
    if (open == std::string::npos)
    {
      throw ParseError(table.line, "expected a matrix literal '[ ... ]'");
    }
    std::string text = first.substr(open + 1);
    Row current;
    bool closed = false;
    for (std::size_t k = i; k < lines_.size() && !closed; k++)
    {
      const int lineno = static_cast<int>(k) + 1;
      const std::string chunk = k == i ? text : lines_[k];
      std::string token;
      auto flush_token = [&]
      {
        if (!token.empty())
        {
          if (current.values.empty())
          {
            current.line = lineno;
          }
          current.values.push_back(ParseNumber(token, lineno));
          token.clear();
        }
      };
      auto flush_row = [&]
      {
        if (!current.values.empty())
        {
          table.rows.push_back(std::move(current));
          current = Row{};
        }
      };
      for (std::size_t c = 0; c < chunk.size(); c++)
      {
        const char ch = chunk[c];
        if (ch == ']')
        {
          flush_token();
          flush_row();
          closed = true;
          i = k + 1;
          break;
        }
        if (ch == '[' || ch == '{' || ch == '}' || ch == '\'')
        {
          throw ParseError(lineno, std::string("unexpected '") + ch + "' in matrix literal");
        }
        if (ch == ';')
        {
          flush_token();
          flush_row();
        }
        else if (ch == ',' || std::isspace(static_cast<unsigned char>(ch)))
        {
          flush_token();
        }
        else
        {
          token.push_back(ch);
        }
      }
      if (!closed)
      {
        flush_token();
        flush_row();
      }
    }
    if (!closed)
    {
      throw ParseError(table.line, "unterminated matrix literal, missing ']'");
    }
    for (const auto &row : table.rows)
    {
      if (row.values.size() != table.rows.front().values.size())
      {
        throw ParseError(row.line, "matrix row has " + std::to_string(row.values.size()) +
                                       " columns, expected " +
                                       std::to_string(table.rows.front().values.size()));
      }
    }
    return table;
  }

  std::vector<std::string> lines_;
  std::optional<Table> bus_;
  std::optional<Table> branch_;
};

std::string Format(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

CaseImport parse_matpower_case(std::string_view text, const CaseImportOptions &options)
{
  CaseImport result;
  CaseReader reader(text);
  reader.Read(result.warnings);
  if (!reader.Bus())
  {
    throw ParseError(0, "case has no mpc.bus table");
  }
  const Table &bus = *reader.Bus();
  std::map<int, int> index_of;
  for (const auto &row : bus.rows)
  {
    const double id = row.values[0];
    if (id != std::floor(id))
    {
      throw ParseError(row.line, "bus number must be an integer");
    }
    if (!index_of.emplace(static_cast<int>(id), static_cast<int>(result.bus_numbers.size())).second)
    {
      throw ParseError(row.line, "duplicate bus number " + std::to_string(static_cast<int>(id)));
    }
    result.bus_numbers.push_back(static_cast<int>(id));
  }
  const int n = static_cast<int>(result.bus_numbers.size());
  if (n < 2)
  {
    throw InvariantError("case has " + std::to_string(n) +
                         " bus(es); a swing network needs at least 2 connected buses");
  }

  std::map<std::pair<int, int>, std::size_t> edge_slot;
  std::vector<Edge> edges;
  if (reader.Branch())
  {
    for (const auto &row : reader.Branch()->rows)
    {
      if (row.values.size() < 4)
      {
        throw ParseError(row.line, "branch rows need at least 4 columns (fbus tbus r x)");
      }
      const auto from = index_of.find(static_cast<int>(row.values[0]));
      const auto to = index_of.find(static_cast<int>(row.values[1]));
      if (from == index_of.end() || to == index_of.end())
      {
        throw ParseError(row.line, "branch refers to an unknown bus");
      }
      if (row.values.size() >= 11 && row.values[10] == 0.0)
      {
        continue;
      }
      const double x = row.values[3];
      if (!(x > 0.0))
      {
        result.warnings.push_back("line " + std::to_string(row.line) + ": skipping branch " +
                                  std::to_string(from->first) + "-" + std::to_string(to->first) +
                                  " with nonpositive reactance");
        continue;
      }
      if (from->second == to->second)
      {
        result.warnings.push_back("line " + std::to_string(row.line) + ": skipping self-loop at bus " +
                                  std::to_string(from->first));
        continue;
      }
      const int a = std::min(from->second, to->second);
      const int b = std::max(from->second, to->second);
      auto [it, fresh] = edge_slot.emplace(std::make_pair(a, b), edges.size());
      if (fresh)
      {
        edges.push_back({a, b, 1.0 / x});
      }
      else
      {
        edges[it->second].susceptance += 1.0 / x;
      }
    }
  }

  NetworkModel &net = result.network;
  net.n = n;
  net.edges = std::move(edges);
  net.inertia = Vector::Constant(n, options.default_inertia);
  net.damping = Vector::Constant(n, options.default_damping);
  for (const auto &[id, value] : options.inertia_override)
  {
    auto it = index_of.find(id);
    if (it == index_of.end())
    {
      throw InvariantError("inertia override for unknown bus " + std::to_string(id));
    }
    net.inertia[it->second] = value;
  }
  for (const auto &[id, value] : options.damping_override)
  {
    auto it = index_of.find(id);
    if (it == index_of.end())
    {
      throw InvariantError("damping override for unknown bus " + std::to_string(id));
    }
    net.damping[it->second] = value;
  }
  net.input_map = input_selector(n, options.inputs);
  net.output_map = output_selector(n, options.outputs);
  for (const auto &w : result.warnings)
  {
    log::Warn(w);
  }
  validate_network(net);
  return result;
}

std::string write_matpower_case(const NetworkModel &net)
{
  std::ostringstream os;
  os << "function mpc = swingrom_case\n";
  os << "mpc.version = '2';\n";
  os << "mpc.baseMVA = 100;\n\n";
  os << "%% bus data\n%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin\n";
  os << "mpc.bus = [\n";
  for (int i = 0; i < net.n; i++)
  {
    os << "\t" << i + 1 << "\t" << (i == 0 ? 3 : 2) << "\t0\t0\t0\t0\t1\t1\t0\t230\t1\t1.1\t0.9;\n";
  }
  os << "];\n\n";
  os << "%% branch data\n%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax\n";
  os << "mpc.branch = [\n";
  for (const auto &e : net.edges)
  {
    os << "\t" << e.i + 1 << "\t" << e.j + 1 << "\t0\t" << Format(1.0 / e.susceptance)
       << "\t0\t0\t0\t0\t0\t0\t1\t-360\t360;\n";
  }
  os << "];\n";
  return os.str();
}

}  // namespace swingrom
