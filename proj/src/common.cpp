// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/common.hpp"

#include <iostream>
#include <mutex>
#include <sstream>

namespace swingrom
{

namespace
{

std::string DescribeComponents(const std::vector<std::vector<int>> &components)
{
  std::ostringstream os;
  os << "graph is disconnected (" << components.size() << " components:";
  for (const auto &c : components)
  {
    os << " {";
    const std::size_t shown = std::min<std::size_t>(c.size(), 8);
    for (std::size_t i = 0; i < shown; i++)
    {
      os << (i ? "," : "") << c[i];
    }
    if (c.size() > shown)
    {
      os << ",... " << c.size() << " nodes";
    }
    os << "}";
  }
  os << "); the Laplacian zero eigenvalue would not be simple";
  return os.str();
}

std::mutex sink_mutex;
log::Sink &SinkRef()
{
  static log::Sink sink = [](std::string_view msg)
  { std::cerr << "warning: " << msg << "\n"; };
  return sink;
}

}  // namespace

DisconnectedGraphError::DisconnectedGraphError(std::vector<std::vector<int>> components)
  : InvariantError(DescribeComponents(components)), components_(std::move(components))
{
}

SchemaError::SchemaError(const std::string &path, const std::string &what)
  : Error(path + ": " + what), path_(path)
{
}

ParseError::ParseError(int line, const std::string &what)
  : Error("line " + std::to_string(line) + ": " + what), line_(line)
{
}

SingularPencilError::SingularPencilError(Complex s, double rcond)
  : Error([&]
          {
            std::ostringstream os;
            os << "pencil s^2 M + s D + L(p) is numerically singular at s = " << s.real()
               << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag())
               << "i (reciprocal condition estimate " << rcond
               << "); s is at or near a pole";
            return os.str();
          }()),
    s_(s), rcond_(rcond)
{
}

namespace log
{

Sink SetWarningSink(Sink sink)
{
  std::lock_guard lock(sink_mutex);
  auto previous = std::move(SinkRef());
  SinkRef() = std::move(sink);
  return previous;
}

void Warn(std::string_view message)
{
  std::lock_guard lock(sink_mutex);
  if (SinkRef())
  {
    SinkRef()(message);
  }
}

}  // namespace log

}  // namespace swingrom
