// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_MATPOWER_HPP
#define SWINGROM_MATPOWER_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>
#include "swingrom/netmodel.hpp"

namespace swingrom
{

// MATPOWER cases carry no swing coefficients; they come from global defaults
// with optional per-bus overrides keyed by the case's bus number.
struct CaseImportOptions
{
  double default_inertia = 1.0;
  double default_damping = 1.0;
  std::map<int, double> inertia_override;
  std::map<int, double> damping_override;
  std::vector<int> inputs{0};   // 0-based node indices
  std::vector<int> outputs{0};
};

struct CaseImport
{
  NetworkModel network;
  std::vector<int> bus_numbers;  // node index -> case bus number
  std::vector<std::string> warnings;
};

// Reads the mpc.bus and mpc.branch matrix literals. Only the bus number column
// and the branch (from, to, x, status) columns are used; b = 1/x, parallel
// branches are summed, status-0 branches and branches with x <= 0 are skipped.
// Generator and cost tables are ignored; unknown mpc fields produce a warning.
CaseImport parse_matpower_case(std::string_view text, const CaseImportOptions &options = {});

// Emits a case in the subset understood by parse_matpower_case (x = 1/b).
std::string write_matpower_case(const NetworkModel &net);

}  // namespace swingrom

#endif  // SWINGROM_MATPOWER_HPP
