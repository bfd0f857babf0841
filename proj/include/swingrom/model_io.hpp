// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_MODEL_IO_HPP
#define SWINGROM_MODEL_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <json.hpp>
#include "swingrom/netmodel.hpp"

namespace swingrom
{

using Json = nlohmann::json;

// Model file layout:
//   {n, edges: [[i, j, b], ...], inertia: [...], damping: [...],
//    input_map, output_map, param_blocks: [n_1, ...], param_box: {lower, upper}}
// input_map/output_map are either dense row-major arrays or {"selector": [...]}.
// param_blocks defaults to [n]; param_box defaults to [0.85, 1.15] per block.
Json model_to_json(const SecondOrderModel &model);
SecondOrderModel model_from_json(const Json &doc);

// Canonical text form; equal models produce byte-identical strings.
std::string dump_model(const SecondOrderModel &model);

void save_model(const SecondOrderModel &model, const std::filesystem::path &path);
SecondOrderModel load_model(const std::filesystem::path &path);

// FNV-1a over dump_model; ROM files refer to their source model through it.
std::uint64_t model_hash(const SecondOrderModel &model);
std::string hash_string(std::uint64_t hash);

// Shared helpers for the ROM format.
Json matrix_to_json(const Matrix &m);
Matrix matrix_from_json(const Json &doc, const std::string &path);
std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

}  // namespace swingrom

#endif  // SWINGROM_MODEL_IO_HPP
