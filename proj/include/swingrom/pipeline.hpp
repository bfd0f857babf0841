// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SWINGROM_PIPELINE_HPP
#define SWINGROM_PIPELINE_HPP

#include <filesystem>
#include <string>
#include <vector>
#include "swingrom/mor.hpp"
#include "swingrom/model_io.hpp"

namespace swingrom
{

// How the kernel vectors of L(p) get into the global basis.
//   Blocks        block indicators e_k: residue matching on the whole box
//   Samples       kernel vectors of m >= nu samples, which span the e_k
//   PerParameter  kernel vector appended for every new p at evaluation time
//   None          kernel-vector columns removed (negative control)
enum class EnrichMode
{
  Blocks,
  Samples,
  PerParameter,
  None
};

std::string to_string(EnrichMode mode);
EnrichMode enrich_mode_from_string(const std::string &name);

struct ReduceOptions
{
  IrkaOptions irka;
  EnrichMode enrich = EnrichMode::Blocks;
  Execution exec = Execution::Parallel;
};

struct SampleRecord
{
  Vector p;
  int order = 0;
  InterpolationSet interpolation;
  IrkaDiagnostics diagnostics;
};

struct ParametricRom
{
  ReducedModel reduced;
  EnrichMode enrich = EnrichMode::Blocks;
  std::vector<SampleRecord> samples;
  std::string model_hash;
  std::vector<int> param_blocks;
  int full_order = 0;
};

// One SOR-IRKA run per sample (concurrently), then the global basis and the
// Galerkin projection. orders holds one entry per sample or a single entry
// used for all of them.
ParametricRom build_parametric_rom(const SecondOrderModel &model, const std::vector<Vector> &samples,
                                   const std::vector<int> &orders, const ReduceOptions &opts = {});

// ROM with V = I; reproduces the full model exactly.
ParametricRom exact_rom(const SecondOrderModel &model);

// Reduced model to evaluate at p; augments the basis in PerParameter mode.
ReducedModel rom_at(const ParametricRom &rom, const SecondOrderModel &model, const Vector &p,
                    double angle_tol = 1.0e-8);

// Throws InvariantError when the ROM cannot belong to the model (size or
// blocks differ); warns when only the model hash differs.
void check_rom_model(const ParametricRom &rom, const SecondOrderModel &model);

// ROM file: {format, version, model_hash, n, r, M_r, D_r, B_r, C_r, V,
// provenance, param_blocks, enrich, samples}; matrices as row-major arrays.
Json rom_to_json(const ParametricRom &rom);
ParametricRom rom_from_json(const Json &doc);
std::string dump_rom(const ParametricRom &rom);
void save_rom(const ParametricRom &rom, const std::filesystem::path &path);
ParametricRom load_rom(const std::filesystem::path &path);

}  // namespace swingrom

#endif  // SWINGROM_PIPELINE_HPP
