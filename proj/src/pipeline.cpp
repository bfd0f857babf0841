// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/pipeline.hpp"

#include <sstream>

namespace swingrom
{

std::string to_string(EnrichMode mode)
{
  switch (mode)
  {
    case EnrichMode::Blocks:
      return "blocks";
    case EnrichMode::Samples:
      return "samples";
    case EnrichMode::PerParameter:
      return "per-p";
    case EnrichMode::None:
      return "none";
  }
  return "blocks";
}

EnrichMode enrich_mode_from_string(const std::string &name)
{
  for (auto mode : {EnrichMode::Blocks, EnrichMode::Samples, EnrichMode::PerParameter,
                    EnrichMode::None})
  {
    if (to_string(mode) == name)
    {
      return mode;
    }
  }
  throw InvariantError("unknown enrichment mode '" + name +
                       "' (expected blocks, samples, per-p or none)");
}

ParametricRom build_parametric_rom(const SecondOrderModel &model, const std::vector<Vector> &samples,
                                   const std::vector<int> &orders, const ReduceOptions &opts)
{
  const int m = static_cast<int>(samples.size());
  const int nu = model.Space().NumParams();
  if (m == 0)
  {
    throw InvariantError("reduction needs at least one parameter sample");
  }
  if (orders.size() != 1 && static_cast<int>(orders.size()) != m)
  {
    std::ostringstream os;
    os << "got " << orders.size() << " orders for " << m << " samples";
    throw InvariantError(os.str());
  }
  if (opts.enrich == EnrichMode::Samples && m < nu)
  {
    std::ostringstream os;
    os << "enrichment from samples needs at least as many samples as parameters (m = " << m
       << " < nu = " << nu << "); use --enrich blocks or add samples";
    throw InvariantError(os.str());
  }
  for (int i = 0; i < m; i++)
  {
    if (samples[i].size() != nu)
    {
      std::ostringstream os;
      os << "sample " << i << " has " << samples[i].size() << " entries, the model has " << nu
         << " parameters";
      throw InvariantError(os.str());
    }
    // Expand throws for p_k <= 0.
    model.Space().Expand(samples[i]);
    if (!model.Space().Contains(samples[i]))
    {
      log::Warn("sample " + std::to_string(i) + " lies outside the parameter box");
    }
  }

  std::vector<IrkaResult> runs(m);
  std::vector<std::string> errors(m);
  auto run = [&](int i)
  {
    try
    {
      const int order = orders.size() == 1 ? orders[0] : orders[i];
      runs[i] = sor_irka(model, samples[i], order, opts.irka, i);
    }
    catch (const std::exception &e)
    {
      errors[i] = e.what();
    }
  };
  if (opts.exec == Execution::Parallel)
  {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < m; i++)
    {
      run(i);
    }
  }
  else
  {
    for (int i = 0; i < m; i++)
    {
      run(i);
    }
  }
  for (int i = 0; i < m; i++)
  {
    if (!errors[i].empty())
    {
      throw Error("sample " + std::to_string(i) + ": " + errors[i]);
    }
  }

  std::vector<LocalBasis> locals;
  for (auto &r : runs)
  {
    LocalBasis l = r.basis;
    if (opts.enrich == EnrichMode::None)
    {
      // Drop the kernel-vector column and keep the rest orthogonal to it.
      LocalBasis stripped;
      std::vector<int> keep;
      for (size_t j = 0; j < l.tags.size(); j++)
      {
        if (l.tags[j].kind != ColumnTag::Kind::NullVector)
        {
          keep.push_back(static_cast<int>(j));
        }
      }
      stripped.columns.resize(l.columns.rows(), static_cast<Eigen::Index>(keep.size()));
      for (size_t k = 0; k < keep.size(); k++)
      {
        stripped.columns.col(static_cast<Eigen::Index>(k)) = l.columns.col(keep[k]);
        stripped.tags.push_back(l.tags[keep[k]]);
      }
      l = std::move(stripped);
    }
    locals.push_back(std::move(l));
  }
  LocalBasis extras;
  if (opts.enrich == EnrichMode::Blocks)
  {
    extras = enrich_for_blocks(model.Space());
  }
  const ReductionBasis basis = global_basis(locals, extras, opts.irka.rank_tol);

  if (opts.enrich == EnrichMode::Samples)
  {
    const LocalBasis e = enrich_for_blocks(model.Space());
    for (int k = 0; k < nu; k++)
    {
      const double s = principal_angle_sine(basis.v, e.columns.col(k));
      if (!(s <= 1.0e-8))
      {
        std::ostringstream os;
        os << "sample kernel vectors do not span block indicator " << k << " (sin angle " << s
           << "); residue matching holds only at the samples";
        log::Warn(os.str());
      }
    }
  }

  ParametricRom rom;
  rom.reduced = reduce(model, basis);
  rom.enrich = opts.enrich;
  rom.model_hash = hash_string(model_hash(model));
  rom.param_blocks = model.Space().BlockSizes();
  rom.full_order = model.Size();
  for (int i = 0; i < m; i++)
  {
    SampleRecord rec;
    rec.p = samples[i];
    rec.order = orders.size() == 1 ? orders[0] : orders[i];
    rec.interpolation = std::move(runs[i].interpolation);
    rec.diagnostics = std::move(runs[i].diagnostics);
    rom.samples.push_back(std::move(rec));
  }
  return rom;
}

ParametricRom exact_rom(const SecondOrderModel &model)
{
  ReductionBasis basis;
  basis.v = Matrix::Identity(model.Size(), model.Size());
  for (int k = 0; k < model.Size(); k++)
  {
    basis.provenance.push_back({ColumnTag::Kind::Identity, -1, {}, 0, -1});
  }
  ParametricRom rom;
  rom.reduced = reduce(model, basis);
  rom.enrich = EnrichMode::Blocks;
  rom.model_hash = hash_string(model_hash(model));
  rom.param_blocks = model.Space().BlockSizes();
  rom.full_order = model.Size();
  return rom;
}

ReducedModel rom_at(const ParametricRom &rom, const SecondOrderModel &model, const Vector &p,
                    double angle_tol)
{
  if (rom.enrich == EnrichMode::PerParameter)
  {
    return augment_for_parameter(rom.reduced, model, p, angle_tol);
  }
  return rom.reduced;
}

void check_rom_model(const ParametricRom &rom, const SecondOrderModel &model)
{
  if (rom.full_order != model.Size() || rom.reduced.V().rows() != model.Size())
  {
    std::ostringstream os;
    os << "ROM was built for n = " << rom.full_order << ", model has n = " << model.Size();
    throw InvariantError(os.str());
  }
  if (rom.param_blocks != model.Space().BlockSizes())
  {
    throw InvariantError("ROM parameter blocks differ from the model's");
  }
  if (rom.reduced.B().cols() != model.Inputs() || rom.reduced.C().rows() != model.Outputs())
  {
    throw InvariantError("ROM input/output sizes differ from the model's");
  }
  const std::string h = hash_string(model_hash(model));
  if (h != rom.model_hash)
  {
    log::Warn("model hash " + h + " differs from the hash " + rom.model_hash +
              " recorded in the ROM");
  }
}

}  // namespace swingrom
