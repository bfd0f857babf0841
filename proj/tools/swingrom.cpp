// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

// swingrom: parametric swing-network models and residue-matching reduced models.
//
//   swingrom gen --kind random_connected --n 200 --seed 7 --blocks 2 --out model.json
//   swingrom reduce --model model.json --sample 0.9572,0.93399 --sample 1.0304,0.9522 \
//       --order 20 --out rom.json
//   swingrom check --model model.json --rom rom.json --random 20 --seed 1
//   swingrom sweep --model model.json --rom rom.json --grid 10,10 --out sweep.csv
//
// Exit codes: 0 success, 1 validation or certification failure, 2 usage error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "swingrom/matpower.hpp"
#include "swingrom/validate.hpp"

namespace
{

using namespace swingrom;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct GlobalFlags
{
  std::optional<std::uint64_t> seed;
  double tol_zero = kZeroTol;
  double tol_rank = 1.0e-10;
  FrequencyGrid grid;
  std::string out;
  std::string format = "csv";
};

std::vector<double> ParseList(const std::string &text, const std::string &flag)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    try
    {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos)
      {
        throw std::invalid_argument(item);
      }
    }
    catch (const std::exception &)
    {
      throw UsageError(flag + ": '" + text + "' is not a comma-separated list of numbers");
    }
  }
  if (out.empty())
  {
    throw UsageError(flag + ": empty list");
  }
  return out;
}

std::vector<int> ParseIntList(const std::string &text, const std::string &flag)
{
  std::vector<int> out;
  for (double x : ParseList(text, flag))
  {
    if (x != static_cast<int>(x))
    {
      throw UsageError(flag + ": '" + text + "' must hold integers");
    }
    out.push_back(static_cast<int>(x));
  }
  return out;
}

Vector ToVector(const std::vector<double> &v)
{
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<Vector> LoadSamplesFile(const std::string &path)
{
  Json doc;
  try
  {
    doc = Json::parse(read_text_file(path));
  }
  catch (const Json::parse_error &e)
  {
    throw SchemaError("", path + " is not valid JSON: " + e.what());
  }
  const Json &list = doc.is_object() && doc.contains("samples") ? doc["samples"] : doc;
  if (!list.is_array() || list.empty())
  {
    throw SchemaError("/samples", "expected a nonempty array of parameter vectors");
  }
  std::vector<Vector> out;
  for (std::size_t i = 0; i < list.size(); i++)
  {
    const Json &row = list[i];
    if (!row.is_array() || row.empty())
    {
      throw SchemaError("/samples/" + std::to_string(i), "expected an array of numbers");
    }
    Vector p(static_cast<Eigen::Index>(row.size()));
    for (std::size_t k = 0; k < row.size(); k++)
    {
      if (!row[k].is_number())
      {
        throw SchemaError("/samples/" + std::to_string(i) + "/" + std::to_string(k),
                          "expected a number");
      }
      p[static_cast<Eigen::Index>(k)] = row[k].get<double>();
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Vector> CollectSamples(const std::vector<std::string> &inline_samples,
                                   const std::string &file)
{
  std::vector<Vector> out;
  for (const auto &s : inline_samples)
  {
    out.push_back(ToVector(ParseList(s, "--sample")));
  }
  if (!file.empty())
  {
    for (auto &p : LoadSamplesFile(file))
    {
      out.push_back(std::move(p));
    }
  }
  if (out.empty())
  {
    throw UsageError("give at least one --sample or a --samples-file");
  }
  return out;
}

void Emit(const GlobalFlags &g, const std::string &text)
{
  if (g.out.empty())
  {
    std::cout << text;
  }
  else
  {
    write_text_file(g.out, text);
  }
}

std::uint64_t RequireSeed(const GlobalFlags &g, const std::string &what)
{
  if (!g.seed)
  {
    throw UsageError(what + " is randomized and needs --seed");
  }
  return *g.seed;
}

std::string Fmt(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string Num(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void PrintSummary(const SecondOrderModel &model)
{
  const Vector spec = symmetric_spectrum(model.Laplacian());
  std::cerr << "n = " << model.Size() << ", |E| = " << model.Network().edges.size()
            << ", lambda_2 = " << Fmt(spec.size() > 1 ? spec[1] : 0.0)
            << ", blocks = " << model.Space().NumParams() << "\n";
}

ParameterSpace SpaceFor(int n, int blocks, double alpha)
{
  if (blocks < 1 || blocks > n)
  {
    throw UsageError("--blocks must be between 1 and n");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0))
  {
    throw UsageError("--alpha must lie in (0, 1)");
  }
  return ParameterSpace::Uniform(n, blocks, alpha);
}

std::pair<double, double> ParseRange(const std::string &text, const std::string &flag)
{
  const auto v = ParseList(text, flag);
  if (v.size() != 2)
  {
    throw UsageError(flag + " expects lo,hi");
  }
  return {v[0], v[1]};
}

GraphKind ParseKind(const std::string &kind)
{
  if (kind == "path")
  {
    return GraphKind::Path;
  }
  if (kind == "ring")
  {
    return GraphKind::Ring;
  }
  if (kind == "random_connected")
  {
    return GraphKind::RandomConnected;
  }
  throw UsageError("--kind must be path, ring or random_connected");
}

SweepSpec MakeSpec(const GlobalFlags &g, const std::string &grid, int samples)
{
  SweepSpec spec;
  if (samples > 0 && !grid.empty())
  {
    throw UsageError("give either --grid or --samples, not both");
  }
  if (samples > 0)
  {
    spec.samples = samples;
    spec.seed = RequireSeed(g, "--samples");
  }
  else
  {
    spec.counts = ParseIntList(grid.empty() ? "10" : grid, "--grid");
  }
  return spec;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Parametric swing-network models and residue-matching reduced models"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  GlobalFlags g;
  std::uint64_t seed_value = 0;
  auto *seed_opt = app.add_option("--seed", seed_value, "Random seed (required by randomized commands)");
  app.add_option("--tol-zero", g.tol_zero, "Relative zero-pole gate")->check(CLI::PositiveNumber);
  app.add_option("--tol-rank", g.tol_rank, "Rank tolerance of the global basis")
      ->check(CLI::PositiveNumber);
  app.add_option("--omega-min", g.grid.omega_min, "Lower end of the frequency grid")
      ->check(CLI::PositiveNumber);
  app.add_option("--omega-max", g.grid.omega_max, "Upper end of the frequency grid")
      ->check(CLI::PositiveNumber);
  app.add_option("--omega-points", g.grid.points, "Number of grid frequencies")
      ->check(CLI::Range(2, 1000000));
  app.add_option("--out", g.out, "Output file (stdout when omitted)");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  // gen
  auto *gen = app.add_subcommand("gen", "Generate a synthetic network model");
  std::string kind = "random_connected";
  int gen_n = 0;
  int gen_blocks = 1;
  double gen_alpha = 0.15;
  std::string gen_inputs = "0";
  std::string gen_outputs = "0";
  std::string inertia_range = "0.5,2";
  std::string damping_range = "0.5,1.5";
  std::string susceptance_range = "0.5,2";
  double density = 0.5;
  gen->add_option("--kind", kind, "path, ring or random_connected");
  gen->add_option("--n", gen_n, "Number of nodes")->required();
  gen->add_option("--blocks", gen_blocks, "Number of parameter blocks");
  gen->add_option("--alpha", gen_alpha, "Parameter box half-width around 1");
  gen->add_option("--inputs", gen_inputs, "Input nodes, comma-separated");
  gen->add_option("--outputs", gen_outputs, "Output nodes, comma-separated");
  gen->add_option("--inertia", inertia_range, "Inertia range lo,hi");
  gen->add_option("--damping", damping_range, "Damping range lo,hi");
  gen->add_option("--susceptance", susceptance_range, "Susceptance range lo,hi");
  gen->add_option("--density", density, "Extra edges per node for random graphs");

  // import
  auto *imp = app.add_subcommand("import", "Import a MATPOWER case");
  std::string case_path;
  double imp_inertia = 1.0;
  double imp_damping = 1.0;
  std::string overrides;
  int imp_blocks = 1;
  double imp_alpha = 0.15;
  std::string imp_inputs = "0";
  std::string imp_outputs = "0";
  imp->add_option("--case", case_path, "MATPOWER case file")->required();
  imp->add_option("--inertia", imp_inertia, "Default inertia M_i")->check(CLI::PositiveNumber);
  imp->add_option("--damping", imp_damping, "Default damping D_i")->check(CLI::PositiveNumber);
  imp->add_option("--overrides", overrides,
                  "JSON {\"<bus>\": {\"inertia\": x, \"damping\": y}} per-bus overrides");
  imp->add_option("--blocks", imp_blocks, "Number of parameter blocks");
  imp->add_option("--alpha", imp_alpha, "Parameter box half-width around 1");
  imp->add_option("--inputs", imp_inputs, "Input nodes (0-based), comma-separated");
  imp->add_option("--outputs", imp_outputs, "Output nodes (0-based), comma-separated");

  // reduce
  auto *red = app.add_subcommand("reduce", "Build a parametric reduced model");
  std::string model_path;
  std::vector<std::string> inline_samples;
  std::string samples_file;
  std::string orders = "20";
  std::string enrich = "blocks";
  int max_iter = 50;
  double irka_tol = 1.0e-6;
  red->add_option("--model", model_path, "Model file")->required();
  red->add_option("--sample", inline_samples, "Parameter sample p_1,...,p_nu (repeatable)");
  red->add_option("--samples-file", samples_file, "JSON list of parameter samples");
  red->add_option("--order", orders, "Local order, one value or one per sample");
  red->add_option("--enrich", enrich, "blocks, samples, per-p or none")
      ->check(CLI::IsMember({"blocks", "samples", "per-p", "none"}));
  red->add_option("--max-iter", max_iter, "SOR-IRKA iteration cap")->check(CLI::PositiveNumber);
  red->add_option("--irka-tol", irka_tol, "SOR-IRKA shift movement tolerance")
      ->check(CLI::PositiveNumber);

  // check
  auto *chk = app.add_subcommand("check", "Certify a reduced model at parameter values");
  std::string rom_path;
  std::vector<std::string> params;
  int random_points = 0;
  chk->add_option("--model", model_path, "Model file")->required();
  chk->add_option("--rom", rom_path, "ROM file")->required();
  chk->add_option("--param", params, "Parameter value p_1,...,p_nu (repeatable)");
  chk->add_option("--random", random_points, "Number of random parameter values (needs --seed)");

  // eval
  auto *ev = app.add_subcommand("eval", "Frequency response of full and reduced model");
  std::string eval_param;
  ev->add_option("--model", model_path, "Model file")->required();
  ev->add_option("--rom", rom_path, "ROM file")->required();
  ev->add_option("--param", eval_param, "Parameter value p_1,...,p_nu")->required();

  // sweep
  auto *sw = app.add_subcommand("sweep", "Relative error over the parameter box");
  std::string grid;
  int sweep_samples = 0;
  bool h2 = false;
  std::string normalization = "grid";
  sw->add_option("--model", model_path, "Model file")->required();
  sw->add_option("--rom", rom_path, "ROM file")->required();
  sw->add_option("--grid", grid, "Tensor grid counts per axis, e.g. 10,10");
  sw->add_option("--samples", sweep_samples, "Number of random points (needs --seed)");
  sw->add_flag("--h2", h2, "Also report the relative H2 error");
  sw->add_option("--normalization", normalization, "grid or stable")
      ->check(CLI::IsMember({"grid", "stable"}));

  // study
  auto *st = app.add_subcommand("study", "Error statistics for several reduced orders");
  std::string study_orders = "10,20,40";
  st->add_option("--model", model_path, "Model file")->required();
  st->add_option("--sample", inline_samples, "Parameter sample (repeatable)");
  st->add_option("--samples-file", samples_file, "JSON list of parameter samples");
  st->add_option("--orders", study_orders, "Global orders, comma-separated");
  st->add_option("--enrich", enrich, "blocks, samples, per-p or none")
      ->check(CLI::IsMember({"blocks", "samples", "per-p", "none"}));
  st->add_option("--grid", grid, "Tensor grid counts per axis");
  st->add_option("--samples", sweep_samples, "Number of random points (needs --seed)");
  st->add_option("--normalization", normalization, "grid or stable")
      ->check(CLI::IsMember({"grid", "stable"}));

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (seed_opt->count() > 0)
  {
    g.seed = seed_value;
  }

  try
  {
    if (!(g.grid.omega_max > g.grid.omega_min))
    {
      throw UsageError("--omega-max must exceed --omega-min");
    }
    IrkaOptions irka;
    irka.tol_zero = g.tol_zero;
    irka.rank_tol = g.tol_rank;
    irka.max_iter = max_iter;
    irka.tol = irka_tol;
    CertifyTolerances tol;
    tol.tol_zero = g.tol_zero;

    if (*gen)
    {
      const std::uint64_t seed = RequireSeed(g, "gen");
      if (gen_n < 2)
      {
        throw UsageError("--n must be at least 2");
      }
      CoefficientRanges ranges;
      ranges.inertia = ParseRange(inertia_range, "--inertia");
      ranges.damping = ParseRange(damping_range, "--damping");
      ranges.susceptance = ParseRange(susceptance_range, "--susceptance");
      ranges.extra_edge_density = density;
      const NetworkModel net =
          generate_network(ParseKind(kind), gen_n, seed, ranges, ParseIntList(gen_inputs, "--inputs"),
                           ParseIntList(gen_outputs, "--outputs"));
      const SecondOrderModel model(net, SpaceFor(gen_n, gen_blocks, gen_alpha));
      Emit(g, dump_model(model));
      PrintSummary(model);
      return kExitOk;
    }

    if (*imp)
    {
      CaseImportOptions opts;
      opts.default_inertia = imp_inertia;
      opts.default_damping = imp_damping;
      opts.inputs = ParseIntList(imp_inputs, "--inputs");
      opts.outputs = ParseIntList(imp_outputs, "--outputs");
      if (!overrides.empty())
      {
        const Json doc = Json::parse(read_text_file(overrides));
        if (!doc.is_object())
        {
          throw SchemaError("", "overrides must be an object keyed by bus number");
        }
        for (const auto &[bus, entry] : doc.items())
        {
          const int b = std::stoi(bus);
          if (entry.contains("inertia"))
          {
            opts.inertia_override[b] = entry["inertia"].get<double>();
          }
          if (entry.contains("damping"))
          {
            opts.damping_override[b] = entry["damping"].get<double>();
          }
        }
      }
      const CaseImport result = parse_matpower_case(read_text_file(case_path), opts);
      const SecondOrderModel model(result.network,
                                   SpaceFor(result.network.n, imp_blocks, imp_alpha));
      Emit(g, dump_model(model));
      PrintSummary(model);
      return kExitOk;
    }

    if (*red)
    {
      const SecondOrderModel model = load_model(model_path);
      const std::vector<Vector> samples = CollectSamples(inline_samples, samples_file);
      ReduceOptions opts;
      opts.irka = irka;
      opts.enrich = enrich_mode_from_string(enrich);
      const int nu = model.Space().NumParams();
      if (opts.enrich == EnrichMode::Samples && static_cast<int>(samples.size()) < nu)
      {
        throw UsageError("--enrich samples needs at least nu = " + std::to_string(nu) +
                         " samples, got " + std::to_string(samples.size()));
      }
      const ParametricRom rom =
          build_parametric_rom(model, samples, ParseIntList(orders, "--order"), opts);
      Emit(g, dump_rom(rom));
      for (size_t i = 0; i < rom.samples.size(); i++)
      {
        const auto &d = rom.samples[i].diagnostics;
        std::cerr << "sample " << i << ": order " << rom.samples[i].order << ", "
                  << d.iterations << " iterations, "
                  << (d.converged ? "converged" : "NOT converged") << ", movement "
                  << Fmt(d.final_movement) << (d.null_vector_forced ? ", kernel vector appended" : "")
                  << "\n";
      }
      std::cerr << "r = " << rom.reduced.Order() << " (enrich " << to_string(rom.enrich) << ")\n";
      return kExitOk;
    }

    if (*chk)
    {
      const SecondOrderModel model = load_model(model_path);
      const ParametricRom rom = load_rom(rom_path);
      check_rom_model(rom, model);
      std::vector<Vector> points;
      for (const auto &s : params)
      {
        points.push_back(ToVector(ParseList(s, "--param")));
      }
      if (random_points > 0)
      {
        SweepSpec spec;
        spec.samples = random_points;
        spec.seed = RequireSeed(g, "check --random");
        for (auto &p : sweep_points(model.Space(), spec))
        {
          points.push_back(std::move(p));
        }
      }
      if (points.empty())
      {
        throw UsageError("give --param or --random");
      }
      bool all = true;
      std::string text;
      Json list = Json::array();
      for (const auto &p : points)
      {
        if (p.size() != model.Space().NumParams())
        {
          throw UsageError("--param needs " + std::to_string(model.Space().NumParams()) +
                           " entries");
        }
        const Certificate c = certify(model, rom, p, tol);
        all = all && c.Passed();
        text += format_certificate(c);
        list.push_back(certificate_to_json(c));
      }
      Emit(g, g.format == "json" ? list.dump(1) + "\n" : text);
      return all ? kExitOk : kExitFailure;
    }

    if (*ev)
    {
      const SecondOrderModel model = load_model(model_path);
      const ParametricRom rom = load_rom(rom_path);
      check_rom_model(rom, model);
      const Vector p = ToVector(ParseList(eval_param, "--param"));
      if (p.size() != model.Space().NumParams())
      {
        throw UsageError("--param needs " + std::to_string(model.Space().NumParams()) +
                         " entries");
      }
      const ReducedModel reduced = rom_at(rom, model, p);
      const auto full = make_full_response(model, p);
      const auto rsys = make_response(reduced_system(reduced, model, p));
      const std::vector<double> omegas = g.grid.Omegas();
      const auto hf = evaluate_grid(*full, omegas);
      const auto hr = evaluate_grid(*rsys, omegas);
      std::ostringstream os;
      if (g.format == "json")
      {
        Json j;
        j["p"] = std::vector<double>(p.data(), p.data() + p.size());
        j["r"] = reduced.Order();
        Json rows = Json::array();
        for (size_t k = 0; k < omegas.size(); k++)
        {
          rows.push_back({{"omega", omegas[k]},
                          {"sigma_full", sigma_max(hf[k])},
                          {"sigma_reduced", sigma_max(hr[k])},
                          {"sigma_error", sigma_max(hf[k] - hr[k])}});
        }
        j["response"] = std::move(rows);
        os << j.dump(1) << "\n";
      }
      else
      {
        os << "# swingrom " << kVersion << " frequency response, r = " << reduced.Order() << "\n";
        os << "omega,sigma_full,sigma_reduced,sigma_error\n";
        for (size_t k = 0; k < omegas.size(); k++)
        {
          os << Num(omegas[k]) << "," << Num(sigma_max(hf[k])) << "," << Num(sigma_max(hr[k]))
             << "," << Num(sigma_max(hf[k] - hr[k])) << "\n";
        }
      }
      Emit(g, os.str());
      return kExitOk;
    }

    if (*sw)
    {
      const SecondOrderModel model = load_model(model_path);
      const ParametricRom rom = load_rom(rom_path);
      SweepOptions opts;
      opts.grid = g.grid;
      opts.h2 = h2;
      opts.normalization = normalization_from_string(normalization);
      opts.tol = tol;
      const SweepSpec spec = MakeSpec(g, grid, sweep_samples);
      try
      {
        const SweepReport report = sweep(model, rom, spec, opts);
        Emit(g, g.format == "json" ? sweep_json(report).dump(1) + "\n" : sweep_csv(report));
        std::cerr << report.points.size() << " points, max rel_hinf "
                  << Fmt(report.MaxRelHinf()) << ", median " << Fmt(report.MedianRelHinf())
                  << "\n";
      }
      catch (const CertificationError &e)
      {
        std::cerr << e.what();
        return kExitFailure;
      }
      return kExitOk;
    }

    if (*st)
    {
      const SecondOrderModel model = load_model(model_path);
      const std::vector<Vector> samples = CollectSamples(inline_samples, samples_file);
      ReduceOptions ropts;
      ropts.irka = irka;
      ropts.enrich = enrich_mode_from_string(enrich);
      SweepOptions sopts;
      sopts.grid = g.grid;
      sopts.normalization = normalization_from_string(normalization);
      sopts.tol = tol;
      const auto rows = convergence_study(model, samples, ParseIntList(study_orders, "--orders"),
                                          MakeSpec(g, grid, sweep_samples), sopts, ropts);
      if (g.format == "json")
      {
        Json j = Json::array();
        for (const auto &r : rows)
        {
          j.push_back({{"target_r", r.target},
                       {"r", r.order},
                       {"median_rel_hinf", r.median},
                       {"max_rel_hinf", r.max},
                       {"certified", r.certified}});
        }
        Emit(g, j.dump(1) + "\n");
      }
      else
      {
        Emit(g, study_csv(rows));
      }
      return kExitOk;
    }
  }
  catch (const UsageError &e)
  {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
