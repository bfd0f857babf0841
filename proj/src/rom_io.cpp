// Copyright The swingrom Authors.
// SPDX-License-Identifier: Apache-2.0

#include "swingrom/pipeline.hpp"

namespace swingrom
{

namespace
{

constexpr const char *kFormat = "swingrom-rom";

const Json &Get(const Json &doc, const std::string &path, const std::string &key)
{
  if (!doc.is_object() || !doc.contains(key))
  {
    throw SchemaError(path + "/" + key, "missing field");
  }
  return doc.at(key);
}

double Real(const Json &v, const std::string &path)
{
  if (!v.is_number())
  {
    throw SchemaError(path, "expected a number");
  }
  return v.get<double>();
}

int Int(const Json &v, const std::string &path)
{
  if (!v.is_number_integer())
  {
    throw SchemaError(path, "expected an integer");
  }
  return v.get<int>();
}

Json ComplexToJson(Complex z)
{
  return Json::array({z.real(), z.imag()});
}

Complex ComplexFromJson(const Json &v, const std::string &path)
{
  if (!v.is_array() || v.size() != 2)
  {
    throw SchemaError(path, "expected [re, im]");
  }
  return {Real(v[0], path + "/0"), Real(v[1], path + "/1")};
}

Json VectorToJson(const Vector &v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector VectorFromJson(const Json &v, const std::string &path)
{
  if (!v.is_array())
  {
    throw SchemaError(path, "expected an array of numbers");
  }
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); k++)
  {
    out[static_cast<Eigen::Index>(k)] = Real(v[k], path + "/" + std::to_string(k));
  }
  return out;
}

Json TagToJson(const ColumnTag &t)
{
  Json j = {{"kind", to_string(t.kind)}};
  if (t.sample >= 0)
  {
    j["sample"] = t.sample;
  }
  if (t.kind == ColumnTag::Kind::Shift)
  {
    j["shift"] = ComplexToJson(t.shift);
    j["part"] = t.part == 0 ? "re" : "im";
  }
  if (t.block >= 0)
  {
    j["block"] = t.block;
  }
  return j;
}

ColumnTag TagFromJson(const Json &j, const std::string &path)
{
  ColumnTag t;
  const Json &kind = Get(j, path, "kind");
  if (!kind.is_string())
  {
    throw SchemaError(path + "/kind", "expected a string");
  }
  try
  {
    t.kind = column_kind_from_string(kind.get<std::string>());
  }
  catch (const InvariantError &e)
  {
    throw SchemaError(path + "/kind", e.what());
  }
  if (j.contains("sample"))
  {
    t.sample = Int(j["sample"], path + "/sample");
  }
  if (j.contains("shift"))
  {
    t.shift = ComplexFromJson(j["shift"], path + "/shift");
  }
  if (j.contains("part"))
  {
    t.part = j["part"] == "im" ? 1 : 0;
  }
  if (j.contains("block"))
  {
    t.block = Int(j["block"], path + "/block");
  }
  return t;
}

}  // namespace

Json rom_to_json(const ParametricRom &rom)
{
  const ReducedModel &red = rom.reduced;
  Json doc;
  doc["format"] = kFormat;
  doc["version"] = std::string(kVersion);
  doc["model_hash"] = rom.model_hash;
  doc["n"] = rom.full_order;
  doc["r"] = red.Order();
  doc["enrich"] = to_string(rom.enrich);
  doc["param_blocks"] = rom.param_blocks;
  doc["M_r"] = matrix_to_json(red.Mass());
  doc["D_r"] = matrix_to_json(red.Damping());
  doc["B_r"] = matrix_to_json(red.B());
  doc["C_r"] = matrix_to_json(red.C());
  doc["V"] = matrix_to_json(red.V());
  Json prov = Json::array();
  for (const auto &t : red.Basis().provenance)
  {
    prov.push_back(TagToJson(t));
  }
  doc["provenance"] = std::move(prov);
  Json samples = Json::array();
  for (const auto &s : rom.samples)
  {
    Json js;
    js["p"] = VectorToJson(s.p);
    js["order"] = s.order;
    Json shifts = Json::array();
    Json dirs = Json::array();
    for (int k = 0; k < s.interpolation.Size(); k++)
    {
      shifts.push_back(ComplexToJson(s.interpolation.shifts[k]));
      Json d = Json::array();
      for (Eigen::Index i = 0; i < s.interpolation.directions[k].size(); i++)
      {
        d.push_back(ComplexToJson(s.interpolation.directions[k][i]));
      }
      dirs.push_back(std::move(d));
    }
    js["shifts"] = std::move(shifts);
    js["directions"] = std::move(dirs);
    js["iterations"] = s.diagnostics.iterations;
    js["converged"] = s.diagnostics.converged;
    js["movement"] = s.diagnostics.final_movement;
    js["null_vector_column"] = s.diagnostics.null_vector_column;
    js["null_vector_forced"] = s.diagnostics.null_vector_forced;
    samples.push_back(std::move(js));
  }
  doc["samples"] = std::move(samples);
  return doc;
}

ParametricRom rom_from_json(const Json &doc)
{
  if (!doc.is_object())
  {
    throw SchemaError("", "ROM file must hold a JSON object");
  }
  const Json &format = Get(doc, "", "format");
  if (format != kFormat)
  {
    throw SchemaError("/format", std::string("expected \"") + kFormat + "\"");
  }
  ParametricRom rom;
  const Json &hash = Get(doc, "", "model_hash");
  if (!hash.is_string())
  {
    throw SchemaError("/model_hash", "expected a string");
  }
  rom.model_hash = hash.get<std::string>();
  rom.full_order = Int(Get(doc, "", "n"), "/n");
  const int r = Int(Get(doc, "", "r"), "/r");
  const Json &enrich = Get(doc, "", "enrich");
  try
  {
    rom.enrich = enrich_mode_from_string(enrich.is_string() ? enrich.get<std::string>() : "");
  }
  catch (const InvariantError &e)
  {
    throw SchemaError("/enrich", e.what());
  }
  const Json &blocks = Get(doc, "", "param_blocks");
  if (!blocks.is_array())
  {
    throw SchemaError("/param_blocks", "expected an array of block sizes");
  }
  for (std::size_t k = 0; k < blocks.size(); k++)
  {
    rom.param_blocks.push_back(Int(blocks[k], "/param_blocks/" + std::to_string(k)));
  }

  ReductionBasis basis;
  basis.v = matrix_from_json(Get(doc, "", "V"), "/V");
  if (basis.v.rows() != rom.full_order || basis.v.cols() != r)
  {
    throw SchemaError("/V", "expected an n x r array");
  }
  const Json &prov = Get(doc, "", "provenance");
  if (!prov.is_array() || static_cast<int>(prov.size()) != r)
  {
    throw SchemaError("/provenance", "expected r entries");
  }
  for (std::size_t k = 0; k < prov.size(); k++)
  {
    basis.provenance.push_back(TagFromJson(prov[k], "/provenance/" + std::to_string(k)));
  }
  Matrix mr = matrix_from_json(Get(doc, "", "M_r"), "/M_r");
  Matrix dr = matrix_from_json(Get(doc, "", "D_r"), "/D_r");
  Matrix br = matrix_from_json(Get(doc, "", "B_r"), "/B_r");
  Matrix cr = matrix_from_json(Get(doc, "", "C_r"), "/C_r");
  try
  {
    rom.reduced = ReducedModel(std::move(basis), std::move(mr), std::move(dr), std::move(br),
                               std::move(cr));
  }
  catch (const InvariantError &e)
  {
    throw SchemaError("", e.what());
  }

  if (doc.contains("samples"))
  {
    const Json &samples = doc["samples"];
    if (!samples.is_array())
    {
      throw SchemaError("/samples", "expected an array");
    }
    for (std::size_t i = 0; i < samples.size(); i++)
    {
      const std::string sp = "/samples/" + std::to_string(i);
      const Json &js = samples[i];
      SampleRecord rec;
      rec.p = VectorFromJson(Get(js, sp, "p"), sp + "/p");
      rec.order = Int(Get(js, sp, "order"), sp + "/order");
      const Json &shifts = Get(js, sp, "shifts");
      const Json &dirs = Get(js, sp, "directions");
      if (!shifts.is_array() || !dirs.is_array() || shifts.size() != dirs.size())
      {
        throw SchemaError(sp, "shifts and directions must be arrays of equal length");
      }
      for (std::size_t k = 0; k < shifts.size(); k++)
      {
        const std::string kp = sp + "/shifts/" + std::to_string(k);
        rec.interpolation.shifts.push_back(ComplexFromJson(shifts[k], kp));
        const Json &d = dirs[k];
        if (!d.is_array())
        {
          throw SchemaError(sp + "/directions/" + std::to_string(k), "expected an array");
        }
        ComplexVector dir(static_cast<Eigen::Index>(d.size()));
        for (std::size_t c = 0; c < d.size(); c++)
        {
          dir[static_cast<Eigen::Index>(c)] = ComplexFromJson(
              d[c], sp + "/directions/" + std::to_string(k) + "/" + std::to_string(c));
        }
        rec.interpolation.directions.push_back(std::move(dir));
      }
      rec.diagnostics.iterations = Int(Get(js, sp, "iterations"), sp + "/iterations");
      rec.diagnostics.converged = Get(js, sp, "converged").get<bool>();
      rec.diagnostics.final_movement = Real(Get(js, sp, "movement"), sp + "/movement");
      rec.diagnostics.null_vector_column = js.value("null_vector_column", false);
      rec.diagnostics.null_vector_forced = js.value("null_vector_forced", false);
      rom.samples.push_back(std::move(rec));
    }
  }
  return rom;
}

std::string dump_rom(const ParametricRom &rom)
{
  return rom_to_json(rom).dump(1) + "\n";
}

void save_rom(const ParametricRom &rom, const std::filesystem::path &path)
{
  write_text_file(path, dump_rom(rom));
}

ParametricRom load_rom(const std::filesystem::path &path)
{
  Json doc;
  try
  {
    doc = Json::parse(read_text_file(path));
  }
  catch (const Json::parse_error &e)
  {
    throw SchemaError("", std::string("not valid JSON: ") + e.what());
  }
  return rom_from_json(doc);
}

}  // namespace swingrom
