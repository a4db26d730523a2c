// Copyright 2026 The earthsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bench.hpp"

namespace earth
{

  namespace detail
  {
    inline std::string
    toHex(const std::vector<uint8_t>& bytes)
    {
      static const char* digits = "0123456789abcdef";
      std::string s;
      for (uint8_t b : bytes)
        {
          s += digits[b >> 4];
          s += digits[b & 15];
        }
      return s;
    }

    inline std::vector<uint8_t>
    fromHex(const std::string& s)
    {
      auto nib = [&](char c) -> unsigned {
        if (c >= '0' and c <= '9') return c - '0';
        if (c >= 'a' and c <= 'f') return c - 'a' + 10;
        if (c >= 'A' and c <= 'F') return c - 'A' + 10;
        throw Error(Errc::BadTrace, "bad hex digit in data");
      };
      if (s.size() % 2)
        throw Error(Errc::BadTrace, "odd-length hex data");
      std::vector<uint8_t> out;
      for (size_t k = 0; k < s.size(); k += 2)
        out.push_back(uint8_t(nib(s[k]) << 4 | nib(s[k + 1])));
      return out;
    }
  }


  inline nlohmann::json
  instrToJson(const VecMemInstr& in)
  {
    nlohmann::json j;
    j["pattern"] = patternName(in.pattern);
    j["dir"] = directionName(in.dir);
    j["base"] = in.base;
    j["stride"] = in.stride;
    j["eew"] = in.eew_bits;
    j["vl"] = in.vl;
    j["fields"] = in.fields;
    j["emul"] = in.emul;
    j["vd"] = in.vd;
    if (isIndexed(in.pattern))
      j["indices"] = in.indices;
    if (not in.data.empty())
      j["data"] = detail::toHex(in.data);
    return j;
  }

  /// Decode one trace object. Structural problems raise BadTrace; semantic
  /// checks are left to validateInstr.
  inline VecMemInstr
  instrFromJson(const nlohmann::json& j)
  {
    if (not j.is_object())
      throw Error(Errc::BadTrace, "trace line is not an object");
    for (auto& [key, v] : j.items())
      if (key != "pattern" and key != "dir" and key != "base" and key != "stride" and key != "eew"
          and key != "vl" and key != "fields" and key != "emul" and key != "vd" and key != "indices"
          and key != "data")
        throw Error(Errc::BadTrace, "unknown trace field '" + key + "'");
    try
      {
        VecMemInstr in;
        auto p = parsePattern(j.at("pattern").get<std::string>());
        if (not p)
          throw Error(Errc::BadTrace, "unknown pattern '" + j.at("pattern").get<std::string>() + "'");
        in.pattern = *p;
        std::string d = j.value("dir", std::string("load"));
        if (d != "load" and d != "store")
          throw Error(Errc::BadTrace, "unknown dir '" + d + "'");
        in.dir = d == "load" ? Direction::Load : Direction::Store;
        in.base = j.value("base", uint64_t(0));
        in.stride = j.value("stride", int64_t(0));
        in.eew_bits = j.value("eew", 8u);
        in.vl = j.at("vl").get<unsigned>();
        in.fields = j.value("fields", 1u);
        in.emul = j.value("emul", 1u);
        in.vd = j.value("vd", 0u);
        if (j.contains("indices"))
          in.indices = j.at("indices").get<std::vector<int64_t>>();
        if (j.contains("data"))
          in.data = detail::fromHex(j.at("data").get<std::string>());
        return in;
      }
    catch (const nlohmann::json::exception& e)
      {
        throw Error(Errc::BadTrace, e.what());
      }
  }

  /// One JSON object per line; blank lines are skipped.
  inline std::vector<VecMemInstr>
  readTrace(std::istream& is)
  {
    std::vector<VecMemInstr> out;
    std::string line;
    size_t n = 0;
    while (std::getline(is, line))
      {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
          continue;
        try
          {
            out.push_back(instrFromJson(nlohmann::json::parse(line)));
          }
        catch (const nlohmann::json::exception& e)
          {
            throw Error(Errc::BadTrace, "line " + std::to_string(n) + ": " + e.what());
          }
        catch (const Error& e)
          {
            throw Error(e.code(), "line " + std::to_string(n) + ": " + e.what());
          }
      }
    return out;
  }

  inline std::vector<VecMemInstr>
  loadTrace(const std::string& path)
  {
    std::ifstream f(path);
    if (not f)
      throw Error(Errc::BadTrace, "cannot open trace '" + path + "'");
    return readTrace(f);
  }

  inline void
  writeTrace(std::ostream& os, std::span<const VecMemInstr> trace)
  {
    for (auto& in : trace)
      os << instrToJson(in).dump() << '\n';
  }


  inline nlohmann::json
  metricsToJson(const Metrics& m)
  {
    nlohmann::json j;
    j["instrs"] = m.instrs;
    j["mem_requests"] = m.mem_requests;
    j["beats_transferred"] = m.beats_transferred;
    j["sim_cycles"] = m.sim_cycles;
    j["vrf_accesses"] = m.vrf_accesses;
    nlohmann::json pp = nlohmann::json::object();
    for (auto& [p, c] : m.per_pattern)
      pp[std::string(patternName(p))] = {{"instrs", c.instrs}, {"mem_requests", c.mem_requests}};
    j["per_pattern"] = pp;
    return j;
  }

  inline nlohmann::json
  reportToJson(const RunReport& rep)
  {
    nlohmann::json j;
    j["pattern"] = rep.point.pattern;
    j["param"] = rep.point.param;
    j["intensity"] = rep.point.intensity;
    j["seed"] = rep.seed;
    j["config"] = {{"vlen", rep.cfg.vlen_bits}, {"elen", rep.cfg.elen_bits},
                   {"dlen", rep.cfg.dlen_bits}, {"mlen", rep.cfg.mlen_bits}};
    nlohmann::json models = nlohmann::json::object();
    for (auto& r : rep.results)
      {
        auto mj = metricsToJson(r.metrics);
        mj["request_reduction_vs_elementwise"] = rep.requestReduction(r.model);
        mj["speedup_vs_elementwise"] = rep.speedup(r.model);
        models[std::string(modelName(r.model))] = mj;
      }
    j["models"] = models;
    return j;
  }

}
