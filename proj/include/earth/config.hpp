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

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace earth
{

  /// One byte position of a datapath: a payload that is meaningful only
  /// when valid is set.
  struct ByteLane
  {
    bool valid = false;
    uint8_t payload = 0;

    bool operator==(const ByteLane&) const = default;
  };

  using Lanes = std::vector<ByteLane>;


  /// Vector unit geometry. The four widths are inputs; n_rows and
  /// beat_bytes are filled in by validateConfig.
  struct VectorConfig
  {
    static constexpr unsigned n_vregs = 32;
    static constexpr unsigned n_banks = 8;

    unsigned vlen_bits = 512;
    unsigned elen_bits = 64;
    unsigned dlen_bits = 512;   // Recorded only; no datapath is gated by it.
    unsigned mlen_bits = 512;

    unsigned n_rows = 0;
    unsigned beat_bytes = 0;

    unsigned vlenBytes() const     { return vlen_bits / 8; }
    unsigned elenBytes() const     { return elen_bits / 8; }
    unsigned blocksPerReg() const  { return vlen_bits / elen_bits; }

    bool operator==(const VectorConfig&) const = default;
  };


  /// Location of one ELEN block inside the shifted register file.
  struct BankSlot
  {
    unsigned bank = 0;
    unsigned row = 0;

    bool operator==(const BankSlot&) const = default;
  };


  /// Circular-shifted mapping of (register, ELEN block) to (bank, row).
  /// The row depends only on the register; consecutive blocks of a register
  /// land in consecutive banks.
  inline BankSlot
  mapBlock(const VectorConfig& cfg, unsigned reg, unsigned block)
  {
    const unsigned nb = VectorConfig::n_banks;
    BankSlot slot;
    slot.bank = (reg + block) % nb;
    slot.row = ((reg / nb) * cfg.blocksPerReg() + reg % nb) % cfg.n_rows;
    return slot;
  }


  /// Check the raw widths and populate derived geometry. Throws earth::Error.
  inline VectorConfig
  validateConfig(VectorConfig raw)
  {
    auto pow2 = [](unsigned v) { return v != 0 && std::has_single_bit(v); };
    if (not pow2(raw.vlen_bits) or not pow2(raw.elen_bits) or not pow2(raw.mlen_bits))
      throw Error(Errc::NonPowerOfTwo, "vlen, elen and mlen must be powers of two");
    if (raw.elen_bits < 8 or raw.mlen_bits < 8)
      throw Error(Errc::InconsistentWidths, "elen and mlen must be at least 8 bits");
    if (raw.elen_bits > raw.vlen_bits)
      throw Error(Errc::InconsistentWidths, "elen exceeds vlen");
    if (raw.elen_bits > raw.mlen_bits)
      throw Error(Errc::InconsistentWidths, "elen exceeds mlen");
    if (raw.dlen_bits == 0)
      throw Error(Errc::InconsistentWidths, "dlen must be positive");

    uint64_t cap = uint64_t(raw.vlen_bits) * VectorConfig::n_vregs;
    uint64_t per_row = uint64_t(raw.elen_bits) * VectorConfig::n_banks;
    if (cap % per_row != 0 or cap / per_row == 0)
      throw Error(Errc::NonIntegralRows, "vlen*32/(elen*8) is not a positive integer");

    VectorConfig cfg = raw;
    cfg.n_rows = unsigned(cap / per_row);
    cfg.beat_bytes = raw.mlen_bits / 8;

    // The mapping must place every block of the file in a distinct slot.
    std::vector<char> used(size_t(cfg.n_rows) * VectorConfig::n_banks, 0);
    for (unsigned i = 0; i < VectorConfig::n_vregs; ++i)
      for (unsigned j = 0; j < cfg.blocksPerReg(); ++j)
        {
          BankSlot s = mapBlock(cfg, i, j);
          char& u = used.at(size_t(s.row) * VectorConfig::n_banks + s.bank);
          if (u)
            throw Error(Errc::NonBijectiveMapping,
                        "register blocks collide in the shifted register file "
                        "(vlen/elen must not exceed the bank count)");
          u = 1;
        }
    return cfg;
  }


  /// Parse flat "key=value" text (vlen, elen, mlen, dlen). Keys are case
  /// insensitive; '#' starts a comment. The result is validated.
  inline VectorConfig
  parseConfig(std::istream& in)
  {
    VectorConfig cfg;
    std::string line;
    unsigned lineNum = 0;
    while (std::getline(in, line))
      {
        ++lineNum;
        if (auto hash = line.find('#'); hash != std::string::npos)
          line.erase(hash);
        auto trim = [](std::string s) {
          auto ws = [](unsigned char c) { return std::isspace(c); };
          s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
          s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
          return s;
        };
        line = trim(line);
        if (line.empty())
          continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
          throw Error(Errc::BadConfigValue, "line " + std::to_string(lineNum) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return char(std::tolower(c)); });

        unsigned long num = 0;
        try
          {
            size_t used = 0;
            num = std::stoul(val, &used, 0);
            if (used != val.size())
              throw std::invalid_argument(val);
          }
        catch (const std::exception&)
          {
            throw Error(Errc::BadConfigValue, "line " + std::to_string(lineNum) + ": bad number '" + val + "'");
          }

        if (key == "vlen")       cfg.vlen_bits = unsigned(num);
        else if (key == "elen")  cfg.elen_bits = unsigned(num);
        else if (key == "mlen")  cfg.mlen_bits = unsigned(num);
        else if (key == "dlen")  cfg.dlen_bits = unsigned(num);
        else
          throw Error(Errc::BadConfigKey, "line " + std::to_string(lineNum) + ": unknown key '" + key + "'");
      }
    return validateConfig(cfg);
  }


  inline VectorConfig
  parseConfigString(const std::string& text)
  {
    std::istringstream iss(text);
    return parseConfig(iss);
  }


  inline VectorConfig
  loadConfig(const std::string& path)
  {
    std::ifstream in(path);
    if (not in)
      throw Error(Errc::BadConfigValue, "cannot open config file " + path);
    return parseConfig(in);
  }


  /// Performance-oriented geometry: VLEN=DLEN=MLEN=512.
  inline VectorConfig
  pConfig()
  { return validateConfig(VectorConfig{512, 64, 512, 512}); }

  /// Efficiency-oriented geometry: VLEN=256, DLEN=MLEN=128.
  inline VectorConfig
  eConfig()
  { return validateConfig(VectorConfig{256, 64, 128, 128}); }

}
