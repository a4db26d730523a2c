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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace earth
{

  enum class Pattern
    {
      UnitStride,
      Strided,
      Indexed,
      SegUnitStride,
      SegStrided,
      SegIndexed
    };

  enum class Direction { Load, Store };


  inline bool
  isSegment(Pattern p)
  { return p == Pattern::SegUnitStride or p == Pattern::SegStrided or p == Pattern::SegIndexed; }

  inline bool
  isIndexed(Pattern p)
  { return p == Pattern::Indexed or p == Pattern::SegIndexed; }

  inline bool
  hasStride(Pattern p)
  { return p == Pattern::Strided or p == Pattern::SegStrided; }


  inline std::string_view
  patternName(Pattern p)
  {
    switch (p)
      {
      case Pattern::UnitStride:    return "unit";
      case Pattern::Strided:       return "strided";
      case Pattern::Indexed:       return "indexed";
      case Pattern::SegUnitStride: return "seg_unit";
      case Pattern::SegStrided:    return "seg_strided";
      case Pattern::SegIndexed:    return "seg_indexed";
      }
    return "?";
  }

  inline std::optional<Pattern>
  parsePattern(std::string_view s)
  {
    for (Pattern p : {Pattern::UnitStride, Pattern::Strided, Pattern::Indexed,
                      Pattern::SegUnitStride, Pattern::SegStrided, Pattern::SegIndexed})
      if (patternName(p) == s)
        return p;
    return std::nullopt;
  }

  inline std::string_view
  directionName(Direction d)
  { return d == Direction::Load ? "load" : "store"; }


  /// One decoded vector memory instruction.
  struct VecMemInstr
  {
    Pattern pattern = Pattern::UnitStride;
    Direction dir = Direction::Load;
    uint64_t base = 0;
    int64_t stride = 0;               // Strided and SegStrided only.
    unsigned eew_bits = 8;
    unsigned vl = 0;
    unsigned fields = 1;              // Segment patterns only, else 1.
    unsigned emul = 1;
    unsigned vd = 0;
    std::vector<int64_t> indices;     // Indexed and SegIndexed only.
    std::vector<uint8_t> data;        // Optional register-group preload.

    unsigned eewb() const
    { return eew_bits / 8; }

    /// Number of registers written or read by the instruction.
    unsigned groupRegs() const
    { return fields * emul; }

    bool operator==(const VecMemInstr&) const = default;
  };


  /// Signed byte address of element i, field j (before range checking).
  inline int64_t
  elementAddressSigned(const VecMemInstr& in, unsigned i, unsigned j = 0)
  {
    const int64_t base = int64_t(in.base);
    const int64_t eewb = in.eewb();
    switch (in.pattern)
      {
      case Pattern::UnitStride:    return base + int64_t(i) * eewb;
      case Pattern::Strided:       return base + int64_t(i) * in.stride;
      case Pattern::Indexed:       return base + in.indices.at(i);
      case Pattern::SegUnitStride: return base + int64_t(i) * in.fields * eewb + int64_t(j) * eewb;
      case Pattern::SegStrided:    return base + int64_t(i) * in.stride + int64_t(j) * eewb;
      case Pattern::SegIndexed:    return base + in.indices.at(i) + int64_t(j) * eewb;
      }
    return base;
  }

  /// Byte address of element i, field j of a validated instruction.
  inline uint64_t
  elementAddress(const VecMemInstr& in, unsigned i, unsigned j = 0)
  { return uint64_t(elementAddressSigned(in, i, j)); }


  /// Largest address the simulator accepts (48-bit physical space).
  inline constexpr uint64_t max_address = (uint64_t(1) << 48) - 1;


  /// Check instruction invariants against a validated config. Returns the
  /// instruction unchanged on success; throws earth::Error otherwise.
  inline VecMemInstr
  validateInstr(const VectorConfig& cfg, const VecMemInstr& in)
  {
    const unsigned eew = in.eew_bits;
    if (eew != 8 and eew != 16 and eew != 32 and eew != 64)
      throw Error(Errc::BadEEW, "eew must be 8, 16, 32 or 64");
    if (eew > cfg.elen_bits)
      throw Error(Errc::BadEEW, "eew exceeds elen");
    if (in.emul != 1 and in.emul != 2 and in.emul != 4 and in.emul != 8)
      throw Error(Errc::BadEmul, "emul must be 1, 2, 4 or 8");
    if (isSegment(in.pattern))
      {
        if (in.fields < 1 or in.fields > 8)
          throw Error(Errc::BadFields, "segment fields must be in 1..8");
      }
    else if (in.fields != 1)
      throw Error(Errc::BadFields, "non-segment instruction must have fields=1");

    if (in.vd >= VectorConfig::n_vregs or in.vd + in.groupRegs() > VectorConfig::n_vregs)
      throw Error(Errc::RegGroupOverflow, "vd + fields*emul exceeds 32 registers");
    if (in.groupRegs() > VectorConfig::n_banks)
      throw Error(Errc::RegGroupOverflow, "fields*emul exceeds 8 registers");

    const uint64_t vlmax = uint64_t(in.emul) * cfg.vlenBytes() / in.eewb();
    if (in.vl > vlmax)
      throw Error(Errc::VlExceedsGroup, "vl exceeds emul*VLEN/EEW");
    if (isIndexed(in.pattern) and in.indices.size() != in.vl)
      throw Error(Errc::MissingIndices, "indexed instruction needs exactly vl indices");
    if (in.data.size() > size_t(in.groupRegs()) * cfg.vlenBytes())
      throw Error(Errc::RegGroupOverflow, "preload data larger than the register group");

    const unsigned beat = cfg.beat_bytes;
    for (unsigned i = 0; i < in.vl; ++i)
      for (unsigned j = 0; j < in.fields; ++j)
        {
          int64_t a = elementAddressSigned(in, i, j);
          if (a < 0 or uint64_t(a) + in.eewb() - 1 > max_address)
            throw Error(Errc::AddressOutOfRange,
                        "element " + std::to_string(i) + " field " + std::to_string(j) +
                        " address out of range");
          if (uint64_t(a) % beat + in.eewb() > beat)
            throw Error(Errc::MisalignedElement,
                        "element " + std::to_string(i) + " straddles a memory beat");
        }
    return in;
  }

}
