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

#include <array>
#include <cstdint>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "drom.hpp"

namespace earth
{

  /// Rotate a bank-wide vector of blocks: element p of the result is
  /// element (p - amount) mod size of the input, so +1 moves the last
  /// block to the front.
  template <typename T>
  std::vector<T>
  blockCircularShift(std::span<const T> blocks, int amount)
  {
    const int n = int(blocks.size());
    std::vector<T> out(blocks.size());
    if (n == 0)
      return out;
    const int a = ((amount % n) + n) % n;
    for (int p = 0; p < n; ++p)
      out[p] = blocks[(p - a + n) % n];
    return out;
  }

  template <typename T>
  std::vector<T>
  blockCircularShift(const std::vector<T>& blocks, int amount)
  { return blockCircularShift(std::span<const T>(blocks), amount); }


  /// One column access: the same element of n_fields registers starting at
  /// base_vreg and spaced emul registers apart.
  struct ColumnSpec
  {
    unsigned base_vreg = 0;
    unsigned n_fields = 1;
    unsigned emul = 1;
    unsigned block = 0;             // ELEN block holding the element.
    unsigned elem_byte_offset = 0;  // Byte of the element inside that block.
    unsigned eewb = 1;

    bool operator==(const ColumnSpec&) const = default;
  };


  /// Register file split into 8 ELEN-wide banks of n_rows rows, with
  /// registers laid out by mapBlock. Supports whole-register (row) access
  /// and same-element-across-registers (column) access, each touching
  /// every bank at most once.
  class ShiftedVRF
  {
  public:
    static constexpr unsigned n_banks = VectorConfig::n_banks;
    using Block = std::vector<uint8_t>;

    explicit ShiftedVRF(const VectorConfig& cfg)
      : cfg_(cfg),
        storage_(size_t(n_banks) * cfg.n_rows * cfg.elenBytes(), 0)
    { }

    const VectorConfig& config() const
    { return cfg_; }

    /// Contents of one bank slot, without counting an access.
    Block peek(BankSlot s) const
    {
      auto it = storage_.begin() + blockIndex(s);
      return Block(it, it + cfg_.elenBytes());
    }

    /// Bank access counts of the most recent row or column operation.
    const std::array<unsigned, n_banks>& lastBankAccesses() const
    { return lastAccess_; }

    std::vector<uint8_t> readRow(unsigned reg)
    {
      checkReg(reg);
      beginAccess();
      const unsigned eb = cfg_.elenBytes();
      std::vector<Lanes> byBank(n_banks, Lanes(eb));
      for (unsigned j = 0; j < cfg_.blocksPerReg(); ++j)
        {
          BankSlot s = mapBlock(cfg_, reg, j);
          byBank[s.bank] = toLanes(readBlock(s));
        }
      auto ordered = blockCircularShift(byBank, -int(reg % n_banks));
      std::vector<uint8_t> out;
      out.reserve(cfg_.vlenBytes());
      for (unsigned j = 0; j < cfg_.blocksPerReg(); ++j)
        for (const auto& l : ordered[j])
          out.push_back(l.payload);
      return out;
    }

    /// Write the valid lanes of value (VLEN/8 lanes) into register reg.
    void writeRow(unsigned reg, const Lanes& value)
    {
      checkReg(reg);
      if (value.size() != cfg_.vlenBytes())
        throw Error(Errc::OutOfBeat, "row write needs VLEN/8 lanes");
      beginAccess();
      const unsigned eb = cfg_.elenBytes();
      std::vector<Lanes> ordered(n_banks, Lanes(eb));
      for (unsigned j = 0; j < cfg_.blocksPerReg(); ++j)
        for (unsigned b = 0; b < eb; ++b)
          ordered[j][b] = value[j * eb + b];
      auto byBank = blockCircularShift(ordered, int(reg % n_banks));
      for (unsigned j = 0; j < cfg_.blocksPerReg(); ++j)
        {
          BankSlot s = mapBlock(cfg_, reg, j);
          writeBlock(s, byBank[s.bank]);
        }
    }

    void writeRow(unsigned reg, std::span<const uint8_t> value)
    {
      Lanes l(value.size());
      for (size_t i = 0; i < value.size(); ++i)
        l[i] = ByteLane{true, value[i]};
      writeRow(reg, l);
    }

    /// Read the addressed element of every field register; returns
    /// n_fields * eewb bytes in ascending field order.
    std::vector<uint8_t> readColumn(const ColumnSpec& spec)
    {
      checkColumn(spec);
      beginAccess();
      const unsigned eb = cfg_.elenBytes();

      // One parallel access: each bank reads the row of the field mapped to it.
      std::vector<Lanes> byBank(n_banks, Lanes(eb));
      for (unsigned f = 0; f < spec.n_fields; ++f)
        {
          BankSlot s = mapBlock(cfg_, fieldReg(spec, f), spec.block);
          byBank[s.bank] = toLanes(readBlock(s));
        }
      // Field f lands at block position f*emul.
      auto ordered = blockCircularShift(byBank, -int((spec.base_vreg + spec.block) % n_banks));
      Lanes flat;
      flat.reserve(size_t(n_banks) * eb);
      for (const auto& blk : ordered)
        flat.insert(flat.end(), blk.begin(), blk.end());
      for (unsigned p = 0; p < n_banks; ++p)
        if (p % spec.emul != 0 or p / spec.emul >= spec.n_fields)
          for (unsigned b = 0; b < eb; ++b)
            flat[p * eb + b] = ByteLane{};

      DromRequest req{NetDirection::Gather, spec.emul * eb, spec.eewb, spec.elem_byte_offset,
                      spec.n_fields, std::move(flat)};
      Lanes packed = dromGather(req);
      std::vector<uint8_t> out(size_t(spec.n_fields) * spec.eewb);
      for (size_t i = 0; i < out.size(); ++i)
        out[i] = packed[i].payload;
      return out;
    }

    /// Inverse of readColumn: packed holds n_fields * eewb bytes.
    void writeColumn(const ColumnSpec& spec, std::span<const uint8_t> packed)
    {
      checkColumn(spec);
      if (packed.size() != size_t(spec.n_fields) * spec.eewb)
        throw Error(Errc::OutOfBeat, "column write needs n_fields*eewb bytes");
      beginAccess();
      const unsigned eb = cfg_.elenBytes();
      Lanes flat(size_t(n_banks) * eb);
      for (size_t i = 0; i < packed.size(); ++i)
        flat[i] = ByteLane{true, packed[i]};

      DromRequest req{NetDirection::Scatter, spec.emul * eb, spec.eewb, spec.elem_byte_offset,
                      spec.n_fields, std::move(flat)};
      Lanes spread = dromScatter(req);
      std::vector<Lanes> ordered(n_banks);
      for (unsigned p = 0; p < n_banks; ++p)
        ordered[p].assign(spread.begin() + p * eb, spread.begin() + (p + 1) * eb);
      auto byBank = blockCircularShift(ordered, int((spec.base_vreg + spec.block) % n_banks));
      for (unsigned f = 0; f < spec.n_fields; ++f)
        {
          BankSlot s = mapBlock(cfg_, fieldReg(spec, f), spec.block);
          writeBlock(s, byBank[s.bank]);
        }
    }

    /// Registers in architectural order, one "vN: hex" line each.
    std::string dumpText()
    {
      std::ostringstream os;
      for (unsigned r = 0; r < VectorConfig::n_vregs; ++r)
        {
          os << 'v' << r << ": ";
          for (uint8_t b : readRow(r))
            os << std::hex << std::setw(2) << std::setfill('0') << unsigned(b);
          os << std::dec << '\n';
        }
      return os.str();
    }

  private:
    static unsigned fieldReg(const ColumnSpec& spec, unsigned f)
    { return spec.base_vreg + f * spec.emul; }

    void checkReg(unsigned reg) const
    {
      if (reg >= VectorConfig::n_vregs)
        throw Error(Errc::FieldOverflow, "register index " + std::to_string(reg));
    }

    void checkColumn(const ColumnSpec& spec) const
    {
      if (spec.n_fields == 0 or spec.emul == 0 or
          spec.base_vreg + (spec.n_fields - 1) * spec.emul >= VectorConfig::n_vregs)
        throw Error(Errc::FieldOverflow, "column access runs past v31");
      if (spec.n_fields * spec.emul > n_banks)
        throw Error(Errc::FieldOverflow, "column access spans more than 8 registers");
      if (spec.block >= cfg_.blocksPerReg() or spec.eewb == 0 or
          spec.elem_byte_offset + spec.eewb > cfg_.elenBytes())
        throw Error(Errc::OutOfBeat, "column element outside its ELEN block");
    }

    void beginAccess()
    { lastAccess_.fill(0); }

    size_t blockIndex(BankSlot s) const
    { return (size_t(s.bank) * cfg_.n_rows + s.row) * cfg_.elenBytes(); }

    Block readBlock(BankSlot s)
    {
      ++lastAccess_[s.bank];
      auto it = storage_.begin() + blockIndex(s);
      return Block(it, it + cfg_.elenBytes());
    }

    void writeBlock(BankSlot s, const Lanes& data)
    {
      ++lastAccess_[s.bank];
      size_t at = blockIndex(s);
      for (unsigned b = 0; b < cfg_.elenBytes(); ++b)
        if (data[b].valid)
          storage_[at + b] = data[b].payload;
    }

    static Lanes toLanes(const Block& blk)
    {
      Lanes l(blk.size());
      for (size_t i = 0; i < blk.size(); ++i)
        l[i] = ByteLane{true, blk[i]};
      return l;
    }

    VectorConfig cfg_;
    std::vector<uint8_t> storage_;   // [bank][row][byte]
    std::array<unsigned, n_banks> lastAccess_{};
  };

}
