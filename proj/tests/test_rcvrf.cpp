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


#include <gtest/gtest.h>

#include <random>

#include "earth/rcvrf.hpp"

using namespace earth;

namespace
{
  /// Architectural register file as one flat byte array.
  struct FlatRegs
  {
    unsigned vlenb;
    std::vector<uint8_t> bytes;

    explicit FlatRegs(const VectorConfig& c)
      : vlenb(c.vlenBytes()), bytes(size_t(32) * c.vlenBytes(), 0)
    { }

    uint8_t& at(unsigned reg, unsigned byte)
    { return bytes[size_t(reg) * vlenb + byte]; }
  };

  std::vector<uint8_t> randomRow(std::mt19937_64& rng, unsigned n)
  {
    std::vector<uint8_t> r(n);
    for (auto& b : r)
      b = uint8_t(rng());
    return r;
  }

  ColumnSpec randomColumn(std::mt19937_64& rng, const VectorConfig& cfg)
  {
    ColumnSpec c;
    c.emul = 1u << (rng() % 4);
    c.n_fields = 1 + unsigned(rng() % (8 / c.emul));
    c.base_vreg = unsigned(rng() % (32 - (c.n_fields - 1) * c.emul));
    c.block = unsigned(rng() % cfg.blocksPerReg());
    c.eewb = 1u << (rng() % 4);
    if (c.eewb > cfg.elenBytes())
      c.eewb = cfg.elenBytes();
    c.elem_byte_offset = unsigned(rng() % (cfg.elenBytes() / c.eewb)) * c.eewb;
    return c;
  }
}

TEST(Rcvrf, BlockCircularShift)
{
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  EXPECT_EQ(blockCircularShift(v, 1), (std::vector<int>{7, 0, 1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(blockCircularShift(v, -2), (std::vector<int>{2, 3, 4, 5, 6, 7, 0, 1}));
  EXPECT_EQ(blockCircularShift(v, 8), v);
  EXPECT_EQ(blockCircularShift(blockCircularShift(v, 5), -5), v);
}

TEST(Rcvrf, FirstRegistersSitOnTheDiagonal)
{
  VectorConfig cfg = pConfig();
  EXPECT_EQ(mapBlock(cfg, 0, 0), (BankSlot{0, 0}));
  EXPECT_EQ(mapBlock(cfg, 1, 0), (BankSlot{1, 1}));
  EXPECT_EQ(mapBlock(cfg, 7, 0), (BankSlot{7, 7}));
  EXPECT_EQ(mapBlock(cfg, 1, 7), (BankSlot{0, 1}));   // Wraps to bank 0 in its own row.

  ShiftedVRF vrf(cfg);
  std::vector<uint8_t> row(64);
  for (unsigned b = 0; b < 64; ++b)
    row[b] = uint8_t(b);
  vrf.writeRow(1, row);
  auto blk = vrf.peek({1, 1});
  EXPECT_EQ(blk[0], 0);
  EXPECT_EQ(vrf.peek({0, 1})[0], 56);                 // Block 7 of v1.
}

TEST(Rcvrf, RowAccessTouchesEveryBankOnce)
{
  for (VectorConfig cfg : {pConfig(), eConfig()})
    {
      ShiftedVRF vrf(cfg);
      std::mt19937_64 rng(1);
      for (unsigned r = 0; r < 32; ++r)
        {
          vrf.writeRow(r, randomRow(rng, cfg.vlenBytes()));
          for (unsigned n : vrf.lastBankAccesses())
            EXPECT_LE(n, 1u);
          vrf.readRow(r);
          unsigned total = 0;
          for (unsigned n : vrf.lastBankAccesses())
            total += n;
          EXPECT_EQ(total, cfg.blocksPerReg());
        }
    }
}

TEST(Rcvrf, RowsRoundTrip)
{
  for (VectorConfig cfg : {pConfig(), eConfig()})
    {
      ShiftedVRF vrf(cfg);
      FlatRegs ref(cfg);
      std::mt19937_64 rng(2);
      for (int t = 0; t < 300; ++t)
        {
          unsigned r = unsigned(rng() % 32);
          Lanes l(cfg.vlenBytes());
          for (unsigned b = 0; b < l.size(); ++b)
            if (rng() % 3)
              {
                l[b] = ByteLane{true, uint8_t(rng())};
                ref.at(r, b) = l[b].payload;
              }
          vrf.writeRow(r, l);
        }
      for (unsigned r = 0; r < 32; ++r)
        {
          auto row = vrf.readRow(r);
          for (unsigned b = 0; b < cfg.vlenBytes(); ++b)
            ASSERT_EQ(row[b], ref.at(r, b));
        }
    }
}

TEST(Rcvrf, ColumnsMatchFlatReference)
{
  for (VectorConfig cfg : {pConfig(), eConfig()})
    {
      ShiftedVRF vrf(cfg);
      FlatRegs ref(cfg);
      std::mt19937_64 rng(3);
      for (unsigned r = 0; r < 32; ++r)
        {
          auto row = randomRow(rng, cfg.vlenBytes());
          vrf.writeRow(r, row);
          std::copy(row.begin(), row.end(), ref.bytes.begin() + size_t(r) * cfg.vlenBytes());
        }
      const unsigned eb = cfg.elenBytes();
      for (int t = 0; t < 3000; ++t)
        {
          ColumnSpec c = randomColumn(rng, cfg);
          const unsigned byte0 = c.block * eb + c.elem_byte_offset;
          if (rng() % 2)
            {
              auto got = vrf.readColumn(c);
              ASSERT_EQ(got.size(), size_t(c.n_fields) * c.eewb);
              for (unsigned f = 0; f < c.n_fields; ++f)
                for (unsigned b = 0; b < c.eewb; ++b)
                  ASSERT_EQ(got[f * c.eewb + b], ref.at(c.base_vreg + f * c.emul, byte0 + b));
            }
          else
            {
              auto data = randomRow(rng, c.n_fields * c.eewb);
              vrf.writeColumn(c, data);
              for (unsigned f = 0; f < c.n_fields; ++f)
                for (unsigned b = 0; b < c.eewb; ++b)
                  ref.at(c.base_vreg + f * c.emul, byte0 + b) = data[f * c.eewb + b];
            }
          for (unsigned n : vrf.lastBankAccesses())
            ASSERT_LE(n, 1u);   // One parallel access, no bank conflict.
        }
      for (unsigned r = 0; r < 32; ++r)
        {
          auto row = vrf.readRow(r);
          for (unsigned b = 0; b < cfg.vlenBytes(); ++b)
            ASSERT_EQ(row[b], ref.at(r, b)) << "v" << r << " byte " << b;
        }
    }
}

TEST(Rcvrf, SegmentColumnOfTwoFields)
{
  // Element 3 of v8 and v9 (1-byte elements, 8-byte blocks).
  VectorConfig cfg = pConfig();
  ShiftedVRF vrf(cfg);
  vrf.writeColumn({8, 2, 1, 0, 3, 1}, std::vector<uint8_t>{0x11, 0x22});
  EXPECT_EQ(vrf.readRow(8)[3], 0x11);
  EXPECT_EQ(vrf.readRow(9)[3], 0x22);
  EXPECT_EQ(vrf.readRow(8)[2], 0);
}

TEST(Rcvrf, Errors)
{
  ShiftedVRF vrf(pConfig());
  EXPECT_THROW(vrf.readRow(32), Error);
  EXPECT_THROW(vrf.writeRow(0, Lanes(10)), Error);
  EXPECT_THROW(vrf.readColumn({30, 3, 1, 0, 0, 1}), Error);   // Runs past v31.
  EXPECT_THROW(vrf.readColumn({0, 3, 4, 0, 0, 1}), Error);    // 12 registers.
  EXPECT_THROW(vrf.readColumn({0, 2, 1, 8, 0, 1}), Error);    // Block out of range.
  EXPECT_THROW(vrf.readColumn({0, 2, 1, 0, 6, 4}), Error);    // Element leaves its block.
  EXPECT_THROW(vrf.writeColumn({0, 2, 1, 0, 0, 1}, std::vector<uint8_t>{1}), Error);
  EXPECT_NO_THROW(vrf.readColumn({29, 3, 1, 0, 0, 1}));
}

TEST(Rcvrf, DumpListsRegistersInOrder)
{
  ShiftedVRF vrf(eConfig());
  std::vector<uint8_t> row(32, 0);
  row[0] = 0xab;
  vrf.writeRow(5, row);
  std::string d = vrf.dumpText();
  EXPECT_NE(d.find("v5: ab00"), std::string::npos);
  EXPECT_EQ(d.find("v0: "), 0u);
}
