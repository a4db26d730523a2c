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

#include "earth/scg.hpp"

using namespace earth;

TEST(Scg, WorkedExample)
{
  // stride 4, 2-byte elements starting at byte 2 of a 16-byte beat.
  ShiftPlan p = genShiftPlan(16, 4, 2, 2, 4, NetDirection::Gather);
  std::vector<unsigned> expect{2, 2, 4, 4, 6, 6, 8, 8};
  for (unsigned i = 0; i < 8; ++i)
    {
      EXPECT_TRUE(p.lanes[i].valid);
      EXPECT_EQ(p.lanes[i].shift_cnt, expect[i]) << i;
    }
  for (unsigned i = 8; i < 16; ++i)
    EXPECT_FALSE(p.lanes[i].valid);
  auto r = p.routes();
  ASSERT_EQ(r.size(), 8u);
  EXPECT_EQ(r[0].src, 2u);
  EXPECT_EQ(r[1].src, 3u);
  EXPECT_EQ(r[7].src, 15u);
}

TEST(Scg, MatchesAddressEnumeration)
{
  const unsigned n = 32;
  for (unsigned e : {1u, 2u, 4u, 8u})
    for (unsigned s = e; s <= n; ++s)
      for (unsigned off = 0; off < n; ++off)
        for (unsigned k = 1; off + (k - 1) * s + e <= n; ++k)
          {
            ShiftPlan p = genShiftPlan(n, s, e, off, k, NetDirection::Gather);
            for (unsigned el = 0; el < k; ++el)
              for (unsigned b = 0; b < e; ++b)
                {
                  unsigned compact = el * e + b;
                  unsigned beatPos = off + el * s + b;
                  ASSERT_TRUE(p.lanes[compact].valid);
                  ASSERT_EQ(p.lanes[compact].shift_cnt, beatPos - compact);
                }
            for (unsigned i = k * e; i < n; ++i)
              ASSERT_FALSE(p.lanes[i].valid);
          }
}

TEST(Scg, UnitStrideIsPureOffset)
{
  ShiftPlan p = genShiftPlan(64, 4, 4, 8, 5, NetDirection::Gather);
  for (unsigned i = 0; i < 20; ++i)
    EXPECT_EQ(p.lanes[i].shift_cnt, 8u);
}

TEST(Scg, ScatterRoutesStartOnCompactLanes)
{
  ShiftPlan p = genShiftPlan(16, 4, 2, 2, 4, NetDirection::Scatter);
  auto r = p.routes();
  ASSERT_EQ(r.size(), 8u);
  for (unsigned i = 0; i < 8; ++i)
    EXPECT_EQ(r[i].src, i);
  EXPECT_EQ(r[7].target(ShiftNetwork(16, NetDirection::Scatter)), std::optional<unsigned>(15));
}

TEST(Scg, Errors)
{
  auto code = [](unsigned n, unsigned s, unsigned e, unsigned off, unsigned k) {
    try { genShiftPlan(n, s, e, off, k, NetDirection::Gather); }
    catch (const Error& x) { return x.code(); }
    return Errc::BadTrace;
  };
  EXPECT_EQ(code(16, 1, 2, 0, 2), Errc::OverlappingElements);
  EXPECT_EQ(code(16, 0, 1, 0, 2), Errc::OverlappingElements);
  EXPECT_EQ(code(16, 4, 0, 0, 2), Errc::OverlappingElements);
  EXPECT_EQ(code(16, 4, 2, 2, 5), Errc::OutOfBeat);          // Last element at 18..19.
  EXPECT_EQ(code(16, 4, 2, 15, 1), Errc::OutOfBeat);
  EXPECT_EQ(code(16, 4, 2, 2, 0), Errc::BadTrace);           // Empty plan is fine.
  EXPECT_EQ(genShiftPlan(pConfig(), 2, 1, 0, 32, NetDirection::Gather).lanes.size(), 64u);
}
