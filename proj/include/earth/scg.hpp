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

#include <vector>

#include "shiftnet.hpp"

namespace earth
{

  struct LaneShift
  {
    bool valid = false;
    unsigned shift_cnt = 0;

    bool operator==(const LaneShift&) const = default;
  };


  /// Per-lane shift distances for one strided reorganization. Lane i always
  /// indexes the compact (register-side) byte position: for a gather it is
  /// the destination and the source sits at i + shift_cnt; for a scatter it
  /// is the source and the destination is i + shift_cnt.
  struct ShiftPlan
  {
    NetDirection mode = NetDirection::Gather;
    std::vector<LaneShift> lanes;

    /// Route set this plan imposes on a network of the matching direction.
    std::vector<LaneRoute> routes() const
    {
      std::vector<LaneRoute> out;
      for (unsigned i = 0; i < lanes.size(); ++i)
        {
          if (not lanes[i].valid)
            continue;
          unsigned src = mode == NetDirection::Gather ? i + lanes[i].shift_cnt : i;
          out.push_back(LaneRoute{src, lanes[i].shift_cnt, true});
        }
      return out;
    }
  };


  /// Shift count generation:
  ///   shift_cnt[i] = (stride - eewb) * floor(i / eewb) + offset
  /// for every compact byte i < n_elems * eewb. Requires stride >= eewb and
  /// the whole strided footprint offset .. offset+(n-1)*stride+eewb inside
  /// the beat.
  inline ShiftPlan
  genShiftPlan(unsigned lanes, unsigned stride, unsigned eewb, unsigned offset,
               unsigned n_elems, NetDirection mode)
  {
    if (eewb == 0)
      throw Error(Errc::OverlappingElements, "element width must be positive");
    if (stride < eewb)
      throw Error(Errc::OverlappingElements, "stride " + std::to_string(stride) +
                  " smaller than element width " + std::to_string(eewb));
    if (n_elems > 0 and
        uint64_t(offset) + uint64_t(n_elems - 1) * stride + eewb > lanes)
      throw Error(Errc::OutOfBeat, "strided footprint leaves the beat");

    ShiftPlan plan;
    plan.mode = mode;
    plan.lanes.assign(lanes, LaneShift{});
    const unsigned gap = stride - eewb;
    for (unsigned i = 0; i < n_elems * eewb; ++i)
      plan.lanes[i] = LaneShift{true, gap * (i / eewb) + offset};
    return plan;
  }

  inline ShiftPlan
  genShiftPlan(const VectorConfig& cfg, unsigned stride, unsigned eewb, unsigned offset,
               unsigned n_elems, NetDirection mode)
  { return genShiftPlan(cfg.beat_bytes, stride, eewb, offset, n_elems, mode); }

}
