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

#include <deque>
#include <optional>

#include "scg.hpp"

namespace earth
{

  /// Control and data for one beat through the data reorganization module.
  struct DromRequest
  {
    NetDirection mode = NetDirection::Gather;
    unsigned stride = 1;
    unsigned eewb = 1;
    unsigned offset = 0;
    unsigned n_elems = 0;
    Lanes data;
  };


  /// Output of the planning half of the module: node controls for the
  /// network that will move the data, and the data masked to the lanes
  /// that take part.
  struct DromPlanned
  {
    NetDirection mode = NetDirection::Gather;
    NodeControl ctrl;
    Lanes data;
  };


  /// SCG plus control derivation. For a gather, only the strided source
  /// lanes of the incoming beat are kept; for a scatter, the input must be
  /// valid exactly on the compact prefix.
  inline DromPlanned
  dromPlan(const DromRequest& req)
  {
    const unsigned n = unsigned(req.data.size());
    ShiftPlan plan = genShiftPlan(n, req.stride, req.eewb, req.offset, req.n_elems, req.mode);
    ShiftNetwork net(n, req.mode);

    DromPlanned out;
    out.mode = req.mode;
    out.ctrl = planRoutes(net, plan.routes());
    out.data.assign(n, ByteLane{});

    const unsigned prefix = req.n_elems * req.eewb;
    for (unsigned c = 0; c < n; ++c)
      {
        bool wanted = out.ctrl.expect_valid[0][c];
        if (req.mode == NetDirection::Scatter and req.data[c].valid != (c < prefix))
          throw Error(Errc::ControlMismatch, "scatter input must be valid exactly on the compact prefix");
        if (wanted)
          {
            if (not req.data[c].valid)
              throw Error(Errc::ControlMismatch, "strided source lane " + std::to_string(c) + " is not valid");
            out.data[c] = req.data[c];
          }
      }
    return out;
  }


  inline Lanes
  dromRoute(const DromPlanned& p)
  {
    ShiftNetwork net(unsigned(p.data.size()), p.mode);
    return route(net, p.ctrl, p.data);
  }


  /// Compact stride-separated elements of a beat to lanes 0..n*eewb-1.
  inline Lanes
  dromGather(const DromRequest& req)
  {
    if (req.mode != NetDirection::Gather)
      throw Error(Errc::ControlMismatch, "dromGather needs a gather request");
    return dromRoute(dromPlan(req));
  }


  /// Spread compact lanes 0..n*eewb-1 to columns offset + e*stride + b.
  inline Lanes
  dromScatter(const DromRequest& req)
  {
    if (req.mode != NetDirection::Scatter)
      throw Error(Errc::ControlMismatch, "dromScatter needs a scatter request");
    return dromRoute(dromPlan(req));
  }


  /// Node-control buffer and data buffer between the planning half and the
  /// routing half. Both buffers move in lockstep, so one queue of planned
  /// entries models them.
  class DromStage
  {
  public:
    explicit DromStage(unsigned depth = 1)
      : depth_(depth)
    { }

    unsigned depth() const     { return depth_; }
    unsigned occupancy() const { return unsigned(entries_.size()); }

    /// One clock: when downstream is ready the oldest buffered entry is
    /// routed and returned, then the incoming request (if any) is planned
    /// and buffered. An entry pushed on step t emerges on step t+1 at the
    /// earliest.
    std::optional<Lanes> step(const std::optional<DromRequest>& incoming, bool downstream_ready = true)
    {
      const bool drains = downstream_ready and not entries_.empty();
      if (incoming and entries_.size() - (drains ? 1 : 0) >= depth_)
        throw Error(Errc::StageFull, "DROM stage buffers are full");

      std::optional<Lanes> out;
      if (drains)
        {
          out = dromRoute(entries_.front());
          entries_.pop_front();
        }
      if (incoming)
        entries_.push_back(dromPlan(*incoming));
      return out;
    }

  private:
    unsigned depth_;
    std::deque<DromPlanned> entries_;
  };

}
