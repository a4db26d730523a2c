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
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"

namespace earth
{

  /// Gather networks move lanes toward column 0, scatter networks away
  /// from it. Both are the same layered graph mirrored.
  enum class NetDirection { Gather, Scatter };


  /// Layered node-link shift fabric over n byte lanes. Node layer 0 holds
  /// input nodes, the last node layer output nodes, and each link layer
  /// joins two node layers with a straight link per column and a diagonal
  /// link of one power-of-two span that never wraps around. A gather
  /// network applies spans 1, 2, 4, ... in order; a scatter network is its
  /// mirror and applies them largest first.
  class ShiftNetwork
  {
  public:
    ShiftNetwork(unsigned lanes, NetDirection dir)
      : lanes_(lanes), dir_(dir)
    {
      if (lanes == 0 or not std::has_single_bit(lanes))
        throw Error(Errc::NonPowerOfTwo, "shift network lane count must be a power of two");
    }

    unsigned lanes() const             { return lanes_; }
    NetDirection direction() const     { return dir_; }
    unsigned linkLayers() const        { return unsigned(std::countr_zero(lanes_)); }
    unsigned nodeLayers() const        { return linkLayers() + 1; }

    /// Bit of shift_cnt that link layer l consumes.
    unsigned shiftBit(unsigned l) const
    { return dir_ == NetDirection::Gather ? l : linkLayers() - 1 - l; }

    /// Columns spanned by the diagonal links of link layer l.
    unsigned span(unsigned l) const
    { return 1u << shiftBit(l); }

    /// Column reached from column col through the diagonal link of link
    /// layer l, or nullopt when that link does not exist.
    std::optional<unsigned> diagonal(unsigned col, unsigned l) const
    {
      const unsigned d = span(l);
      if (dir_ == NetDirection::Gather)
        return col >= d ? std::optional<unsigned>(col - d) : std::nullopt;
      return col + d < lanes_ ? std::optional<unsigned>(col + d) : std::nullopt;
    }

  private:
    unsigned lanes_;
    NetDirection dir_;
  };


  /// A lane entering the network at column src that must travel shift_cnt
  /// columns in the network's direction.
  struct LaneRoute
  {
    unsigned src = 0;
    unsigned shift_cnt = 0;
    bool valid = true;

    /// Route taking a lane from column src to column dst, shift |src - dst|.
    static LaneRoute between(unsigned src, unsigned dst)
    { return LaneRoute{src, src > dst ? src - dst : dst - src, true}; }

    /// Destination column, or nullopt when it falls outside 0..lanes-1.
    std::optional<unsigned> target(const ShiftNetwork& net) const
    {
      if (net.direction() == NetDirection::Gather)
        return src >= shift_cnt ? std::optional<unsigned>(src - shift_cnt) : std::nullopt;
      uint64_t t = uint64_t(src) + shift_cnt;
      return t < net.lanes() ? std::optional<unsigned>(unsigned(t)) : std::nullopt;
    }
  };


  enum class Select : uint8_t { Idle, Straight, Diagonal };


  /// Per node layer, per column selection signal plus the validity the
  /// planner expects to see at that node.
  struct NodeControl
  {
    unsigned lanes = 0;
    std::vector<std::vector<Select>> select;     // [node layer][column]
    std::vector<std::vector<bool>> expect_valid; // [node layer][column]

    bool operator==(const NodeControl&) const = default;
  };


  namespace detail
  {
    enum class PathStatus { Ok, OutOfRange, Collision };

    struct PathTrace
    {
      PathStatus status = PathStatus::Ok;
      // occupant[layer][col] = index into routes, or -1.
      std::vector<std::vector<int>> occupant;
    };

    /// Move every valid lane layer by layer and record node occupancy. Stops at the first collision or out-of-range move.
    inline PathTrace
    tracePaths(const ShiftNetwork& net, const std::vector<LaneRoute>& routes)
    {
      PathTrace tr;
      const unsigned n = net.lanes();
      tr.occupant.assign(net.nodeLayers(), std::vector<int>(n, -1));

      std::vector<std::pair<int, unsigned>> pos;  // (route index, column)
      for (size_t r = 0; r < routes.size(); ++r)
        {
          if (not routes[r].valid)
            continue;
          if (routes[r].src >= n or routes[r].shift_cnt >= n)
            {
              tr.status = PathStatus::OutOfRange;
              return tr;
            }
          pos.emplace_back(int(r), routes[r].src);
        }

      auto place = [&](unsigned layer) {
        for (auto& [r, col] : pos)
          {
            int& occ = tr.occupant[layer][col];
            if (occ != -1)
              return false;
            occ = r;
          }
        return true;
      };

      if (not place(0))
        {
          tr.status = PathStatus::Collision;
          return tr;
        }
      for (unsigned l = 0; l < net.linkLayers(); ++l)
        {
          for (auto& [r, col] : pos)
            if ((routes[r].shift_cnt >> net.shiftBit(l)) & 1u)
              {
                auto next = net.diagonal(col, l);
                if (not next)
                  {
                    tr.status = PathStatus::OutOfRange;
                    return tr;
                  }
                col = *next;
              }
          if (not place(l + 1))
            {
              tr.status = PathStatus::Collision;
              return tr;
            }
        }
      return tr;
    }
  }


  /// True iff no node of the network is visited by two valid lanes and
  /// every lane stays inside the network.
  inline bool
  checkConflictFree(const ShiftNetwork& net, const std::vector<LaneRoute>& routes)
  {
    return detail::tracePaths(net, routes).status == detail::PathStatus::Ok;
  }


  /// Derive node selection signals for a route set. The set must be
  /// realizable without wraparound, must map lanes to distinct columns, and
  /// must obey the direction's separation rule (gather never widens the gap
  /// between two lanes, scatter never narrows it).
  inline NodeControl
  planRoutes(const ShiftNetwork& net, const std::vector<LaneRoute>& routes)
  {
    const unsigned n = net.lanes();
    struct Mapped { unsigned src, dst; };
    std::vector<Mapped> m;
    for (const auto& r : routes)
      {
        if (not r.valid)
          continue;
        if (r.src >= n)
          throw Error(Errc::LaneOutOfRange, "route source column " + std::to_string(r.src));
        auto t = r.target(net);
        if (not t)
          throw Error(Errc::WraparoundRequired,
                      "lane " + std::to_string(r.src) + " shifted by " +
                      std::to_string(r.shift_cnt) + " leaves the network");
        m.push_back({r.src, *t});
      }

    std::sort(m.begin(), m.end(), [](auto& a, auto& b) { return a.src < b.src; });
    {
      std::vector<unsigned> dsts;
      for (auto& x : m)
        dsts.push_back(x.dst);
      std::sort(dsts.begin(), dsts.end());
      if (std::adjacent_find(dsts.begin(), dsts.end()) != dsts.end())
        throw Error(Errc::DuplicateTarget, "two lanes map to one output column");
    }

    const bool gather = net.direction() == NetDirection::Gather;
    for (size_t a = 0; a < m.size(); ++a)
      for (size_t b = a + 1; b < m.size(); ++b)
        {
          if (m[a].src == m[b].src or m[a].dst >= m[b].dst)
            throw Error(Errc::SeparationViolated, "route set does not preserve lane order");
          unsigned in = m[b].src - m[a].src;
          unsigned out = m[b].dst - m[a].dst;
          if (gather ? out > in : out < in)
            throw Error(Errc::SeparationViolated,
                        std::string(gather ? "gather widens" : "scatter narrows") +
                        " the separation of lanes " + std::to_string(m[a].src) +
                        " and " + std::to_string(m[b].src));
        }

    auto tr = detail::tracePaths(net, routes);
    if (tr.status != detail::PathStatus::Ok)
      throw Error(Errc::SeparationViolated, "route set collides inside the network");

    NodeControl ctrl;
    ctrl.lanes = n;
    ctrl.select.assign(net.nodeLayers(), std::vector<Select>(n, Select::Idle));
    ctrl.expect_valid.assign(net.nodeLayers(), std::vector<bool>(n, false));
    for (unsigned l = 0; l < net.nodeLayers(); ++l)
      for (unsigned c = 0; c < n; ++c)
        {
          int occ = tr.occupant[l][c];
          if (occ < 0)
            continue;
          ctrl.expect_valid[l][c] = true;
          if (l == net.linkLayers())
            ctrl.select[l][c] = Select::Straight;   // Output node forwards.
          else
            ctrl.select[l][c] = ((routes[occ].shift_cnt >> net.shiftBit(l)) & 1u) ? Select::Diagonal : Select::Straight;
        }
    return ctrl;
  }


  /// Push lanes through the network under ctrl. Valid payloads follow their
  /// node selections; invalid lanes are dropped.
  inline Lanes
  route(const ShiftNetwork& net, const NodeControl& ctrl, const Lanes& lanes)
  {
    const unsigned n = net.lanes();
    if (lanes.size() != n or ctrl.lanes != n or ctrl.select.size() != net.nodeLayers())
      throw Error(Errc::ControlMismatch, "lane count does not match the network");

    Lanes cur = lanes;
    for (unsigned c = 0; c < n; ++c)
      if (cur[c].valid != ctrl.expect_valid[0][c])
        throw Error(Errc::ControlMismatch, "input validity differs from the planned pattern at column " +
                    std::to_string(c));

    for (unsigned l = 0; l < net.linkLayers(); ++l)
      {
        Lanes next(n);
        for (unsigned c = 0; c < n; ++c)
          {
            if (not cur[c].valid)
              continue;
            unsigned to = c;
            switch (ctrl.select[l][c])
              {
              case Select::Straight:
                break;
              case Select::Diagonal:
                {
                  auto d = net.diagonal(c, l);
                  if (not d)
                    throw Error(Errc::ControlMismatch, "diagonal selected on a missing link");
                  to = *d;
                  break;
                }
              case Select::Idle:
                throw Error(Errc::ControlMismatch, "valid lane reached an idle node");
              }
            if (next[to].valid)
              throw Error(Errc::ControlMismatch, "two lanes meet at one node");
            next[to] = cur[c];
          }
        for (unsigned c = 0; c < n; ++c)
          if (next[c].valid != ctrl.expect_valid[l + 1][c])
            throw Error(Errc::ControlMismatch, "node occupancy differs from the plan");
        cur = std::move(next);
      }
    return cur;
  }


  /// Text rendering of per-layer node occupancy, one line per node layer.
  /// '.' marks an empty node, otherwise the source column of the occupant.
  inline std::string
  dumpOccupancy(const ShiftNetwork& net, const std::vector<LaneRoute>& routes)
  {
    auto tr = detail::tracePaths(net, routes);
    std::ostringstream os;
    os << (net.direction() == NetDirection::Gather ? "GSN" : "SSN") << " lanes=" << net.lanes();
    if (tr.status == detail::PathStatus::Collision)
      os << " (collision)";
    else if (tr.status == detail::PathStatus::OutOfRange)
      os << " (out of range)";
    os << '\n';
    for (unsigned l = 0; l < net.nodeLayers(); ++l)
      {
        os << "L" << l << ":";
        for (unsigned c = 0; c < net.lanes(); ++c)
          {
            int occ = tr.occupant[l][c];
            if (occ < 0)
              os << "  .";
            else
              {
                std::string s = std::to_string(routes[occ].src);
                os << std::string(s.size() < 3 ? 3 - s.size() : 1, ' ') << s;
              }
          }
        os << '\n';
      }
    return os.str();
  }

}
