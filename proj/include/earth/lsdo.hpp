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

#include "drom.hpp"
#include "instr.hpp"

namespace earth
{

  /// Per-beat control for the load/store data organizer.
  struct LsdoCtrl
  {
    Pattern pattern = Pattern::UnitStride;
    unsigned stride_abs = 1;
    bool stride_negative = false;
    unsigned eewb = 1;
    unsigned beat_offset = 0;       // Beat position of the first element (element order).
    unsigned row_byte_offset = 0;   // Position of that element in the register-side window.
    unsigned n_elems = 0;

    /// Strided beats go through the reverser and DROM; everything else
    /// bypasses both and only sees the byte shifter.
    bool usesDrom() const
    { return pattern == Pattern::Strided; }

    bool operator==(const LsdoCtrl&) const = default;
  };


  /// Reverse the order of eewb-byte elements across the beat, keeping the
  /// byte order inside each element.
  inline Lanes
  reverseElements(const Lanes& data, unsigned eewb)
  {
    const unsigned n = unsigned(data.size());
    if (eewb == 0 or n % eewb != 0)
      throw Error(Errc::OutOfBeat, "element width must divide the beat");
    const unsigned slots = n / eewb;
    Lanes out(n);
    for (unsigned k = 0; k < slots; ++k)
      for (unsigned b = 0; b < eewb; ++b)
        out[(slots - 1 - k) * eewb + b] = data[k * eewb + b];
    return out;
  }


  /// Move every lane by amount columns (positive toward higher columns).
  /// Vacated lanes become invalid; a valid lane may not leave the beat.
  inline Lanes
  byteShift(const Lanes& data, int amount)
  {
    const int n = int(data.size());
    Lanes out(data.size());
    for (int c = 0; c < n; ++c)
      {
        if (not data[c].valid)
          continue;
        int to = c + amount;
        if (to < 0 or to >= n)
          throw Error(Errc::OutOfBeat, "byte shift moves lane " + std::to_string(c) + " out of the beat");
        out[to] = data[c];
      }
    return out;
  }


  namespace detail
  {
    inline Lanes
    keepRange(const Lanes& data, unsigned first, unsigned count)
    {
      Lanes out(data.size());
      for (unsigned c = first; c < first + count and c < data.size(); ++c)
        out[c] = data[c];
      return out;
    }

    inline void
    checkCtrl(const LsdoCtrl& ctrl, size_t beat)
    {
      if (ctrl.beat_offset >= beat)
        throw Error(Errc::OutOfBeat, "beat offset outside the beat");
      if (ctrl.row_byte_offset + size_t(ctrl.n_elems) * ctrl.eewb > beat)
        throw Error(Errc::OutOfBeat, "register-side slice does not fit the beat");
    }

    /// Offset of the first element once the beat has been reversed.
    inline unsigned
    mirroredOffset(const LsdoCtrl& ctrl, size_t beat)
    {
      if (ctrl.beat_offset + ctrl.eewb > beat)
        throw Error(Errc::OutOfBeat, "element straddles the beat end");
      return unsigned(beat) - (ctrl.beat_offset + ctrl.eewb);
    }
  }


  /// Memory beat -> register-side window. The result is valid exactly on
  /// the bytes to be written.
  inline Lanes
  organizeLoad(const LsdoCtrl& ctrl, const Lanes& beat)
  {
    detail::checkCtrl(ctrl, beat.size());
    const unsigned bytes = ctrl.n_elems * ctrl.eewb;
    if (not ctrl.usesDrom())
      {
        Lanes slice = detail::keepRange(beat, ctrl.beat_offset, bytes);
        return byteShift(slice, int(ctrl.row_byte_offset) - int(ctrl.beat_offset));
      }

    Lanes data = beat;
    unsigned offset = ctrl.beat_offset;
    if (ctrl.stride_negative)
      {
        data = reverseElements(data, ctrl.eewb);
        offset = detail::mirroredOffset(ctrl, beat.size());
      }
    DromRequest req{NetDirection::Gather, ctrl.stride_abs, ctrl.eewb, offset, ctrl.n_elems, std::move(data)};
    return byteShift(dromGather(req), int(ctrl.row_byte_offset));
  }


  /// Register-side window -> memory beat; valid lanes are the byte enables.
  inline Lanes
  organizeStore(const LsdoCtrl& ctrl, const Lanes& row_slice)
  {
    detail::checkCtrl(ctrl, row_slice.size());
    const unsigned bytes = ctrl.n_elems * ctrl.eewb;
    Lanes slice = detail::keepRange(row_slice, ctrl.row_byte_offset, bytes);
    if (not ctrl.usesDrom())
      return byteShift(slice, int(ctrl.beat_offset) - int(ctrl.row_byte_offset));

    unsigned offset = ctrl.stride_negative ? detail::mirroredOffset(ctrl, row_slice.size())
                                           : ctrl.beat_offset;
    DromRequest req{NetDirection::Scatter, ctrl.stride_abs, ctrl.eewb, offset, ctrl.n_elems,
                    byteShift(slice, -int(ctrl.row_byte_offset))};
    Lanes out = dromScatter(req);
    if (ctrl.stride_negative)
      out = reverseElements(out, ctrl.eewb);
    return out;
  }

}
