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
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "instr.hpp"
#include "lsdo.hpp"
#include "memory.hpp"
#include "rcvrf.hpp"

namespace earth
{

  /// Register-side destination of a row-wise micro-op: lane k of the LSDO
  /// window is byte window_base + k of the register group starting at vreg.
  struct RowTarget
  {
    unsigned vreg = 0;
    unsigned window_base = 0;

    bool operator==(const RowTarget&) const = default;
  };


  /// One split memory operation, confined to a single aligned memory beat.
  struct MicroOp
  {
    uint64_t id = 0;
    uint64_t instr_id = 0;
    Direction dir = Direction::Load;
    Pattern pattern = Pattern::UnitStride;   // Pattern of the parent instruction.
    uint64_t beat_addr = 0;
    uint64_t addr = 0;                       // Lowest byte touched.
    unsigned n_bytes = 0;                    // Span from addr to the last byte touched.
    unsigned elem_start = 0;
    unsigned n_elems = 0;                    // Elements (or segment fields) moved.
    unsigned field = 0;
    LsdoCtrl lsdo;
    std::variant<RowTarget, ColumnSpec> target;

    bool isColumn() const
    { return std::holds_alternative<ColumnSpec>(target); }
  };


  enum class SegmentApproach { SegmentWise, FieldWise };


  namespace detail
  {
    /// Place `bytes` register-side bytes starting at group byte gb inside a
    /// beat-wide window: returns {window_base, row_byte_offset}.
    inline std::pair<unsigned, unsigned>
    rowWindow(unsigned beat, unsigned gb, unsigned bytes)
    {
      unsigned rbo = std::min(gb % beat, beat - bytes);
      return {gb - rbo, rbo};
    }

    inline MicroOp
    rowMop(const VectorConfig& cfg, const VecMemInstr& in, unsigned vreg, uint64_t first_addr,
           uint64_t low_addr, unsigned span, unsigned elem_start, unsigned n_elems)
    {
      const unsigned beat = cfg.beat_bytes;
      const unsigned e = in.eewb();
      MicroOp m;
      m.dir = in.dir;
      m.pattern = in.pattern;
      m.beat_addr = first_addr - first_addr % beat;
      m.addr = low_addr;
      m.n_bytes = span;
      m.elem_start = elem_start;
      m.n_elems = n_elems;
      auto [wb, rbo] = rowWindow(beat, elem_start * e, n_elems * e);
      m.lsdo.eewb = e;
      m.lsdo.stride_abs = e;
      m.lsdo.beat_offset = unsigned(first_addr % beat);
      m.lsdo.row_byte_offset = rbo;
      m.lsdo.n_elems = n_elems;
      m.target = RowTarget{vreg, wb};
      return m;
    }

    /// One micro-op per element, element order, unit-stride style bypass.
    inline std::vector<MicroOp>
    splitPerElement(const VectorConfig& cfg, const VecMemInstr& in)
    {
      std::vector<MicroOp> out;
      for (unsigned i = 0; i < in.vl; ++i)
        for (unsigned j = 0; j < in.fields; ++j)
          {
            uint64_t a = elementAddress(in, i, j);
            MicroOp m = rowMop(cfg, in, in.vd + j * in.emul, a, a, in.eewb(), i, 1);
            m.field = j;
            m.lsdo.pattern = Pattern::UnitStride;   // A single element is a unit-stride run.
            out.push_back(m);
          }
      return out;
    }
  }


  /// Contiguous coalescing: one micro-op per aligned beat touched.
  inline std::vector<MicroOp>
  splitUnit(const VectorConfig& cfg, const VecMemInstr& in)
  {
    const unsigned beat = cfg.beat_bytes;
    const unsigned e = in.eewb();
    std::vector<MicroOp> out;
    unsigned k = 0;
    while (k < in.vl)
      {
        uint64_t a = elementAddress(in, k);
        unsigned m = std::min<unsigned>(in.vl - k, unsigned((beat - a % beat) / e));
        m = std::max(m, 1u);
        MicroOp op = detail::rowMop(cfg, in, in.vd, a, a, m * e, k, m);
        op.lsdo.pattern = Pattern::UnitStride;
        out.push_back(op);
        k += m;
      }
    return out;
  }


  /// Strided coalescing: greedy maximal runs of consecutive elements whose
  /// bytes share one aligned beat. Zero, overlapping, or off-grid negative
  /// strides degenerate to one element per micro-op.
  inline std::vector<MicroOp>
  splitStrided(const VectorConfig& cfg, const VecMemInstr& in)
  {
    const unsigned beat = cfg.beat_bytes;
    const int64_t e = in.eewb();
    const int64_t s = in.stride;
    const uint64_t abs_s = uint64_t(s < 0 ? -s : s);
    bool coalesce = s != 0 and int64_t(abs_s) >= e;
    if (s < 0 and (in.base % e != 0 or abs_s % e != 0))
      coalesce = false;   // The reverser works on the element grid.

    std::vector<MicroOp> out;
    unsigned k = 0;
    while (k < in.vl)
      {
        uint64_t a = elementAddress(in, k);
        uint64_t line = a / beat;
        unsigned m = 1;
        if (coalesce)
          while (k + m < in.vl)
            {
              uint64_t b = elementAddress(in, k + m);
              if (b / beat != line or (b + e - 1) / beat != line)
                break;
              ++m;
            }
        uint64_t last = elementAddress(in, k + m - 1);
        uint64_t low = std::min(a, last);
        unsigned span = unsigned((m - 1) * abs_s + e);
        MicroOp op = detail::rowMop(cfg, in, in.vd, a, low, m > 1 ? span : unsigned(e), k, m);
        op.lsdo.pattern = Pattern::Strided;
        if (m > 1)
          {
            op.lsdo.stride_abs = unsigned(abs_s);
            op.lsdo.stride_negative = s < 0;
          }
        out.push_back(op);
        k += m;
      }
    return out;
  }


  /// Indexed accesses stay element-wise.
  inline std::vector<MicroOp>
  splitIndexed(const VectorConfig& cfg, const VecMemInstr& in)
  {
    auto ops = detail::splitPerElement(cfg, in);
    for (auto& op : ops)
      op.lsdo.pattern = Pattern::Indexed;
    return ops;
  }


  /// Decompose a segment instruction. SegmentWise coalesces the fields of
  /// each segment that share a beat into one column-targeted micro-op;
  /// FieldWise turns field j into a row-wise strided or indexed access.
  inline std::vector<MicroOp>
  splitSegment(const VectorConfig& cfg, const VecMemInstr& in, SegmentApproach approach)
  {
    const unsigned beat = cfg.beat_bytes;
    const unsigned e = in.eewb();
    std::vector<MicroOp> out;

    if (approach == SegmentApproach::FieldWise)
      {
        for (unsigned j = 0; j < in.fields; ++j)
          {
            VecMemInstr f = in;
            f.fields = 1;
            f.vd = in.vd + j * in.emul;
            f.base = in.base + uint64_t(j) * e;
            if (in.pattern == Pattern::SegIndexed)
              f.pattern = Pattern::Indexed;
            else
              {
                f.pattern = Pattern::Strided;
                if (in.pattern == Pattern::SegUnitStride)
                  f.stride = int64_t(in.fields) * e;
              }
            auto part = f.pattern == Pattern::Indexed ? splitIndexed(cfg, f) : splitStrided(cfg, f);
            for (auto& op : part)
              {
                op.pattern = in.pattern;
                op.field = j;
                out.push_back(op);
              }
          }
        return out;
      }

    const unsigned vlenb = cfg.vlenBytes();
    const unsigned elenb = cfg.elenBytes();
    for (unsigned i = 0; i < in.vl; ++i)
      {
        unsigned j = 0;
        while (j < in.fields)
          {
            uint64_t a = elementAddress(in, i, j);
            uint64_t line = a / beat;
            unsigned c = 1;
            while (j + c < in.fields and (elementAddress(in, i, j + c) + e - 1) / beat == line)
              ++c;

            MicroOp op;
            op.dir = in.dir;
            op.pattern = in.pattern;
            op.beat_addr = line * beat;
            op.addr = a;
            op.n_bytes = c * e;
            op.elem_start = i;
            op.n_elems = c;
            op.field = j;
            op.lsdo.pattern = in.pattern;
            op.lsdo.eewb = e;
            op.lsdo.stride_abs = e;
            op.lsdo.beat_offset = unsigned(a % beat);
            op.lsdo.row_byte_offset = 0;
            op.lsdo.n_elems = c;
            const unsigned gb = i * e;
            ColumnSpec col;
            col.base_vreg = in.vd + j * in.emul + gb / vlenb;
            col.n_fields = c;
            col.emul = in.emul;
            col.block = (gb % vlenb) / elenb;
            col.elem_byte_offset = gb % elenb;
            col.eewb = e;
            op.target = col;
            out.push_back(op);
            j += c;
          }
      }
    return out;
  }


  /// Micro-ops the coalescing unit produces for any pattern.
  inline std::vector<MicroOp>
  splitInstr(const VectorConfig& cfg, const VecMemInstr& in,
             SegmentApproach approach = SegmentApproach::SegmentWise)
  {
    switch (in.pattern)
      {
      case Pattern::UnitStride: return splitUnit(cfg, in);
      case Pattern::Strided:    return splitStrided(cfg, in);
      case Pattern::Indexed:    return splitIndexed(cfg, in);
      default:                  return splitSegment(cfg, in, approach);
      }
  }


  /// Baseline splitting: unit-stride is coalesced, every other pattern
  /// issues one request per element (and per field).
  inline std::vector<MicroOp>
  splitElementWise(const VectorConfig& cfg, const VecMemInstr& in)
  {
    if (in.pattern == Pattern::UnitStride)
      return splitUnit(cfg, in);
    return detail::splitPerElement(cfg, in);
  }


  /// Load and store in-flight queues, the load reorder buffer, and the
  /// store acknowledgement tracking.
  class InFlightQueues
  {
  public:
    InFlightQueues(unsigned lifq_depth, unsigned sifq_depth, unsigned lrob_capacity)
      : lifqDepth_(lifq_depth), sifqDepth_(sifq_depth), lrobCap_(lrob_capacity)
    { }

    bool lifqHasSpace() const
    { return lifq_.size() < lifqDepth_ and lifq_.size() < lrobCap_; }

    bool sifqHasSpace() const
    { return sifq_.size() < sifqDepth_; }

    size_t loadsInFlight() const  { return lifq_.size(); }
    size_t storesInFlight() const { return sifq_.size(); }
    size_t lrobSize() const       { return lrob_.size(); }

    void allocateLoad(uint64_t id)
    {
      if (not lifqHasSpace())
        throw Error(Errc::QueueFull, "load in-flight queue is full");
      lifq_.push_back(id);
    }

    void allocateStore(uint64_t id)
    {
      if (not sifqHasSpace())
        throw Error(Errc::QueueFull, "store in-flight queue is full");
      sifq_.push_back({id, false, 0});
    }

    /// Buffer a possibly out-of-order load response.
    void receive(MemResponse resp)
    {
      if (lrob_.size() >= lrobCap_)
        throw Error(Errc::QueueFull, "load reorder buffer is full");
      uint64_t id = resp.id;
      lrob_.emplace(id, std::move(resp));
    }

    void ack(uint64_t id, uint64_t ready_cycle)
    {
      for (auto& s : sifq_)
        if (s.id == id)
          {
            s.acked = true;
            s.ack_cycle = ready_cycle;
            return;
          }
    }

    /// Release the LIFQ head's response if it is id and is visible at
    /// cycle: ready strictly before cycle, or at cycle when same_cycle.
    std::optional<MemResponse> release(uint64_t id, uint64_t cycle, bool same_cycle)
    {
      if (lifq_.empty() or lifq_.front() != id)
        return std::nullopt;
      auto it = lrob_.find(id);
      if (it == lrob_.end())
        return std::nullopt;
      uint64_t r = it->second.ready_cycle;
      if (not (r < cycle or (same_cycle and r == cycle)))
        return std::nullopt;
      MemResponse resp = std::move(it->second);
      lrob_.erase(it);
      lifq_.pop_front();
      return resp;
    }

    /// Dequeue SIFQ entries in order while the head was acked before cycle.
    unsigned retireStores(uint64_t cycle)
    {
      unsigned n = 0;
      while (not sifq_.empty() and sifq_.front().acked and sifq_.front().ack_cycle < cycle)
        {
          sifq_.pop_front();
          ++n;
        }
      return n;
    }

  private:
    struct StoreEntry
    {
      uint64_t id;
      bool acked;
      uint64_t ack_cycle;
    };

    unsigned lifqDepth_, sifqDepth_, lrobCap_;
    std::deque<uint64_t> lifq_;
    std::deque<StoreEntry> sifq_;
    std::map<uint64_t, MemResponse> lrob_;
  };


  /// Which load/store unit organization to simulate.
  enum class Model
    {
      Earth,        // Strided coalescing through LSDO, buffer-free segments via RCVRF columns.
      ElementWise,  // Unit-stride coalescing only; everything else per element.
      SegBuffer     // ElementWise plus coalesced segments staged in a segment buffer.
    };

  inline std::string_view
  modelName(Model m)
  {
    switch (m)
      {
      case Model::Earth:       return "earth";
      case Model::ElementWise: return "elementwise";
      case Model::SegBuffer:   return "segbuffer";
      }
    return "?";
  }

  inline std::optional<Model>
  parseModel(std::string_view s)
  {
    for (Model m : {Model::Earth, Model::ElementWise, Model::SegBuffer})
      if (modelName(m) == s)
        return m;
    return std::nullopt;
  }


  struct SimOptions
  {
    Model model = Model::Earth;
    SegmentApproach segment_approach = SegmentApproach::SegmentWise;
    unsigned latency = 20;
    ReorderMode reorder = ReorderMode::InOrder;
    unsigned reorder_window = 4;
    uint64_t seed = 1;
    unsigned lifq_depth = 8;
    unsigned sifq_depth = 8;
    unsigned lrob_capacity = 8;
  };


  struct PatternCounts
  {
    uint64_t instrs = 0;
    uint64_t mem_requests = 0;

    bool operator==(const PatternCounts&) const = default;
  };

  struct Metrics
  {
    uint64_t instrs = 0;
    uint64_t mem_requests = 0;
    uint64_t beats_transferred = 0;
    uint64_t sim_cycles = 0;
    uint64_t vrf_accesses = 0;
    std::map<Pattern, PatternCounts> per_pattern;

    bool operator==(const Metrics&) const = default;

    Metrics& operator+=(const Metrics& o)
    {
      instrs += o.instrs;
      mem_requests += o.mem_requests;
      beats_transferred += o.beats_transferred;
      sim_cycles += o.sim_cycles;
      vrf_accesses += o.vrf_accesses;
      for (auto& [p, c] : o.per_pattern)
        {
          per_pattern[p].instrs += c.instrs;
          per_pattern[p].mem_requests += c.mem_requests;
        }
      return *this;
    }
  };


  /// Trace-driven vector load/store unit. Micro-ops of consecutive
  /// instructions flow through one in-order pipeline: an issue stage (one
  /// request or buffer read per cycle), the memory port, and an in-order
  /// retire stage (one writeback, drain, or buffer write per cycle).
  class Simulator
  {
  public:
    Simulator(const VectorConfig& cfg, const SimOptions& opts, ByteMemory mem = ByteMemory{})
      : cfg_(cfg), opts_(opts), vrf_(cfg),
        mem_(std::move(mem), cfg.beat_bytes, opts.latency, opts.reorder, opts.seed, opts.reorder_window)
    { }

    const VectorConfig& config() const   { return cfg_; }
    const SimOptions& options() const    { return opts_; }
    ShiftedVRF& vrf()                    { return vrf_; }
    ByteMemory& memory()                 { return mem_.backing(); }
    const ByteMemory& memory() const     { return mem_.backing(); }
    const Metrics& metrics() const       { return total_; }

    /// Micro-ops this model issues for one instruction.
    std::vector<MicroOp> split(const VecMemInstr& in) const
    {
      switch (opts_.model)
        {
        case Model::Earth:
          return splitInstr(cfg_, in, opts_.segment_approach);
        case Model::ElementWise:
          return splitElementWise(cfg_, in);
        case Model::SegBuffer:
          if (isSegment(in.pattern))
            return splitSegment(cfg_, in, SegmentApproach::SegmentWise);
          return splitElementWise(cfg_, in);
        }
      return {};
    }

    /// Run a trace to completion; returns the metrics of this run.
    Metrics run(std::span<const VecMemInstr> trace)
    {
      Metrics m;
      build(trace, m);
      m.sim_cycles = execute(m);
      total_ += m;
      return m;
    }

    Metrics runInstr(const VecMemInstr& in)
    { return run(std::span<const VecMemInstr>(&in, 1)); }

  private:
    enum class OpKind { Preload, LoadReq, StoreReq, BufRead };
    enum class RetireKind { LoadWb, Drain, BufWrite };

    static constexpr size_t no_chunk = size_t(-1);

    struct IssueOp
    {
      OpKind kind = OpKind::LoadReq;
      MicroOp mop;
      size_t chunk = no_chunk;
      unsigned field = 0;      // BufRead/BufWrite field.
      unsigned reg = 0;        // BufRead/BufWrite register.
      bool closes_chunk = false;
      const VecMemInstr* instr = nullptr;
    };

    struct RetireItem
    {
      RetireKind kind = RetireKind::LoadWb;
      size_t op = 0;
      size_t chunk = no_chunk;
      unsigned field = 0;
      unsigned reg = 0;
    };

    /// Segment buffer contents for a run of segments of one instruction:
    /// one row of beat bytes per field.
    struct Chunk
    {
      unsigned vd = 0, emul = 1, eewb = 1, fields = 1;
      unsigned first_seg = 0, n_segs = 0;
      std::vector<std::vector<uint8_t>> rows;
      std::vector<std::pair<unsigned, unsigned>> regs;   // (field, register) touched.
    };

    void build(std::span<const VecMemInstr> trace, Metrics& m)
    {
      ops_.clear();
      chunks_.clear();
      for (const auto& raw : trace)
        {
          const VecMemInstr& in = raw;
          validateInstr(cfg_, in);
          uint64_t iid = nextInstr_++;
          ++m.instrs;
          ++m.per_pattern[in.pattern].instrs;
          if (not in.data.empty())
            {
              IssueOp p;
              p.kind = OpKind::Preload;
              p.instr = &in;
              ops_.push_back(p);
            }

          auto mops = split(in);
          const bool buffered = opts_.model == Model::SegBuffer and isSegment(in.pattern);
          if (not buffered)
            {
              for (auto& mop : mops)
                {
                  mop.instr_id = iid;
                  IssueOp op;
                  op.kind = in.dir == Direction::Load ? OpKind::LoadReq : OpKind::StoreReq;
                  op.mop = mop;
                  op.instr = &in;
                  ops_.push_back(op);
                }
              continue;
            }

          // Segment buffer: group segments into chunks that fill one beat per field.
          const unsigned segsPerChunk = std::max(1u, cfg_.beat_bytes / in.eewb());
          size_t k = 0;
          for (unsigned s0 = 0; s0 < in.vl; s0 += segsPerChunk)
            {
              Chunk ch;
              ch.vd = in.vd;
              ch.emul = in.emul;
              ch.eewb = in.eewb();
              ch.fields = in.fields;
              ch.first_seg = s0;
              ch.n_segs = std::min(segsPerChunk, in.vl - s0);
              ch.rows.assign(in.fields, std::vector<uint8_t>(size_t(ch.n_segs) * ch.eewb, 0));
              const unsigned lo = s0 * ch.eewb, hi = (s0 + ch.n_segs) * ch.eewb;
              for (unsigned f = 0; f < in.fields; ++f)
                for (unsigned r = lo / cfg_.vlenBytes(); r <= (hi - 1) / cfg_.vlenBytes(); ++r)
                  ch.regs.emplace_back(f, in.vd + f * in.emul + r);
              size_t cid = chunks_.size();
              chunks_.push_back(ch);

              if (in.dir == Direction::Store)
                for (auto [f, reg] : ch.regs)
                  {
                    IssueOp op;
                    op.kind = OpKind::BufRead;
                    op.chunk = cid;
                    op.field = f;
                    op.reg = reg;
                    op.instr = &in;
                    ops_.push_back(op);
                  }
              size_t firstOp = ops_.size();
              for (; k < mops.size() and mops[k].elem_start < s0 + ch.n_segs; ++k)
                {
                  IssueOp op;
                  op.kind = in.dir == Direction::Load ? OpKind::LoadReq : OpKind::StoreReq;
                  op.mop = mops[k];
                  op.mop.instr_id = iid;
                  op.chunk = cid;
                  op.instr = &in;
                  ops_.push_back(op);
                }
              if (in.dir == Direction::Load and ops_.size() > firstOp)
                ops_.back().closes_chunk = true;
            }
        }
      for (size_t i = 0; i < ops_.size(); ++i)
        ops_[i].mop.id = i;
    }

    uint64_t execute(Metrics& m)
    {
      InFlightQueues q(opts_.lifq_depth, opts_.sifq_depth, opts_.lrob_capacity);
      std::deque<RetireItem> retire;
      std::optional<std::pair<size_t, MemResponse>> lsdo;
      size_t next = 0;
      uint64_t cycle = 0;
      uint64_t lastProgress = 0;
      const uint64_t stallLimit = uint64_t(opts_.latency) + opts_.reorder_window + 16;

      auto done = [&] {
        return next == ops_.size() and retire.empty() and not lsdo and q.storesInFlight() == 0 and mem_.idle();
      };
      if (done())
        return 0;

      for (;; ++cycle)
        {
          bool progress = false;

          // Issue stage. Preloads are architectural register writes at an
          // instruction boundary and take no issue slot.
          while (next < ops_.size() and ops_[next].kind == OpKind::Preload and retire.empty() and not lsdo)
            {
              preload(*ops_[next].instr);
              ++next;
              progress = true;
            }
          if (next < ops_.size())
            {
              IssueOp& op = ops_[next];
              switch (op.kind)
                {
                case OpKind::Preload:
                  break;
                case OpKind::LoadReq:
                  if (q.lifqHasSpace())
                    {
                      q.allocateLoad(op.mop.id);
                      mem_.issue(MemRequest{op.mop.id, op.mop.beat_addr, false, {}}, cycle);
                      count(m, op);
                      bool toBuffer = op.chunk != no_chunk;
                      retire.push_back({toBuffer ? RetireKind::Drain : RetireKind::LoadWb, next, op.chunk, 0, 0});
                      if (op.closes_chunk)
                        for (auto [f, reg] : chunks_[op.chunk].regs)
                          retire.push_back({RetireKind::BufWrite, next, op.chunk, f, reg});
                      ++next;
                      progress = true;
                    }
                  break;
                case OpKind::StoreReq:
                  // Stores read registers at issue, after older loads retire.
                  if (q.sifqHasSpace() and retire.empty() and not lsdo)
                    {
                      Lanes beat = storeBeat(op, m);
                      q.allocateStore(op.mop.id);
                      mem_.issue(MemRequest{op.mop.id, op.mop.beat_addr, true, std::move(beat)}, cycle);
                      count(m, op);
                      ++next;
                      progress = true;
                    }
                  break;
                case OpKind::BufRead:
                  if (retire.empty() and not lsdo)
                    {
                      bufferRead(op, m);
                      ++next;
                      progress = true;
                    }
                  break;
                }
            }

          // Memory port.
          for (auto& r : mem_.step(cycle))
            {
              if (r.is_store)
                q.ack(r.id, r.ready_cycle);
              else
                q.receive(std::move(r));
            }

          // Retire stage. A released load response spends one cycle in the
          // LSDO register before its register-file write; drains go straight
          // into the segment buffer.
          {
            bool portBusy = false;
            if (lsdo)
              {
                writeback(ops_[lsdo->first], lsdo->second, m);
                lsdo.reset();
                portBusy = true;
                progress = true;
              }
            if (not retire.empty())
              {
                RetireItem& it = retire.front();
                if (it.kind == RetireKind::BufWrite)
                  {
                    if (not portBusy)
                      {
                        bufferWrite(it, m);
                        retire.pop_front();
                        progress = true;
                      }
                  }
                else if (auto resp = q.release(ops_[it.op].mop.id, cycle, true))
                  {
                    if (it.kind == RetireKind::LoadWb)
                      lsdo.emplace(it.op, std::move(*resp));
                    else
                      drain(ops_[it.op], *resp);
                    retire.pop_front();
                    progress = true;
                  }
              }
          }

          if (q.retireStores(cycle) > 0)
            progress = true;

          if (done())
            return cycle + 1;
          if (progress)
            lastProgress = cycle;
          else if (cycle - lastProgress > stallLimit)
            throw Error(Errc::QueueFull, "load/store pipeline stopped making progress");
        }
    }

    void count(Metrics& m, const IssueOp& op)
    {
      ++m.mem_requests;
      ++m.beats_transferred;
      ++m.per_pattern[op.instr->pattern].mem_requests;
    }

    void preload(const VecMemInstr& in)
    {
      const unsigned vlenb = cfg_.vlenBytes();
      for (unsigned r = 0; r * vlenb < in.data.size(); ++r)
        {
          Lanes row(vlenb);
          for (unsigned b = 0; b < vlenb and r * vlenb + b < in.data.size(); ++b)
            row[b] = ByteLane{true, in.data[r * vlenb + b]};
          vrf_.writeRow(in.vd + r, row);
        }
    }

    Lanes beatLanes(const std::vector<uint8_t>& data) const
    {
      Lanes l(data.size());
      for (size_t i = 0; i < data.size(); ++i)
        l[i] = ByteLane{true, data[i]};
      return l;
    }

    /// Scatter window lanes into the rows of the group starting at vreg.
    void writeWindow(const RowTarget& t, const Lanes& window, Metrics& m)
    {
      const unsigned vlenb = cfg_.vlenBytes();
      std::map<unsigned, Lanes> rows;
      for (unsigned k = 0; k < window.size(); ++k)
        {
          if (not window[k].valid)
            continue;
          unsigned gb = t.window_base + k;
          Lanes& row = rows[t.vreg + gb / vlenb];
          if (row.empty())
            row.resize(vlenb);
          row[gb % vlenb] = window[k];
        }
      for (auto& [reg, row] : rows)
        {
          vrf_.writeRow(reg, row);
          ++m.vrf_accesses;
        }
    }

    Lanes readWindow(const RowTarget& t, const LsdoCtrl& ctrl, Metrics& m)
    {
      const unsigned vlenb = cfg_.vlenBytes();
      Lanes window(cfg_.beat_bytes);
      std::map<unsigned, std::vector<uint8_t>> rows;
      const unsigned bytes = ctrl.n_elems * ctrl.eewb;
      for (unsigned k = ctrl.row_byte_offset; k < ctrl.row_byte_offset + bytes; ++k)
        {
          unsigned gb = t.window_base + k;
          unsigned reg = t.vreg + gb / vlenb;
          auto it = rows.find(reg);
          if (it == rows.end())
            {
              it = rows.emplace(reg, vrf_.readRow(reg)).first;
              ++m.vrf_accesses;
            }
          window[k] = ByteLane{true, it->second[gb % vlenb]};
        }
      return window;
    }

    void writeback(const IssueOp& op, const MemResponse& resp, Metrics& m)
    {
      Lanes out = organizeLoad(op.mop.lsdo, beatLanes(resp.data));
      if (auto* col = std::get_if<ColumnSpec>(&op.mop.target))
        {
          std::vector<uint8_t> packed(size_t(col->n_fields) * col->eewb);
          for (size_t i = 0; i < packed.size(); ++i)
            packed[i] = out[i].payload;
          vrf_.writeColumn(*col, packed);
          ++m.vrf_accesses;
        }
      else
        writeWindow(std::get<RowTarget>(op.mop.target), out, m);
    }

    Lanes storeBeat(const IssueOp& op, Metrics& m)
    {
      const MicroOp& mop = op.mop;
      if (op.chunk != no_chunk)
        {
          const Chunk& ch = chunks_[op.chunk];
          Lanes packed(cfg_.beat_bytes);
          unsigned seg = mop.elem_start - ch.first_seg;
          for (unsigned f = 0; f < mop.n_elems; ++f)
            for (unsigned b = 0; b < ch.eewb; ++b)
              packed[f * ch.eewb + b] = ByteLane{true, ch.rows[mop.field + f][seg * ch.eewb + b]};
          return organizeStore(mop.lsdo, packed);
        }
      if (auto* col = std::get_if<ColumnSpec>(&mop.target))
        {
          auto bytes = vrf_.readColumn(*col);
          ++m.vrf_accesses;
          Lanes packed(cfg_.beat_bytes);
          for (size_t i = 0; i < bytes.size(); ++i)
            packed[i] = ByteLane{true, bytes[i]};
          return organizeStore(mop.lsdo, packed);
        }
      return organizeStore(mop.lsdo, readWindow(std::get<RowTarget>(mop.target), mop.lsdo, m));
    }

    void drain(const IssueOp& op, const MemResponse& resp)
    {
      Chunk& ch = chunks_[op.chunk];
      Lanes packed = organizeLoad(op.mop.lsdo, beatLanes(resp.data));
      unsigned seg = op.mop.elem_start - ch.first_seg;
      for (unsigned f = 0; f < op.mop.n_elems; ++f)
        for (unsigned b = 0; b < ch.eewb; ++b)
          ch.rows[op.mop.field + f][seg * ch.eewb + b] = packed[f * ch.eewb + b].payload;
    }

    /// Byte range of register reg covered by field f of the chunk, as
    /// (offset in register, offset in buffer row, length).
    std::tuple<unsigned, unsigned, unsigned> chunkSpan(const Chunk& ch, unsigned f, unsigned reg) const
    {
      const unsigned vlenb = cfg_.vlenBytes();
      const unsigned regInGroup = reg - (ch.vd + f * ch.emul);
      const unsigned lo = ch.first_seg * ch.eewb, hi = lo + ch.n_segs * ch.eewb;
      const unsigned rlo = std::max(lo, regInGroup * vlenb);
      const unsigned rhi = std::min(hi, (regInGroup + 1) * vlenb);
      return {rlo - regInGroup * vlenb, rlo - lo, rhi - rlo};
    }

    void bufferWrite(const RetireItem& it, Metrics& m)
    {
      const Chunk& ch = chunks_[it.chunk];
      auto [regOff, bufOff, len] = chunkSpan(ch, it.field, it.reg);
      Lanes row(cfg_.vlenBytes());
      for (unsigned b = 0; b < len; ++b)
        row[regOff + b] = ByteLane{true, ch.rows[it.field][bufOff + b]};
      vrf_.writeRow(it.reg, row);
      ++m.vrf_accesses;
    }

    void bufferRead(const IssueOp& op, Metrics& m)
    {
      Chunk& ch = chunks_[op.chunk];
      auto [regOff, bufOff, len] = chunkSpan(ch, op.field, op.reg);
      auto row = vrf_.readRow(op.reg);
      ++m.vrf_accesses;
      for (unsigned b = 0; b < len; ++b)
        ch.rows[op.field][bufOff + b] = row[regOff + b];
    }

    VectorConfig cfg_;
    SimOptions opts_;
    ShiftedVRF vrf_;
    MemoryModel mem_;
    Metrics total_;
    uint64_t nextInstr_ = 0;
    std::vector<IssueOp> ops_;
    std::vector<Chunk> chunks_;
  };

}
