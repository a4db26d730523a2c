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
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vlsu.hpp"

namespace earth
{

  /// Architectural state: all register bytes plus memory.
  struct ArchState
  {
    std::vector<uint8_t> regs;   // n_vregs * VLENB bytes, register-major.
    ByteMemory mem;

    static ArchState zeroed(const VectorConfig& cfg, ByteMemory mem = ByteMemory{})
    {
      return {std::vector<uint8_t>(size_t(VectorConfig::n_vregs) * cfg.vlenBytes(), 0), std::move(mem)};
    }
  };


  /// First difference between two states, or nullopt when byte-identical.
  /// Memory is compared over the union of written addresses.
  inline std::optional<std::string>
  diffStates(const VectorConfig& cfg, const ArchState& a, const ArchState& b)
  {
    const unsigned vlenb = cfg.vlenBytes();
    if (a.regs.size() != b.regs.size())
      return "register file sizes differ";
    for (size_t k = 0; k < a.regs.size(); ++k)
      if (a.regs[k] != b.regs[k])
        {
          std::ostringstream os;
          os << "v" << k / vlenb << " byte " << k % vlenb << ": "
             << unsigned(a.regs[k]) << " != " << unsigned(b.regs[k]);
          return os.str();
        }
    std::vector<uint64_t> addrs;
    for (auto& [addr, v] : a.mem.written())
      addrs.push_back(addr);
    for (auto& [addr, v] : b.mem.written())
      addrs.push_back(addr);
    std::sort(addrs.begin(), addrs.end());
    for (uint64_t addr : addrs)
      if (a.mem.read(addr) != b.mem.read(addr))
        {
          std::ostringstream os;
          os << "memory 0x" << std::hex << addr << std::dec << ": "
             << unsigned(a.mem.read(addr)) << " != " << unsigned(b.mem.read(addr));
          return os.str();
        }
    return std::nullopt;
  }

  inline void
  requireEqualStates(const VectorConfig& cfg, const ArchState& expected, const ArchState& actual,
                     std::string_view who = "model")
  {
    if (auto d = diffStates(cfg, expected, actual))
      throw Error(Errc::StateMismatch, std::string(who) + ": " + *d);
  }


  /// Canonical text dump: registers in order, then written memory bytes
  /// in ascending address order.
  inline std::string
  dumpState(const VectorConfig& cfg, const ArchState& s)
  {
    static const char* hex = "0123456789abcdef";
    const unsigned vlenb = cfg.vlenBytes();
    std::string out;
    for (unsigned r = 0; r < VectorConfig::n_vregs; ++r)
      {
        out += "v" + std::to_string(r) + (r < 10 ? "  " : " ");
        for (unsigned b = vlenb; b-- > 0;)
          {
            uint8_t v = s.regs[size_t(r) * vlenb + b];
            out += hex[v >> 4];
            out += hex[v & 15];
          }
        out += '\n';
      }
    for (auto& [addr, v] : s.mem.written())
      {
        std::ostringstream os;
        os << "m " << std::hex << addr << ' ' << unsigned(v >> 4) << unsigned(v & 15) << '\n';
        out += os.str();
      }
    return out;
  }


  /// Element-at-a-time reference execution.
  inline ArchState
  oracleExec(std::span<const VecMemInstr> trace, const VectorConfig& cfg, ArchState state)
  {
    const unsigned vlenb = cfg.vlenBytes();
    for (const auto& in : trace)
      {
        validateInstr(cfg, in);
        std::copy(in.data.begin(), in.data.end(), state.regs.begin() + size_t(in.vd) * vlenb);
        const unsigned e = in.eewb();
        for (unsigned i = 0; i < in.vl; ++i)
          for (unsigned j = 0; j < in.fields; ++j)
            {
              const uint64_t addr = elementAddress(in, i, j);
              const size_t pos = size_t(in.vd + j * in.emul) * vlenb + size_t(i) * e;
              for (unsigned b = 0; b < e; ++b)
                {
                  if (in.dir == Direction::Load)
                    state.regs[pos + b] = state.mem.read(addr + b);
                  else
                    state.mem.write(addr + b, state.regs[pos + b]);
                }
            }
      }
    return state;
  }


  struct ModelRun
  {
    ArchState state;
    Metrics metrics;
  };

  /// Run a trace on one timing model starting from `initial`.
  inline ModelRun
  runModel(std::span<const VecMemInstr> trace, const VectorConfig& cfg, SimOptions opts,
           const ArchState& initial)
  {
    Simulator sim(cfg, opts, initial.mem);
    const unsigned vlenb = cfg.vlenBytes();
    for (unsigned r = 0; r < VectorConfig::n_vregs; ++r)
      sim.vrf().writeRow(r, std::span<const uint8_t>(initial.regs.data() + size_t(r) * vlenb, vlenb));
    Metrics m = sim.run(trace);
    ModelRun out{ArchState::zeroed(cfg, sim.memory()), m};
    for (unsigned r = 0; r < VectorConfig::n_vregs; ++r)
      {
        auto row = sim.vrf().readRow(r);
        std::copy(row.begin(), row.end(), out.state.regs.begin() + size_t(r) * vlenb);
      }
    return out;
  }

  inline ModelRun
  runModel(std::span<const VecMemInstr> trace, const VectorConfig& cfg, Model model,
           const ArchState& initial)
  {
    SimOptions opts;
    opts.model = model;
    return runModel(trace, cfg, opts, initial);
  }


  enum class WorkloadKind { StrideIntensive, SegmentIntensive, Mixed };

  inline std::string_view
  workloadKindName(WorkloadKind k)
  {
    switch (k)
      {
      case WorkloadKind::StrideIntensive:  return "stride";
      case WorkloadKind::SegmentIntensive: return "segment";
      case WorkloadKind::Mixed:            return "mixed";
      }
    return "?";
  }

  inline std::optional<WorkloadKind>
  parseWorkloadKind(std::string_view s)
  {
    for (auto k : {WorkloadKind::StrideIntensive, WorkloadKind::SegmentIntensive, WorkloadKind::Mixed})
      if (workloadKindName(k) == s)
        return k;
    return std::nullopt;
  }


  struct WorkloadSpec
  {
    WorkloadKind kind = WorkloadKind::StrideIntensive;
    unsigned intensity = 95;          // Percent of intensive instructions.
    int64_t stride_lo = 2, stride_hi = 2;
    unsigned fields_lo = 2, fields_hi = 2;
    unsigned n_instrs = 100;
    uint64_t seed = 1;
    uint64_t arena_bytes = uint64_t(1) << 20;
  };


  namespace detail
  {
    inline std::mt19937_64
    slotRng(uint64_t seed, uint64_t slot, uint64_t salt)
    {
      std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(slot), uint32_t(slot >> 32), uint32_t(salt)};
      return std::mt19937_64(seq);
    }

    template <typename T>
    T pick(std::mt19937_64& rng, T lo, T hi)
    { return std::uniform_int_distribution<T>(lo, hi)(rng); }

    /// Any legal instruction: all patterns, widths, groupings, negative
    /// and overlapping strides, indices, and register preloads.
    inline VecMemInstr
    randomInstr(const VectorConfig& cfg, std::mt19937_64& rng, uint64_t arena)
    {
      for (;;)
        {
          VecMemInstr in;
          in.pattern = Pattern(pick(rng, 0, 5));
          in.dir = pick(rng, 0, 1) ? Direction::Store : Direction::Load;
          std::vector<unsigned> eews;
          for (unsigned w : {8u, 16u, 32u, 64u})
            if (w <= cfg.elen_bits)
              eews.push_back(w);
          in.eew_bits = eews[pick<size_t>(rng, 0, eews.size() - 1)];
          in.fields = isSegment(in.pattern) ? pick(rng, 1u, 8u) : 1u;
          std::vector<unsigned> emuls;
          for (unsigned m : {1u, 2u, 4u, 8u})
            if (m * in.fields <= VectorConfig::n_banks)
              emuls.push_back(m);
          in.emul = emuls[pick<size_t>(rng, 0, emuls.size() - 1)];
          in.vd = pick(rng, 0u, VectorConfig::n_vregs - in.groupRegs());
          const unsigned e = in.eewb();
          const unsigned vlmax = in.emul * cfg.vlenBytes() / e;
          in.vl = pick(rng, 0, 5) == 0 ? pick(rng, 0u, vlmax) : pick(rng, 1u, std::min(vlmax, 24u));

          in.base = arena / 4 + pick<uint64_t>(rng, 0, arena / 4);
          if (pick(rng, 0, 3) != 0)
            in.base -= in.base % e;

          switch (pick(rng, 0, 3))
            {
            case 0:  in.stride = int64_t(e) * pick(rng, -4, 8); break;
            case 1:  in.stride = pick<int64_t>(rng, -300, 300); break;
            case 2:  in.stride = int64_t(e) * pick(rng, -40, 40); break;
            default: in.stride = pick<int64_t>(rng, 0, e); break;
            }
          if (not hasStride(in.pattern))
            in.stride = 0;
          if (isIndexed(in.pattern))
            for (unsigned i = 0; i < in.vl; ++i)
              {
                int64_t ix = pick<int64_t>(rng, -256, 2048);
                in.indices.push_back(ix - ix % int64_t(e));
              }
          if (pick(rng, 0, 1))
            {
              size_t n = pick<size_t>(rng, 1, size_t(in.groupRegs()) * cfg.vlenBytes());
              for (size_t k = 0; k < n; ++k)
                in.data.push_back(uint8_t(pick(rng, 0, 255)));
            }
          try
            {
              return validateInstr(cfg, in);
            }
          catch (const Error&)
            {
              // Draw again; straddling or out-of-range picks are rare.
            }
        }
    }
  }


  /// Deterministic trace for a workload. Every slot draws from its own
  /// stream, and the set of intensive slots grows with intensity, so sweeps
  /// over stride or intensity change only what they vary.
  inline std::vector<VecMemInstr>
  genWorkload(const WorkloadSpec& spec, const VectorConfig& cfg)
  {
    std::vector<VecMemInstr> trace;
    trace.reserve(spec.n_instrs);
    if (spec.kind == WorkloadKind::Mixed)
      {
        for (unsigned s = 0; s < spec.n_instrs; ++s)
          {
            auto rng = detail::slotRng(spec.seed, s, 3);
            trace.push_back(detail::randomInstr(cfg, rng, spec.arena_bytes));
          }
        return trace;
      }

    std::vector<unsigned> order(spec.n_instrs);
    std::iota(order.begin(), order.end(), 0u);
    auto prng = detail::slotRng(spec.seed, uint64_t(-1), 1);
    std::shuffle(order.begin(), order.end(), prng);
    const unsigned n_int = unsigned((uint64_t(spec.n_instrs) * std::min(spec.intensity, 100u) + 50) / 100);
    std::vector<bool> intensive(spec.n_instrs, false);
    for (unsigned k = 0; k < n_int; ++k)
      intensive[order[k]] = true;

    const unsigned vlenb = cfg.vlenBytes();
    for (unsigned s = 0; s < spec.n_instrs; ++s)
      {
        auto rng = detail::slotRng(spec.seed, s, 2);
        const bool store = detail::pick(rng, 0, 1) == 1;
        const uint64_t base = detail::pick<uint64_t>(rng, 0, spec.arena_bytes / 2);
        const uint64_t param = detail::pick<uint64_t>(rng, 0, uint64_t(-1) >> 1);
        const unsigned vdDraw = detail::pick(rng, 0u, VectorConfig::n_vregs - 1);

        VecMemInstr in;
        in.dir = store ? Direction::Store : Direction::Load;
        in.eew_bits = 8;
        in.vl = vlenb;
        in.base = base;
        in.vd = vdDraw;
        if (intensive[s] and spec.kind == WorkloadKind::StrideIntensive)
          {
            in.pattern = Pattern::Strided;
            const uint64_t span = uint64_t(spec.stride_hi - spec.stride_lo) + 1;
            in.stride = spec.stride_lo + int64_t(param % span);
          }
        else if (intensive[s])
          {
            in.pattern = Pattern::SegUnitStride;
            in.fields = spec.fields_lo + unsigned(param % (spec.fields_hi - spec.fields_lo + 1));
            in.vd = vdDraw % (VectorConfig::n_vregs - in.fields + 1);
          }
        else
          in.pattern = Pattern::UnitStride;
        trace.push_back(validateInstr(cfg, in));
      }
    return trace;
  }


  /// One point of a report: what workload the numbers describe.
  struct ReportPoint
  {
    std::string pattern = "trace";
    std::string param = "-";
    unsigned intensity = 0;
  };

  struct ModelResult
  {
    Model model = Model::Earth;
    Metrics metrics;
  };

  struct RunReport
  {
    ReportPoint point;
    VectorConfig cfg;
    uint64_t seed = 0;
    std::vector<ModelResult> results;

    const Metrics* find(Model m) const
    {
      for (auto& r : results)
        if (r.model == m)
          return &r.metrics;
      return nullptr;
    }

    /// ElementWise requests over this model's requests.
    double requestReduction(Model m) const
    {
      auto* b = find(Model::ElementWise);
      auto* x = find(m);
      if (not b or not x or x->mem_requests == 0)
        return 0.0;
      return double(b->mem_requests) / double(x->mem_requests);
    }

    /// ElementWise cycles over this model's cycles.
    double speedup(Model m) const
    {
      auto* b = find(Model::ElementWise);
      auto* x = find(m);
      if (not b or not x or x->sim_cycles == 0)
        return 0.0;
      return double(b->sim_cycles) / double(x->sim_cycles);
    }
  };


  /// Run every model on the trace, check each final state against the
  /// oracle, and collect metrics. ElementWise is always run as the baseline.
  inline RunReport
  compareModels(std::span<const VecMemInstr> trace, const VectorConfig& cfg, std::vector<Model> models,
                SimOptions opts, const ArchState& initial, ReportPoint point = {})
  {
    if (std::find(models.begin(), models.end(), Model::ElementWise) == models.end())
      models.insert(models.begin(), Model::ElementWise);
    const ArchState expected = oracleExec(trace, cfg, initial);

    RunReport rep;
    rep.point = std::move(point);
    rep.cfg = cfg;
    rep.seed = opts.seed;
    for (Model m : models)
      {
        opts.model = m;
        ModelRun run = runModel(trace, cfg, opts, initial);
        requireEqualStates(cfg, expected, run.state, modelName(m));
        rep.results.push_back({m, run.metrics});
      }
    return rep;
  }


  inline void
  writeCsvHeader(std::ostream& os)
  { os << "model,pattern,param,intensity,requests,beats,cycles,speedup_vs_elementwise\n"; }

  inline void
  writeCsvRows(std::ostream& os, const RunReport& rep)
  {
    for (auto& r : rep.results)
      {
        char speed[32];
        std::snprintf(speed, sizeof speed, "%.4f", rep.speedup(r.model));
        os << modelName(r.model) << ',' << rep.point.pattern << ',' << rep.point.param << ','
           << rep.point.intensity << ',' << r.metrics.mem_requests << ',' << r.metrics.beats_transferred
           << ',' << r.metrics.sim_cycles << ',' << speed << '\n';
      }
  }


  /// Preset sweep grids.
  inline std::vector<unsigned> presetIntensities()
  { return {20, 40, 80, 95}; }

  inline std::vector<int64_t>
  presetStrides(const VectorConfig& cfg)
  {
    std::vector<int64_t> s;
    for (int64_t v = 2; v <= int64_t(cfg.beat_bytes / 2); v *= 2)
      s.push_back(v);
    return s;
  }

  inline std::vector<unsigned> presetFields()
  { return {2, 3, 4, 5, 6, 7, 8}; }

}
