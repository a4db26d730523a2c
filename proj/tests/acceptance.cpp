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


/// Acceptance suite: one PASS/FAIL line per criterion, each with its time
/// budget. Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "earth/bench.hpp"

using namespace earth;

namespace
{

  struct Outcome
  {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why)
    {
      if (pass)
        detail = why;
      pass = false;
    }
  };

  std::string str(double v)
  {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return b;
  }


  Outcome coalescingHeadline()
  {
    Outcome o;
    VectorConfig cfg = pConfig();
    VecMemInstr in;
    in.pattern = Pattern::Strided;
    in.eew_bits = 8;
    in.stride = 2;
    in.vl = 32;
    std::vector<VecMemInstr> tr{in};
    ArchState init = ArchState::zeroed(cfg, ByteMemory(1));
    auto earth = runModel(tr, cfg, Model::Earth, init);
    auto elem = runModel(tr, cfg, Model::ElementWise, init);
    if (earth.metrics.mem_requests != 1)
      o.fail("earth issued " + std::to_string(earth.metrics.mem_requests) + " requests");
    if (elem.metrics.mem_requests != 32)
      o.fail("element-wise issued " + std::to_string(elem.metrics.mem_requests) + " requests");
    if (diffStates(cfg, oracleExec(tr, cfg, init), earth.state))
      o.fail("earth state differs from the reference");
    if (o.pass)
      o.detail = "earth 1 request, element-wise 32";
    return o;
  }


  Outcome scgExample()
  {
    Outcome o;
    const std::vector<unsigned> shifts{2, 2, 4, 4, 6, 6, 8, 8};
    for (unsigned lanes : {16u, 64u})
      {
        ShiftPlan p = genShiftPlan(lanes, 4, 2, 2, 4, NetDirection::Gather);
        for (unsigned i = 0; i < lanes; ++i)
          {
            bool want = i < 8;
            if (p.lanes[i].valid != want or (want and p.lanes[i].shift_cnt != shifts[i]))
              o.fail("lane " + std::to_string(i) + " on " + std::to_string(lanes) + " lanes");
          }
        Lanes beat(lanes);
        for (unsigned c = 0; c < lanes; ++c)
          beat[c] = ByteLane{true, uint8_t(c)};
        Lanes g = dromGather({NetDirection::Gather, 4, 2, 2, 4, beat});
        const std::vector<uint8_t> from{2, 3, 6, 7, 10, 11, 14, 15};
        for (unsigned k = 0; k < 8; ++k)
          if (not g[k].valid or g[k].payload != from[k])
            o.fail("gathered byte " + std::to_string(k));
      }
    if (o.pass)
      o.detail = "[2,3]->[0,1] .. [14,15]->[6,7], shifts 2,2,4,4,6,6,8,8";
    return o;
  }


  /// Random legal SCG parameters on a beat of n lanes.
  struct ScgCase
  {
    unsigned stride, eewb, offset, n_elems;
  };

  ScgCase randomCase(std::mt19937_64& rng, unsigned n)
  {
    for (;;)
      {
        unsigned e = 1u << (rng() % 4);
        if (e > n)
          continue;
        unsigned s = e + unsigned(rng() % n);
        unsigned off = unsigned(rng() % (n - e + 1));
        unsigned kmax = (n - off - e) / s + 1;
        return {s, e, off, 1 + unsigned(rng() % kmax)};
      }
  }


  Outcome conflictFreedom()
  {
    Outcome o;
    std::mt19937_64 rng(2024);
    unsigned failures = 0, sets = 0;
    for (unsigned n : {8u, 16u, 64u})
      for (int t = 0; t < 10000; ++t)
        {
          ScgCase c = randomCase(rng, n);
          NetDirection d = t % 2 ? NetDirection::Scatter : NetDirection::Gather;
          ShiftPlan p = genShiftPlan(n, c.stride, c.eewb, c.offset, c.n_elems, d);
          ShiftNetwork net(n, d);
          auto routes = p.routes();
          ++sets;
          if (not checkConflictFree(net, routes))
            {
              ++failures;
              continue;
            }
          try
            {
              NodeControl ctrl = planRoutes(net, routes);
              Lanes in(n);
              for (auto& r : routes)
                in[r.src] = ByteLane{true, uint8_t(r.src)};
              Lanes out = route(net, ctrl, in);
              for (auto& r : routes)
                if (out[*r.target(net)] != in[r.src])
                  throw Error(Errc::ControlMismatch, "misdelivered lane");
            }
          catch (const Error&)
            {
              ++failures;
            }
        }
    if (failures)
      o.fail(std::to_string(failures) + " of " + std::to_string(sets) + " route sets failed");
    else
      o.detail = std::to_string(sets) + " route sets on 8/16/64 lanes, 0 collisions";
    return o;
  }


  bool roundTrip(std::mt19937_64& rng, unsigned n, const ScgCase& c)
  {
    Lanes beat(n);
    for (auto& l : beat)
      l = ByteLane{true, uint8_t(rng())};
    Lanes g = dromGather({NetDirection::Gather, c.stride, c.eewb, c.offset, c.n_elems, beat});
    Lanes back = dromScatter({NetDirection::Scatter, c.stride, c.eewb, c.offset, c.n_elems, g});
    std::vector<bool> element(n, false);
    for (unsigned el = 0; el < c.n_elems; ++el)
      for (unsigned b = 0; b < c.eewb; ++b)
        element[c.offset + el * c.stride + b] = true;
    for (unsigned k = 0; k < n; ++k)
      if (element[k] ? back[k] != beat[k] : back[k].valid)
        return false;
    return true;
  }

  Outcome inversion()
  {
    Outcome o;
    std::mt19937_64 rng(77);
    unsigned cases = 0, failures = 0;
    const unsigned n = 16;
    for (unsigned e = 1; e <= n; e *= 2)
      for (unsigned s = e; s <= n; ++s)
        for (unsigned off = 0; off + e <= n; ++off)
          for (unsigned k = 1; off + (k - 1) * s + e <= n; ++k)
            {
              ++cases;
              try
                {
                  if (not roundTrip(rng, n, {s, e, off, k}))
                    ++failures;
                }
              catch (const Error&)
                {
                  ++failures;
                }
            }
    const unsigned exhaustive = cases;
    for (int t = 0; t < 10000; ++t)
      {
        ++cases;
        try
          {
            if (not roundTrip(rng, 64, randomCase(rng, 64)))
              ++failures;
          }
        catch (const Error&)
          {
            ++failures;
          }
      }
    if (failures)
      o.fail(std::to_string(failures) + " of " + std::to_string(cases) + " cases");
    else
      o.detail = std::to_string(exhaustive) + " exhaustive at 16 lanes + 10000 random at 64, all identity";
    return o;
  }


  Outcome rcvrfMapping()
  {
    Outcome o;
    for (auto [vlen, elen] : {std::pair{256u, 64u}, std::pair{512u, 64u}})
      {
        VectorConfig cfg = validateConfig({vlen, elen, vlen, 512});
        const std::string tag = "(" + std::to_string(vlen) + "," + std::to_string(elen) + ") ";
        std::set<std::pair<unsigned, unsigned>> slots;
        for (unsigned r = 0; r < 32; ++r)
          for (unsigned j = 0; j < cfg.blocksPerReg(); ++j)
            {
              BankSlot s = mapBlock(cfg, r, j);
              if (s.row >= cfg.n_rows or not slots.insert({s.bank, s.row}).second)
                o.fail(tag + "mapping not injective at v" + std::to_string(r));
              if (j > 0 and s.bank != (mapBlock(cfg, r, j - 1).bank + 1) % 8)
                o.fail(tag + "blocks of v" + std::to_string(r) + " not in consecutive banks");
              if (j > 0 and s.row != mapBlock(cfg, r, 0).row)
                o.fail(tag + "row depends on the block");
            }
        if (slots.size() != size_t(cfg.n_rows) * 8)
          o.fail(tag + "mapping not surjective");

        // Any column access (fields spaced emul apart, at most 8 registers) hits distinct banks.
        for (unsigned emul : {1u, 2u, 4u, 8u})
          for (unsigned nf = 1; nf * emul <= 8; ++nf)
            for (unsigned base = 0; base + (nf - 1) * emul < 32; ++base)
              for (unsigned blk = 0; blk < cfg.blocksPerReg(); ++blk)
                {
                  std::set<unsigned> banks;
                  for (unsigned f = 0; f < nf; ++f)
                    banks.insert(mapBlock(cfg, base + f * emul, blk).bank);
                  if (banks.size() != nf)
                    o.fail(tag + "column bank conflict at v" + std::to_string(base));
                }

        for (unsigned r : {0u, 1u, 7u})
          if (mapBlock(cfg, r, 0) != BankSlot{r, r})
            o.fail(tag + "v" + std::to_string(r) + " is not at row " + std::to_string(r) + " bank " +
                   std::to_string(r));
      }
    if (o.pass)
      o.detail = "bijective, consecutive banks, conflict-free columns; v0/v1/v7 at row=bank=0/1/7";
    return o;
  }


  Outcome oracleEquivalence()
  {
    Outcome o;
    const std::vector<Model> models{Model::Earth, Model::ElementWise, Model::SegBuffer};
    std::set<Pattern> patterns;
    bool negative = false;
    unsigned runs = 0, mismatches = 0;

    auto check = [&](const std::vector<VecMemInstr>& tr, const VectorConfig& cfg, const ArchState& init,
                     const SimOptions& base, uint64_t seed) {
      const ArchState expect = oracleExec(tr, cfg, init);
      for (Model m : models)
        {
          SimOptions opt = base;
          opt.model = m;
          ++runs;
          try
            {
              auto r = runModel(tr, cfg, opt, init);
              if (auto d = diffStates(cfg, expect, r.state))
                {
                  if (not mismatches++)
                    o.fail("seed " + std::to_string(seed) + " " + std::string(modelName(m)) + ": " + *d);
                }
            }
          catch (const Error& e)
            {
              if (not mismatches++)
                o.fail("seed " + std::to_string(seed) + " " + std::string(modelName(m)) + ": " + e.what());
            }
        }
    };

    for (uint64_t seed = 1; seed <= 1000; ++seed)
      {
        VectorConfig cfg = seed % 2 ? pConfig() : eConfig();
        WorkloadSpec ws;
        ws.kind = WorkloadKind::Mixed;
        ws.n_instrs = 8;
        ws.seed = seed;
        auto tr = genWorkload(ws, cfg);
        for (auto& in : tr)
          {
            patterns.insert(in.pattern);
            negative |= hasStride(in.pattern) and in.stride < 0;
          }
        ArchState init = ArchState::zeroed(cfg, ByteMemory(seed));
        std::mt19937_64 rng(seed);
        for (auto& b : init.regs)
          b = uint8_t(rng());
        SimOptions opt;
        opt.latency = unsigned(seed % 24);
        check(tr, cfg, init, opt, seed);

        // A subset replays under 100 response permutations.
        if (seed % 50 == 0)
          for (uint64_t p = 1; p <= 100; ++p)
            {
              SimOptions perm = opt;
              perm.reorder = ReorderMode::RandomPermute;
              perm.reorder_window = 2 + unsigned(p % 7);
              perm.seed = p;
              check(tr, cfg, init, perm, seed);
            }
      }
    if (patterns.size() != 6)
      o.fail("only " + std::to_string(patterns.size()) + " patterns generated");
    if (not negative)
      o.fail("no negative strides generated");
    if (o.pass)
      o.detail = std::to_string(runs) + " model runs (1000 traces, 20 x 100 permutations), 0 mismatches";
    return o;
  }


  Outcome segmentSplit()
  {
    Outcome o;
    VectorConfig cfg = pConfig();
    VecMemInstr in;
    in.pattern = Pattern::SegUnitStride;
    in.fields = 2;
    in.vl = 8;
    in.eew_bits = 8;
    auto sw = splitSegment(cfg, in, SegmentApproach::SegmentWise);
    auto fw = splitSegment(cfg, in, SegmentApproach::FieldWise);
    if (sw.size() != 8)
      o.fail("segment-wise gave " + std::to_string(sw.size()) + " mops");
    for (auto& m : sw)
      if (m.n_elems * m.lsdo.eewb != 2)
        o.fail("segment-wise mop moves " + std::to_string(m.n_elems * m.lsdo.eewb) + " bytes");
    if (fw.size() != 2)
      o.fail("field-wise gave " + std::to_string(fw.size()) + " mops");
    for (auto& m : fw)
      if (m.n_elems * m.lsdo.eewb != 8 or m.lsdo.stride_abs != 2)
        o.fail("field-wise mop is not an 8-byte stride-2 access");
    if (o.pass)
      o.detail = "segment-wise 8 x 2 bytes, field-wise 2 x 8 bytes";
    return o;
  }


  Outcome trends()
  {
    Outcome o;
    VectorConfig cfg = pConfig();
    const auto intens = presetIntensities();
    const auto strides = presetStrides(cfg);
    const unsigned n = 200;
    const uint64_t seed = 2025;
    std::vector<std::vector<double>> red(intens.size(), std::vector<double>(strides.size()));

    for (size_t a = 0; a < intens.size(); ++a)
      for (size_t b = 0; b < strides.size(); ++b)
        {
          WorkloadSpec ws;
          ws.kind = WorkloadKind::StrideIntensive;
          ws.intensity = intens[a];
          ws.stride_lo = ws.stride_hi = strides[b];
          ws.n_instrs = n;
          ws.seed = seed;
          auto tr = genWorkload(ws, cfg);
          auto rep = compareModels(tr, cfg, {Model::Earth}, SimOptions{}, ArchState::zeroed(cfg, ByteMemory(seed)));
          red[a][b] = rep.requestReduction(Model::Earth);
        }

    const double headline = red[intens.size() - 1][0];
    if (headline < 16.0)
      o.fail("reduction at stride 2 / 95% is " + str(headline));
    for (size_t a = 0; a < intens.size(); ++a)
      for (size_t b = 1; b < strides.size(); ++b)
        if (red[a][b] > red[a][b - 1])
          o.fail("reduction grows from stride " + std::to_string(strides[b - 1]) + " to " +
                 std::to_string(strides[b]) + " at " + std::to_string(intens[a]) + "%");
    for (size_t b = 0; b < strides.size(); ++b)
      for (size_t a = 1; a < intens.size(); ++a)
        if (not (red[a][b] > red[a - 1][b]))
          o.fail("reduction not increasing in intensity at stride " + std::to_string(strides[b]));

    double worst = 0.0;
    for (unsigned in : intens)
      for (unsigned f : presetFields())
        {
          WorkloadSpec ws;
          ws.kind = WorkloadKind::SegmentIntensive;
          ws.intensity = in;
          ws.fields_lo = ws.fields_hi = f;
          ws.n_instrs = n;
          ws.seed = seed;
          auto tr = genWorkload(ws, cfg);
          auto rep = compareModels(tr, cfg, {Model::Earth, Model::SegBuffer}, SimOptions{},
                                   ArchState::zeroed(cfg, ByteMemory(seed)));
          const double e = double(rep.find(Model::Earth)->sim_cycles);
          const double s = double(rep.find(Model::SegBuffer)->sim_cycles);
          worst = std::max(worst, std::abs(e - s) / s);
          if (e > s)
            o.fail("earth slower than the segment buffer at fields " + std::to_string(f) + ", " +
                   std::to_string(in) + "%");
          if (std::abs(e - s) > 0.05 * s)
            o.fail("earth/segbuffer cycle gap " + str(100 * std::abs(e - s) / s) + "% at fields " +
                   std::to_string(f) + ", " + std::to_string(in) + "%");
        }
    if (o.pass)
      o.detail = "reduction " + str(headline) + "x at stride 2 / 95%, monotone in stride and intensity; "
                 "segment gap <= " + str(100 * worst) + "%, earth never slower";
    return o;
  }


  struct Criterion
  {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };

}


int
main()
{
  const std::vector<Criterion> all{
    {1, "coalescing headline", 1, coalescingHeadline},
    {2, "shift count example", 1, scgExample},
    {3, "conflict freedom", 60, conflictFreedom},
    {4, "gather/scatter inversion", 120, inversion},
    {5, "register file mapping", 10, rcvrfMapping},
    {6, "oracle equivalence", 300, oracleEquivalence},
    {7, "segment split counts", 1, segmentSplit},
    {8, "trend replication", 600, trends},
  };

  int failed = 0;
  for (const auto& c : all)
    {
      auto t0 = std::chrono::steady_clock::now();
      Outcome o;
      try
        {
          o = c.run();
        }
      catch (const std::exception& e)
        {
          o.fail(std::string("exception: ") + e.what());
        }
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (secs > c.budget_s)
        o.fail("took " + str(secs) + " s, budget " + str(c.budget_s) + " s");
      failed += not o.pass;
      std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                  o.detail.c_str(), secs);
      std::fflush(stdout);
    }
  return failed;
}
