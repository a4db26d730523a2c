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


/// earthsim: generate traces, run them on the load/store unit models,
/// compare models against the reference semantics, and sweep presets.

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "earth/trace_io.hpp"

using namespace earth;

namespace
{

  /// Exit code for an architectural state mismatch.
  constexpr int exit_mismatch = 1;
  /// Exit code for any other failure.
  constexpr int exit_error = 2;

  VectorConfig
  resolveConfig(const std::string& arg)
  {
    if (arg == "p")
      return pConfig();
    if (arg == "e")
      return eConfig();
    return loadConfig(arg);
  }

  /// "lo" or "lo:hi".
  std::pair<int64_t, int64_t>
  parseRange(const std::string& s)
  {
    auto colon = s.find(':');
    try
      {
        if (colon == std::string::npos)
          {
            int64_t v = std::stoll(s);
            return {v, v};
          }
        return {std::stoll(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
      }
    catch (const std::exception&)
      {
        throw CLI::ValidationError("range", "expected N or LO:HI, got '" + s + "'");
      }
  }

  std::vector<Model>
  parseModels(const std::string& list)
  {
    std::vector<Model> out;
    std::stringstream ss(list);
    std::string name;
    while (std::getline(ss, name, ','))
      {
        auto m = parseModel(name);
        if (not m)
          throw CLI::ValidationError("models", "unknown model '" + name + "'");
        out.push_back(*m);
      }
    return out;
  }

  struct RunArgs
  {
    std::string config = "p";
    std::string trace;
    std::string model = "earth";
    std::string models = "earth,elementwise,segbuffer";
    std::string reorder = "inorder";
    std::string approach = "segment";
    std::string image;
    std::string dump_state;
    std::string out_csv;
    std::string out_json;
    unsigned latency = 20;
    unsigned window = 4;
    unsigned depth = 8;
    uint64_t seed = 1;
    uint64_t mem_seed = 0;
  };

  SimOptions
  simOptions(const RunArgs& a)
  {
    SimOptions o;
    o.latency = a.latency;
    o.reorder = a.reorder == "permute" ? ReorderMode::RandomPermute : ReorderMode::InOrder;
    o.reorder_window = a.window;
    o.seed = a.seed;
    o.lifq_depth = o.sifq_depth = o.lrob_capacity = a.depth;
    o.segment_approach = a.approach == "field" ? SegmentApproach::FieldWise : SegmentApproach::SegmentWise;
    return o;
  }

  ArchState
  initialState(const VectorConfig& cfg, const RunArgs& a)
  {
    if (a.image.empty())
      return ArchState::zeroed(cfg, ByteMemory(a.mem_seed));
    std::ifstream f(a.image, std::ios::binary);
    if (not f)
      throw Error(Errc::BadTrace, "cannot open memory image '" + a.image + "'");
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return ArchState::zeroed(cfg, ByteMemory(a.mem_seed, std::move(bytes)));
  }

  void
  addSimFlags(CLI::App* cmd, RunArgs& a)
  {
    cmd->add_option("--config", a.config, "Config file, or p / e for the presets")->capture_default_str();
    cmd->add_option("--latency", a.latency, "Memory latency in cycles")->capture_default_str();
    cmd->add_option("--reorder", a.reorder, "Response order")
      ->check(CLI::IsMember({"inorder", "permute"}))->capture_default_str();
    cmd->add_option("--window", a.window, "Reorder window")->capture_default_str();
    cmd->add_option("--depth", a.depth, "LIFQ/SIFQ depth and LROB capacity")->capture_default_str();
    cmd->add_option("--seed", a.seed, "Reorder seed")->capture_default_str();
    cmd->add_option("--mem-seed", a.mem_seed, "Seed of the memory fill")->capture_default_str();
    cmd->add_option("--image", a.image, "Binary memory image loaded at address 0");
    cmd->add_option("--segment", a.approach, "Segment decomposition for earth")
      ->check(CLI::IsMember({"segment", "field"}))->capture_default_str();
  }

  void
  writeReports(const std::vector<RunReport>& reps, const std::string& csv, const std::string& json)
  {
    if (not csv.empty())
      {
        std::ofstream f(csv);
        writeCsvHeader(f);
        for (auto& r : reps)
          writeCsvRows(f, r);
      }
    else
      {
        writeCsvHeader(std::cout);
        for (auto& r : reps)
          writeCsvRows(std::cout, r);
      }
    if (not json.empty())
      {
        nlohmann::json arr = nlohmann::json::array();
        for (auto& r : reps)
          arr.push_back(reportToJson(r));
        std::ofstream(json) << arr.dump(2) << '\n';
      }
  }

}


int
main(int argc, char** argv)
{
  CLI::App app{"EARTH vector load/store unit simulator"};
  app.require_subcommand(1);

  // gen
  WorkloadSpec ws;
  std::string genKind = "stride", genStride = "2", genFields = "2", genOut, genConfig = "p";
  auto* gen = app.add_subcommand("gen", "Emit a workload trace (one JSON object per line)");
  gen->add_option("--kind", genKind, "stride, segment or mixed")
    ->check(CLI::IsMember({"stride", "segment", "mixed"}))->capture_default_str();
  gen->add_option("--intensity", ws.intensity, "Percent of strided or segment instructions")
    ->check(CLI::Range(0u, 100u))->capture_default_str();
  gen->add_option("--stride", genStride, "Stride N or LO:HI in bytes")->capture_default_str();
  gen->add_option("--fields", genFields, "Fields N or LO:HI")->capture_default_str();
  gen->add_option("--n", ws.n_instrs, "Instructions")->capture_default_str();
  gen->add_option("--seed", ws.seed, "Generator seed")->capture_default_str();
  gen->add_option("--config", genConfig, "Config file, or p / e")->capture_default_str();
  gen->add_option("--out", genOut, "Output file (default stdout)");

  // run
  RunArgs runA;
  auto* run = app.add_subcommand("run", "Run a trace on one model and check it against the reference");
  addSimFlags(run, runA);
  run->add_option("--trace", runA.trace, "Trace file")->required();
  run->add_option("--model", runA.model, "earth, elementwise or segbuffer")
    ->check(CLI::IsMember({"earth", "elementwise", "segbuffer"}))->capture_default_str();
  run->add_option("--dump-state", runA.dump_state, "Write the final state dump here");

  // compare
  RunArgs cmpA;
  auto* cmp = app.add_subcommand("compare", "Run a trace on several models and report");
  addSimFlags(cmp, cmpA);
  cmp->add_option("--trace", cmpA.trace, "Trace file")->required();
  cmp->add_option("--models", cmpA.models, "Comma-separated model list")->capture_default_str();
  cmp->add_option("--out-csv", cmpA.out_csv, "CSV report (default stdout)");
  cmp->add_option("--out-json", cmpA.out_json, "JSON report");

  // sweep
  RunArgs swA;
  std::string preset = "all";
  unsigned swN = 200, jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Preset grids: strides 2..beat/2 and fields 2..8 at 20/40/80/95%");
  addSimFlags(sweep, swA);
  sweep->add_option("--preset", preset, "stride, segment or all")
    ->check(CLI::IsMember({"stride", "segment", "all"}))->capture_default_str();
  sweep->add_option("--n", swN, "Instructions per point")->capture_default_str();
  sweep->add_option("--jobs", jobs, "Points run concurrently")->check(CLI::Range(1u, 256u))->capture_default_str();
  sweep->add_option("--out-csv", swA.out_csv, "CSV report (default stdout)");
  sweep->add_option("--out-json", swA.out_json, "JSON report");

  CLI11_PARSE(app, argc, argv);

  try
    {
      if (*gen)
        {
          VectorConfig cfg = resolveConfig(genConfig);
          ws.kind = *parseWorkloadKind(genKind);
          std::tie(ws.stride_lo, ws.stride_hi) = parseRange(genStride);
          auto [flo, fhi] = parseRange(genFields);
          ws.fields_lo = unsigned(flo);
          ws.fields_hi = unsigned(fhi);
          if (ws.stride_lo > ws.stride_hi or ws.fields_lo > ws.fields_hi or ws.fields_lo < 1 or ws.fields_hi > 8)
            throw CLI::ValidationError("gen", "empty or out-of-range stride/fields range");
          auto trace = genWorkload(ws, cfg);
          if (genOut.empty())
            writeTrace(std::cout, trace);
          else
            {
              std::ofstream f(genOut);
              writeTrace(f, trace);
            }
          return 0;
        }

      if (*run)
        {
          VectorConfig cfg = resolveConfig(runA.config);
          auto trace = loadTrace(runA.trace);
          SimOptions o = simOptions(runA);
          o.model = *parseModel(runA.model);
          ArchState init = initialState(cfg, runA);
          ModelRun r = runModel(trace, cfg, o, init);
          if (not runA.dump_state.empty())
            std::ofstream(runA.dump_state) << dumpState(cfg, r.state);
          nlohmann::json j = metricsToJson(r.metrics);
          j["model"] = runA.model;
          std::cout << j.dump(2) << '\n';
          ArchState expected = oracleExec(trace, cfg, init);
          if (auto d = diffStates(cfg, expected, r.state))
            {
              std::cerr << "StateMismatch: " << *d << '\n';
              return exit_mismatch;
            }
          return 0;
        }

      if (*cmp)
        {
          VectorConfig cfg = resolveConfig(cmpA.config);
          auto trace = loadTrace(cmpA.trace);
          auto rep = compareModels(trace, cfg, parseModels(cmpA.models), simOptions(cmpA),
                                   initialState(cfg, cmpA));
          writeReports({rep}, cmpA.out_csv, cmpA.out_json);
          return 0;
        }

      if (*sweep)
        {
          VectorConfig cfg = resolveConfig(swA.config);
          struct Point { WorkloadSpec spec; ReportPoint label; };
          std::vector<Point> points;
          for (unsigned in : presetIntensities())
            {
              if (preset != "segment")
                for (int64_t s : presetStrides(cfg))
                  {
                    WorkloadSpec w;
                    w.kind = WorkloadKind::StrideIntensive;
                    w.intensity = in;
                    w.stride_lo = w.stride_hi = s;
                    w.n_instrs = swN;
                    w.seed = swA.seed;
                    points.push_back({w, {"strided", "stride=" + std::to_string(s), in}});
                  }
              if (preset != "stride")
                for (unsigned f : presetFields())
                  {
                    WorkloadSpec w;
                    w.kind = WorkloadKind::SegmentIntensive;
                    w.intensity = in;
                    w.fields_lo = w.fields_hi = f;
                    w.n_instrs = swN;
                    w.seed = swA.seed;
                    points.push_back({w, {"seg_unit", "fields=" + std::to_string(f), in}});
                  }
            }

          const SimOptions o = simOptions(swA);
          const ArchState init = initialState(cfg, swA);
          auto runPoint = [&](const Point& p) {
            auto trace = genWorkload(p.spec, cfg);
            return compareModels(trace, cfg, {Model::ElementWise, Model::SegBuffer, Model::Earth}, o, init, p.label);
          };

          // Each point owns its simulators; results merge in grid order.
          std::vector<RunReport> reps(points.size());
          for (size_t k = 0; k < points.size(); k += jobs)
            {
              std::vector<std::future<RunReport>> fs;
              for (size_t t = k; t < std::min(points.size(), k + jobs); ++t)
                fs.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, runPoint,
                                        std::cref(points[t])));
              for (size_t t = 0; t < fs.size(); ++t)
                reps[k + t] = fs[t].get();
            }
          writeReports(reps, swA.out_csv, swA.out_json);
          return 0;
        }
    }
  catch (const Error& e)
    {
      std::cerr << e.what() << '\n';
      return e.code() == Errc::StateMismatch ? exit_mismatch : exit_error;
    }
  catch (const CLI::Error& e)
    {
      return app.exit(e);
    }
  catch (const std::exception& e)
    {
      std::cerr << "error: " << e.what() << '\n';
      return exit_error;
    }
  return 0;
}
