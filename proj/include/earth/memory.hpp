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
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "config.hpp"

namespace earth
{

  /// Sparse byte-addressed memory. Unwritten bytes come from an optional
  /// image loaded at address 0, else from a deterministic seeded fill.
  class ByteMemory
  {
  public:
    explicit ByteMemory(uint64_t seed = 0)
      : seed_(seed)
    { }

    ByteMemory(uint64_t seed, std::vector<uint8_t> image)
      : seed_(seed), image_(std::make_shared<const std::vector<uint8_t>>(std::move(image)))
    { }

    uint64_t seed() const
    { return seed_; }

    uint8_t read(uint64_t addr) const
    {
      if (auto it = written_.find(addr); it != written_.end())
        return it->second;
      return initial(addr);
    }

    void write(uint64_t addr, uint8_t value)
    { written_[addr] = value; }

    /// Value the byte had before any write.
    uint8_t initial(uint64_t addr) const
    {
      if (image_ and addr < image_->size())
        return (*image_)[addr];
      return fill(seed_, addr);
    }

    /// Addresses written so far, ascending.
    const std::map<uint64_t, uint8_t>& written() const
    { return written_; }

    static uint8_t fill(uint64_t seed, uint64_t addr)
    {
      // splitmix64 over the 8-byte word, pick the byte lane.
      uint64_t z = seed * 0x9e3779b97f4a7c15ull + (addr >> 3) + 0x632be59bd9b4e019ull;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      z ^= z >> 31;
      return uint8_t(z >> ((addr & 7) * 8));
    }

  private:
    uint64_t seed_;
    std::shared_ptr<const std::vector<uint8_t>> image_;
    std::map<uint64_t, uint8_t> written_;
  };


  enum class ReorderMode { InOrder, RandomPermute };


  struct MemRequest
  {
    uint64_t id = 0;
    uint64_t beat_addr = 0;
    bool is_store = false;
    Lanes store_data;   // Beat-wide; valid lanes are byte enables.
  };

  struct MemResponse
  {
    uint64_t id = 0;
    bool is_store = false;
    uint64_t ready_cycle = 0;
    std::vector<uint8_t> data;   // Load data, beat-wide.
  };


  /// Beat-wide memory port. Loads sample memory and stores update it at
  /// issue, so program order of issue defines the memory semantics; only
  /// the delivery of responses and acks is delayed and possibly reordered.
  class MemoryModel
  {
  public:
    MemoryModel(ByteMemory backing, unsigned beat_bytes, unsigned latency,
                ReorderMode reorder = ReorderMode::InOrder, uint64_t seed = 1,
                unsigned reorder_window = 4)
      : backing_(std::move(backing)), beat_(beat_bytes), latency_(latency),
        reorder_(reorder), window_(std::max(1u, reorder_window)), rng_(seed)
    { }

    ByteMemory& backing()             { return backing_; }
    const ByteMemory& backing() const { return backing_; }
    unsigned latency() const          { return latency_; }
    bool idle() const                 { return inflight_.empty(); }

    void issue(const MemRequest& req, uint64_t cycle)
    {
      MemResponse resp;
      resp.id = req.id;
      resp.is_store = req.is_store;
      uint64_t jitter = 0;
      if (reorder_ == ReorderMode::RandomPermute)
        jitter = std::uniform_int_distribution<uint64_t>(0, window_ - 1)(rng_);
      resp.ready_cycle = cycle + latency_ + jitter;

      if (req.is_store)
        {
          for (unsigned b = 0; b < beat_ and b < req.store_data.size(); ++b)
            if (req.store_data[b].valid)
              backing_.write(req.beat_addr + b, req.store_data[b].payload);
        }
      else
        {
          resp.data.resize(beat_);
          for (unsigned b = 0; b < beat_; ++b)
            resp.data[b] = backing_.read(req.beat_addr + b);
        }
      inflight_.push_back(std::move(resp));
    }

    /// Responses and acks whose ready cycle is at or before cycle, ordered
    /// by ready cycle then request id.
    std::vector<MemResponse> step(uint64_t cycle)
    {
      std::vector<MemResponse> due;
      auto split = std::stable_partition(inflight_.begin(), inflight_.end(),
                                         [&](const MemResponse& r) { return r.ready_cycle > cycle; });
      std::move(split, inflight_.end(), std::back_inserter(due));
      inflight_.erase(split, inflight_.end());
      std::sort(due.begin(), due.end(), [](const MemResponse& a, const MemResponse& b) {
        return a.ready_cycle != b.ready_cycle ? a.ready_cycle < b.ready_cycle : a.id < b.id;
      });
      return due;
    }

  private:
    ByteMemory backing_;
    unsigned beat_;
    unsigned latency_;
    ReorderMode reorder_;
    unsigned window_;
    std::mt19937_64 rng_;
    std::vector<MemResponse> inflight_;
  };

}
