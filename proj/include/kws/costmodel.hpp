/*
 * Copyright (c) 2026 The kws-accel Authors. All rights reserved.
 *
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the License); you may
 * not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an AS IS BASIS, WITHOUT
 * WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Operation and cycle model of the FEU / TCU. Counts are never written by
// hand: each figure comes from running the datapath code with an OpCounts
// attached.
//
// Timing model: one lane that can issue, per cycle, one multiply, one add/sub
// pair and one table read. Loads are free and stages do not overlap.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kws/frontend.hpp"
#include "kws/matcher.hpp"
#include "kws/op_counts.hpp"

namespace kws {

struct IssueWidth {
  int mults = 1;
  int adds = 2;
  int lookups = 1;
};

struct StageCost {
  std::string stage_name;
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;
  std::uint64_t table_lookups = 0;
  std::uint64_t cycles = 0;
};

/// max(mults / w.mults, adds / w.adds, lookups / w.lookups), each rounded up.
std::uint64_t stage_cycles(const OpCounts& ops, IssueWidth w = {});
StageCost make_stage_cost(std::string name, const OpCounts& ops, IssueWidth w = {});

/// Per-frame stages: downsample (one hop worth of output), pre-emphasis,
/// window, fft, power, mel, log, dct.
std::vector<StageCost> frontend_cost(const FrontendConfig& cfg, const MelFilterbank& fb);

/// Matching one utterance against n_templates templates of length T.
StageCost matcher_cost(MatchMode mode, int T, std::size_t n_templates);

/// Lookups the matcher performs by construction: n*T (diagonal) or n*T^2 (full).
std::uint64_t matcher_lookups_formula(MatchMode mode, std::uint64_t T, std::uint64_t n_templates);

struct CostReport {
  std::vector<StageCost> per_stage;
  std::uint64_t total_cycles_per_frame = 0;
  double clock_hz = 0.0;
  std::size_t memory_bytes = 0;

  double latency_ms() const { return latency_ms_at(clock_hz); }
  double latency_ms_at(double clock_hz) const;
};

/// Sums the stages. Throws ConfigError when clock_hz <= 0.
CostReport latency_report(std::span<const StageCost> costs, double clock_hz);

/// Real-time budget of one hop: hop / pipeline_rate, in milliseconds.
double frame_budget_ms(const FrontendConfig& cfg);

/// Exact byte size of a serialized model image.
inline std::size_t memory_report(std::span<const std::uint8_t> serialized_model) {
  return serialized_model.size();
}

/// One line per stage: name mults adds lookups cycles.
std::string format_stage_table(std::span<const StageCost> costs);

/// Full-rate input with full-grid DTW against the deployed configuration
/// (downsampled input, diagonal matcher), per second of audio.
struct AblationReport {
  struct Side {
    std::string label;
    int pipeline_rate = 0;
    std::size_t frames = 0;
    std::uint64_t mults_per_frame = 0;
    std::uint64_t mults_per_second = 0;  // frontend incl. downsampling
    std::uint64_t distance_lookups = 0;  // matcher, all templates
  };
  Side baseline;
  Side deployed;
  double distance_reduction = 0.0;         // 1 - deployed / baseline
  double mults_per_frame_reduction = 0.0;
  double mults_per_second_reduction = 0.0;
};

AblationReport compression_ablation(const FrontendConfig& deployed, int T,
                                    std::size_t n_templates, double clip_seconds = 1.0);

}  // namespace kws
