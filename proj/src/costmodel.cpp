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

#include "kws/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "kws/error.hpp"

namespace kws {

namespace {

std::uint64_t ceil_div(std::uint64_t a, int b) {
  return (a + static_cast<std::uint64_t>(b) - 1) / static_cast<std::uint64_t>(b);
}

/// Deterministic full-scale-ish test frame; counts do not depend on the data.
std::vector<std::int16_t> probe_samples(std::size_t n) {
  std::vector<std::int16_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<std::int16_t>((i * 7919U) % 20000U) - 10000;
  return s;
}

}  // namespace

std::uint64_t stage_cycles(const OpCounts& ops, IssueWidth w) {
  return std::max({ceil_div(ops.mults, w.mults), ceil_div(ops.adds, w.adds),
                   ceil_div(ops.lookups, w.lookups)});
}

StageCost make_stage_cost(std::string name, const OpCounts& ops, IssueWidth w) {
  return StageCost{std::move(name), ops.mults, ops.adds, ops.lookups, stage_cycles(ops, w)};
}

std::vector<StageCost> frontend_cost(const FrontendConfig& cfg, const MelFilterbank& fb) {
  cfg.validate();
  if (fb.filters.size() != static_cast<std::size_t>(cfg.n_mel)) {
    throw UsageError("frontend_cost: filterbank does not match n_mel");
  }
  FrontendTables tables = build_frontend_tables(cfg);
  tables.mel = fb;

  FrontendStageCounts c;
  if (cfg.downsample_factor > 1) {
    // Each frame advances by one hop of pipeline-rate samples.
    PcmClip hop_in{probe_samples(static_cast<std::size_t>(cfg.hop * cfg.downsample_factor)),
                   cfg.input_rate};
    downsample(hop_in, cfg.downsample_factor, &c.downsample);
  }
  const auto frame = probe_samples(static_cast<std::size_t>(cfg.frame_len));
  process_frame(frame, cfg, tables, &c);

  std::vector<StageCost> out;
  if (cfg.downsample_factor > 1) out.push_back(make_stage_cost("downsample", c.downsample));
  out.push_back(make_stage_cost("pre_emphasis", c.pre_emphasis));
  out.push_back(make_stage_cost("window", c.window));
  out.push_back(make_stage_cost("fft128", c.fft));
  out.push_back(make_stage_cost("power", c.power));
  out.push_back(make_stage_cost("mel", c.mel));
  out.push_back(make_stage_cost("log2", c.log));
  out.push_back(make_stage_cost("dct", c.dct));
  return out;
}

StageCost matcher_cost(MatchMode mode, int T, std::size_t n_templates) {
  if (T < 2) throw UsageError("matcher_cost: T must be >= 2");
  const DistanceTable table{1, {0}};
  const std::vector<std::uint16_t> seq(static_cast<std::size_t>(T), 0);
  OpCounts ops;
  for (std::size_t i = 0; i < n_templates; ++i) {
    if (mode == MatchMode::diagonal) {
      diagonal_distance(seq, seq, table, &ops);
    } else {
      dtw_full(seq, seq, table, &ops);
    }
  }
  return make_stage_cost(mode == MatchMode::diagonal ? "match_diagonal" : "match_full_dtw", ops);
}

std::uint64_t matcher_lookups_formula(MatchMode mode, std::uint64_t T, std::uint64_t n_templates) {
  return mode == MatchMode::diagonal ? n_templates * T : n_templates * T * T;
}

double CostReport::latency_ms_at(double hz) const {
  if (!(hz > 0.0)) throw ConfigError("latency: clock must be positive");
  return static_cast<double>(total_cycles_per_frame) / hz * 1e3;
}

CostReport latency_report(std::span<const StageCost> costs, double clock_hz) {
  if (!(clock_hz > 0.0)) throw ConfigError("latency_report: clock must be positive");
  CostReport r;
  r.per_stage.assign(costs.begin(), costs.end());
  r.clock_hz = clock_hz;
  for (const auto& s : costs) r.total_cycles_per_frame += s.cycles;
  return r;
}

double frame_budget_ms(const FrontendConfig& cfg) {
  return 1e3 * cfg.hop / static_cast<double>(cfg.pipeline_rate());
}

std::string format_stage_table(std::span<const StageCost> costs) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %10s %10s %10s %10s\n", "stage", "mults", "adds",
                "lookups", "cycles");
  os << line;
  for (const auto& s : costs) {
    std::snprintf(line, sizeof line, "%-16s %10llu %10llu %10llu %10llu\n", s.stage_name.c_str(),
                  static_cast<unsigned long long>(s.mults), static_cast<unsigned long long>(s.adds),
                  static_cast<unsigned long long>(s.table_lookups),
                  static_cast<unsigned long long>(s.cycles));
    os << line;
  }
  return os.str();
}

AblationReport compression_ablation(const FrontendConfig& deployed, int T,
                                    std::size_t n_templates, double clip_seconds) {
  deployed.validate();
  FrontendConfig full = deployed;
  full.downsample_factor = 1;

  const auto side = [&](const FrontendConfig& cfg, MatchMode mode, const char* label) {
    AblationReport::Side s;
    s.label = label;
    s.pipeline_rate = cfg.pipeline_rate();
    const auto samples = static_cast<std::size_t>(std::llround(clip_seconds * cfg.pipeline_rate()));
    s.frames = frame_count(samples, cfg);
    const auto stages = frontend_cost(cfg, build_mel_filterbank(cfg.n_mel, cfg.pipeline_rate()));
    std::uint64_t downsample_mults = 0;
    for (const auto& st : stages) {
      if (st.stage_name == "downsample") downsample_mults += st.mults;
      else s.mults_per_frame += st.mults;
    }
    // Downsampling runs once per hop of output, i.e. once per frame.
    s.mults_per_second = (s.mults_per_frame + downsample_mults) * s.frames;
    const int len = mode == MatchMode::diagonal ? T : static_cast<int>(s.frames);
    s.distance_lookups = matcher_cost(mode, len, n_templates).table_lookups;
    return s;
  };

  AblationReport r;
  r.baseline = side(full, MatchMode::full_dtw, "full-rate + full DTW");
  r.deployed = side(deployed, MatchMode::diagonal, "downsampled + diagonal");
  const auto reduction = [](double base, double dep) { return base > 0 ? 1.0 - dep / base : 0.0; };
  r.distance_reduction = reduction(static_cast<double>(r.baseline.distance_lookups),
                                   static_cast<double>(r.deployed.distance_lookups));
  r.mults_per_frame_reduction = reduction(static_cast<double>(r.baseline.mults_per_frame),
                                          static_cast<double>(r.deployed.mults_per_frame));
  r.mults_per_second_reduction = reduction(static_cast<double>(r.baseline.mults_per_second),
                                           static_cast<double>(r.deployed.mults_per_second));
  return r;
}

}  // namespace kws
