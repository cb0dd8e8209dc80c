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

// Training and batch evaluation over a manifest-described corpus.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kws/config.hpp"
#include "kws/costmodel.hpp"
#include "kws/manifest.hpp"
#include "kws/model.hpp"

namespace kws {

struct TrainSummary {
  TrainingLog codebook_log;
  std::size_t train_vectors = 0;
  /// Diagonal score of each keyword train clip against its own template.
  std::vector<std::uint16_t> calibration_scores;
};

/// MFCCs of every train clip -> shared codebook -> distance table -> one
/// medoid template per keyword -> rejection threshold from the train split.
Model run_train(const Manifest& manifest, const KwsConfig& cfg, TrainSummary* summary = nullptr);

/// Smallest score accepting at least `fraction` of the given scores.
std::uint16_t calibrate_threshold(std::vector<std::uint16_t> scores, double fraction);

/// Frontend + quantizer + matcher for one clip. Throws UsageError when the
/// clip is shorter than one frame.
MatchResult classify_clip(const Model& model, const PcmClip& clip, MatchMode mode,
                          OpCounts* counts = nullptr);

struct ClipResult {
  std::string path;
  std::optional<std::string> truth;  // nullopt for negative clips
  MatchResult match;
  bool correct = false;
  std::uint64_t matcher_lookups = 0;
  double wall_ms = 0.0;
};

struct CostSummary {
  std::uint64_t frontend_cycles_per_frame = 0;
  std::uint64_t matcher_cycles = 0;
  double clock_hz = 0.0;
  double frame_latency_ms = 0.0;  // frontend + one full matcher pass
  double frame_budget_ms = 0.0;
  std::size_t model_bytes = 0;
};

struct EvalReport {
  MatchMode mode = MatchMode::diagonal;
  int T = 0;
  std::vector<std::string> row_labels;  // true labels; "-" for negatives
  std::vector<std::string> col_labels;  // decisions; "REJECT" last
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t rejected = 0;
  double accuracy = 0.0;
  double rejection_rate = 0.0;
  std::uint64_t matcher_lookups = 0;
  CostSummary cost;
  std::vector<ClipResult> clips;  // manifest order

  /// 1 / number of row labels.
  double chance_level() const;
};

struct EvalOptions {
  Split split = Split::test;
  unsigned threads = 0;  // 0 = hardware concurrency
  double clock_hz = 400e3;
};

/// Classifies every clip of the chosen split. Negative clips count as correct
/// when rejected. Throws UsageError on an empty split; per-clip errors name
/// the clip.
EvalReport run_evaluate(const Manifest& manifest, const Model& model, MatchMode mode,
                        const EvalOptions& opts = {});

/// Deterministic JSON document (no wall times).
std::string report_to_json(const EvalReport& report);
/// Per-clip wall times, kept apart so the main report stays reproducible.
std::string timing_to_json(const EvalReport& report);
std::string format_report(const EvalReport& report);

}  // namespace kws
