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

// Template classification: full-grid DTW as the reference and the fixed
// diagonal distance the hardware unit actually evaluates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kws/op_counts.hpp"
#include "kws/vq.hpp"

namespace kws {

enum class MatchMode { full_dtw, diagonal };

std::string to_string(MatchMode mode);
/// Accepts "full", "full_dtw" and "diagonal". Throws ConfigError otherwise.
MatchMode parse_match_mode(const std::string& s);

struct Template {
  std::string keyword;
  std::vector<std::uint16_t> indices;  // exactly T codeword indices
  friend bool operator==(const Template&, const Template&) = default;
};

struct MatcherConfig {
  int T = 64;
  std::uint16_t rejection_threshold = 0xFFFF;  // Q8.8 raw
  MatchMode mode = MatchMode::diagonal;

  void validate() const;
  friend bool operator==(const MatcherConfig&, const MatcherConfig&) = default;
};

struct MatchResult {
  std::optional<std::string> keyword;  // nullopt means REJECT
  std::optional<std::size_t> template_index;
  std::uint16_t score = 0;  // Q8.8 raw, min over templates
  std::vector<std::uint16_t> per_template_scores;

  bool rejected() const { return !keyword.has_value(); }
  std::string decision() const { return keyword.value_or("REJECT"); }
};

/// Resample to exactly T indices: out[t] = u[floor(t * len / T)].
EncodedUtterance time_normalize(const EncodedUtterance& u, int T);

/// Unnormalized DTW accumulation D[|a|-1][|b|-1], saturating at 2^32 - 1.
std::uint32_t dtw_accumulate(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
                             const DistanceTable& table, OpCounts* counts = nullptr);

/// Full-grid DTW cost divided by |a| + |b|, in Q8.8.
std::uint16_t dtw_full(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
                       const DistanceTable& table, OpCounts* counts = nullptr);

/// Sum of table[a_t][b_t] over the main diagonal divided by 2T, in Q8.8.
/// Throws UsageError when the lengths differ.
std::uint16_t diagonal_distance(std::span<const std::uint16_t> a,
                                std::span<const std::uint16_t> b, const DistanceTable& table,
                                OpCounts* counts = nullptr);

MatchResult classify(const EncodedUtterance& u, std::span<const Template> templates,
                     const MatcherConfig& cfg, const DistanceTable& table,
                     OpCounts* counts = nullptr);

/// Medoid under dtw_full (ties to the earliest utterance), time-normalized to cfg.T.
Template build_template(std::span<const EncodedUtterance> utterances, const std::string& keyword,
                        const MatcherConfig& cfg, const DistanceTable& table);

}  // namespace kws
