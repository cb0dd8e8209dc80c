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

#include "kws/matcher.hpp"

#include <algorithm>
#include <limits>

#include "kws/error.hpp"

namespace kws {

namespace {

void check_indices(std::span<const std::uint16_t> s, const DistanceTable& table, const char* op) {
  for (auto i : s) {
    if (i >= table.k) throw UsageError(std::string(op) + ": codeword index out of range");
  }
}

std::uint32_t sat_add_u32(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t s = a + b;
  return s < a ? std::numeric_limits<std::uint32_t>::max() : s;
}

std::uint16_t to_score(std::uint64_t sum, std::uint64_t path_proxy) {
  return static_cast<std::uint16_t>(saturate(round_div(static_cast<std::int64_t>(sum),
                                                       static_cast<std::int64_t>(path_proxy)),
                                             kDistanceQ));
}

}  // namespace

std::string to_string(MatchMode mode) {
  return mode == MatchMode::diagonal ? "diagonal" : "full";
}

MatchMode parse_match_mode(const std::string& s) {
  if (s == "diagonal") return MatchMode::diagonal;
  if (s == "full" || s == "full_dtw") return MatchMode::full_dtw;
  throw ConfigError("unknown matcher mode '" + s + "' (expected full or diagonal)");
}

void MatcherConfig::validate() const {
  if (T < 2) throw ConfigError("matcher: T must be >= 2");
}

EncodedUtterance time_normalize(const EncodedUtterance& u, int T) {
  if (u.indices.empty()) throw UsageError("time_normalize: empty utterance");
  if (T < 1) throw UsageError("time_normalize: T must be positive");
  const std::size_t len = u.indices.size();
  EncodedUtterance out;
  out.indices.resize(static_cast<std::size_t>(T));
  for (std::size_t t = 0; t < out.indices.size(); ++t) {
    out.indices[t] = u.indices[t * len / static_cast<std::size_t>(T)];
  }
  return out;
}

std::uint32_t dtw_accumulate(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
                             const DistanceTable& table, OpCounts* counts) {
  if (a.empty() || b.empty()) throw UsageError("dtw_full: empty sequence");
  check_indices(a, table, "dtw_full");
  check_indices(b, table, "dtw_full");

  constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
  // Two rolling rows over b.
  std::vector<std::uint32_t> prev(b.size(), kInf), cur(b.size(), kInf);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::uint32_t best;
      if (i == 0 && j == 0) {
        best = 0;
      } else {
        best = kInf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, cur[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      }
      cur[j] = sat_add_u32(best, table.at(a[i], b[j]));
    }
    std::swap(prev, cur);
  }
  // One lookup, one add and a two-compare 3-way min per cell.
  detail::count(counts, 0, 3 * a.size() * b.size(), a.size() * b.size());
  return prev.back();
}

std::uint16_t dtw_full(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
                       const DistanceTable& table, OpCounts* counts) {
  return to_score(dtw_accumulate(a, b, table, counts), a.size() + b.size());
}

std::uint16_t diagonal_distance(std::span<const std::uint16_t> a,
                                std::span<const std::uint16_t> b, const DistanceTable& table,
                                OpCounts* counts) {
  if (a.size() != b.size()) {
    throw UsageError("diagonal_distance: length mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + "); time-normalize both operands first");
  }
  if (a.empty()) throw UsageError("diagonal_distance: empty sequence");
  check_indices(a, table, "diagonal_distance");
  check_indices(b, table, "diagonal_distance");
  std::uint32_t sum = 0;
  for (std::size_t t = 0; t < a.size(); ++t) sum = sat_add_u32(sum, table.at(a[t], b[t]));
  detail::count(counts, 0, a.size(), a.size());
  return to_score(sum, 2 * a.size());
}

MatchResult classify(const EncodedUtterance& u, std::span<const Template> templates,
                     const MatcherConfig& cfg, const DistanceTable& table, OpCounts* counts) {
  cfg.validate();
  if (templates.empty()) throw UsageError("classify: no templates");
  const auto normalized = time_normalize(u, cfg.T);

  MatchResult r;
  r.per_template_scores.reserve(templates.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    const auto& tpl = templates[i].indices;
    const std::uint16_t score = cfg.mode == MatchMode::diagonal
                                    ? diagonal_distance(normalized.indices, tpl, table, counts)
                                    : dtw_full(normalized.indices, tpl, table, counts);
    r.per_template_scores.push_back(score);
    if (score < r.per_template_scores[best]) best = i;
  }
  r.score = r.per_template_scores[best];
  if (r.score <= cfg.rejection_threshold) {
    r.keyword = templates[best].keyword;
    r.template_index = best;
  }
  return r;
}

Template build_template(std::span<const EncodedUtterance> utterances, const std::string& keyword,
                        const MatcherConfig& cfg, const DistanceTable& table) {
  if (utterances.empty()) throw UsageError("build_template: no utterances for '" + keyword + "'");
  cfg.validate();
  std::size_t medoid = 0;
  std::uint64_t best_sum = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    std::uint64_t sum = 0;
    for (std::size_t j = 0; j < utterances.size(); ++j) {
      if (i != j) sum += dtw_full(utterances[i].indices, utterances[j].indices, table);
    }
    if (sum < best_sum) {
      best_sum = sum;
      medoid = i;
    }
  }
  return Template{keyword, time_normalize(utterances[medoid], cfg.T).indices};
}

}  // namespace kws
