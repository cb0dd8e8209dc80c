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

#include <doctest.h>

#include <map>

#include "kws/costmodel.hpp"
#include "kws/error.hpp"
#include "kws/model.hpp"
#include "test_util.hpp"

using namespace kws;

namespace {

std::map<std::string, StageCost> by_name(const std::vector<StageCost>& v) {
  std::map<std::string, StageCost> m;
  for (const auto& s : v) m[s.stage_name] = s;
  return m;
}

std::vector<StageCost> default_frontend() {
  const FrontendConfig cfg;
  return frontend_cost(cfg, build_mel_filterbank(cfg.n_mel, cfg.pipeline_rate()));
}

Model default_shaped_model() {
  Model m;
  m.tables = build_frontend_tables(m.frontend);
  m.codebook = Codebook{12, std::vector<std::int16_t>(64 * 12)};
  for (std::size_t i = 0; i < m.codebook.codewords.size(); ++i) {
    m.codebook.codewords[i] = static_cast<std::int16_t>(kws::testing::uniform_int(-2000, 2000));
  }
  m.distances = build_distance_table(m.codebook);
  for (int k = 0; k < 5; ++k) {
    m.templates.push_back({"kw" + std::to_string(k), kws::testing::random_indices(64, 64)});
  }
  return m;
}

}  // namespace

TEST_CASE("stage_cycles takes the busiest unit") {
  CHECK(stage_cycles({0, 0, 0}) == 0);
  CHECK(stage_cycles({10, 0, 0}) == 10);
  CHECK(stage_cycles({0, 10, 0}) == 5);
  CHECK(stage_cycles({0, 11, 0}) == 6);
  CHECK(stage_cycles({3, 4, 7}) == 7);
  CHECK(stage_cycles({3, 4, 7}, IssueWidth{1, 2, 4}) == 3);
}

TEST_CASE("frontend stage counts match closed forms") {
  const auto s = by_name(default_frontend());
  const FrontendConfig cfg;
  const auto fb = build_mel_filterbank(cfg.n_mel, cfg.pipeline_rate());
  CHECK(s.at("downsample").mults == 0);
  CHECK(s.at("downsample").adds == 5 * 64);
  CHECK(s.at("pre_emphasis").mults == 128);
  CHECK(s.at("window").mults == 128);
  CHECK(s.at("fft128").mults == 7 * 64 * 4);
  CHECK(s.at("fft128").adds == 7 * 64 * 6);
  CHECK(s.at("power").mults == 2 * 65);
  CHECK(s.at("mel").mults == fb.stored_weights());
  CHECK(s.at("mel").mults == 121);
  CHECK(s.at("mel").mults < 24 * 65);
  CHECK(s.at("log2").mults == 24);
  CHECK(s.at("log2").table_lookups == 2 * 24);
  CHECK(s.at("dct").mults == 24 * 12);
}

TEST_CASE("frontend_cost equals instrumented process_frame counts") {
  const FrontendConfig cfg;
  const auto tables = build_frontend_tables(cfg);
  FrontendStageCounts c;
  process_frame(kws::testing::random_frame(0.5), cfg, tables, &c);
  const auto s = by_name(frontend_cost(cfg, tables.mel));
  CHECK(s.at("fft128").mults == c.fft.mults);
  CHECK(s.at("fft128").adds == c.fft.adds);
  CHECK(s.at("mel").mults == c.mel.mults);
  CHECK(s.at("log2").table_lookups == c.log.lookups);
  CHECK(s.at("dct").adds == c.dct.adds);

  const auto no_ds = frontend_cost(FrontendConfig{.input_rate = 8000, .downsample_factor = 1},
                                   build_mel_filterbank(24, 8000));
  CHECK(by_name(no_ds).count("downsample") == 0);
  CHECK_THROWS_AS(frontend_cost(cfg, build_mel_filterbank(20, 8000)), UsageError);
}

TEST_CASE("matcher lookups: diagonal is 1/T of full") {
  const auto full = matcher_cost(MatchMode::full_dtw, 64, 1);
  const auto diag = matcher_cost(MatchMode::diagonal, 64, 1);
  CHECK(full.table_lookups == 4096);
  CHECK(diag.table_lookups == 64);
  CHECK(1.0 - static_cast<double>(diag.table_lookups) / full.table_lookups == doctest::Approx(0.984375));
  CHECK(diag.mults == 0);
  CHECK(matcher_cost(MatchMode::diagonal, 2, 1).table_lookups == 2);
  CHECK(matcher_cost(MatchMode::full_dtw, 64, 0).cycles == 0);
  CHECK_THROWS_AS(matcher_cost(MatchMode::diagonal, 1, 1), UsageError);
  for (int trial = 0; trial < 50; ++trial) {
    const int T = static_cast<int>(kws::testing::uniform_int(2, 80));
    const auto n = static_cast<std::size_t>(kws::testing::uniform_int(0, 8));
    for (const auto mode : {MatchMode::diagonal, MatchMode::full_dtw}) {
      REQUIRE(matcher_cost(mode, T, n).table_lookups ==
              matcher_lookups_formula(mode, static_cast<std::uint64_t>(T), n));
    }
  }
}

TEST_CASE("latency_report") {
  const std::vector<StageCost> one{{"x", 0, 0, 1192, 1192}};
  const auto r = latency_report(one, 400e3);
  CHECK(r.total_cycles_per_frame == 1192);
  CHECK(r.latency_ms() == doctest::Approx(2.98));
  CHECK(latency_report({}, 400e3).latency_ms() == 0.0);
  CHECK_THROWS_AS(latency_report(one, 0.0), ConfigError);
  CHECK_THROWS_AS(r.latency_ms_at(-1.0), ConfigError);
  CHECK(frame_budget_ms(FrontendConfig{}) == doctest::Approx(8.0));
}

TEST_CASE("default configuration fits the hop budget") {
  auto stages = default_frontend();
  std::uint64_t fe = 0;
  for (const auto& s : stages) fe += s.cycles;
  CHECK(fe <= 3200);
  stages.push_back(matcher_cost(MatchMode::diagonal, 64, 5));
  const auto r = latency_report(stages, 400e3);
  CHECK(r.latency_ms() <= frame_budget_ms(FrontendConfig{}));
  CHECK(format_stage_table(stages).find("fft128") != std::string::npos);
}

TEST_CASE("memory accounting") {
  const Model m = default_shaped_model();
  CHECK(m.codebook.codewords.size() * 2 == 1536);
  CHECK(m.distances.d.size() * 2 == 8192);
  const auto bytes = serialize_model(m);
  CHECK(memory_report(bytes) == bytes.size());
  CHECK(memory_report(bytes) <= 131072);
  CHECK(memory_report(bytes) > 1536 + 8192 + 5 * 64 * 2);
}

TEST_CASE("compression ablation") {
  const auto r = compression_ablation(FrontendConfig{}, 64, 5);
  CHECK(r.baseline.pipeline_rate == 16000);
  CHECK(r.deployed.pipeline_rate == 8000);
  CHECK(r.distance_reduction >= 0.95);
  CHECK(r.deployed.distance_lookups == 5 * 64);
  CHECK(r.baseline.distance_lookups == 5 * r.baseline.frames * r.baseline.frames);
  const double want = 1.0 - static_cast<double>(r.deployed.mults_per_frame) / r.baseline.mults_per_frame;
  CHECK(r.mults_per_frame_reduction == doctest::Approx(want));
  CHECK(r.mults_per_second_reduction > 0.0);
}
