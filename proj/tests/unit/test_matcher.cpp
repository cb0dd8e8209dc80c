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

#include <algorithm>
#include <limits>
#include <tuple>

#include "kws/error.hpp"
#include "kws/matcher.hpp"
#include "kws/oracle.hpp"
#include "test_util.hpp"

using namespace kws;
using kws::testing::random_indices;
using kws::testing::random_table;
using kws::testing::uniform_int;

namespace {

constexpr std::uint16_t q88(double x) { return static_cast<std::uint16_t>(x * 256.0); }

DistanceTable table_from(std::size_t k, std::initializer_list<std::tuple<std::size_t, std::size_t, double>> entries) {
  DistanceTable t{k, std::vector<std::uint16_t>(k * k, 0)};
  for (const auto& [i, j, v] : entries) {
    t.d[i * k + j] = q88(v);
    t.d[j * k + i] = q88(v);
  }
  return t;
}

std::vector<std::uint16_t> seq(std::size_t n, std::uint16_t v) { return std::vector<std::uint16_t>(n, v); }

}  // namespace

TEST_CASE("time_normalize") {
  std::vector<std::uint16_t> u64(64), u128(128);
  for (std::size_t i = 0; i < 64; ++i) u64[i] = static_cast<std::uint16_t>(i);
  for (std::size_t i = 0; i < 128; ++i) u128[i] = static_cast<std::uint16_t>(i);
  CHECK(time_normalize({u64}, 64).indices == u64);
  const auto h = time_normalize({u128}, 64).indices;
  REQUIRE(h.size() == 64);
  for (std::size_t t = 0; t < 64; ++t) REQUIRE(h[t] == 2 * t);
  CHECK(time_normalize({{9}}, 64).indices == seq(64, 9));
  const auto s = time_normalize({{0, 1, 2}}, 7).indices;
  CHECK(s == std::vector<std::uint16_t>{0, 0, 0, 1, 1, 2, 2});
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(uniform_int(1, 300));
    const int T = static_cast<int>(uniform_int(2, 100));
    const auto u = random_indices(n, 64);
    const auto v = time_normalize({u}, T).indices;
    REQUIRE(v.size() == static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) REQUIRE(v[static_cast<std::size_t>(t)] == u[static_cast<std::size_t>(t) * n / static_cast<std::size_t>(T)]);
  }
  CHECK_THROWS_AS(time_normalize({{}}, 64), UsageError);
  CHECK_THROWS_AS(time_normalize({{1}}, 0), UsageError);
}

TEST_CASE("dtw_full examples") {
  const auto t = random_table(16, 4000);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_indices(static_cast<std::size_t>(uniform_int(1, 40)), 16);
    REQUIRE(dtw_full(a, a, t) == 0);
  }
  const auto one = table_from(3, {{0, 2, 5.0}});
  CHECK(dtw_full(std::vector<std::uint16_t>{0}, std::vector<std::uint16_t>{2}, one) == q88(2.5));
  CHECK_THROWS_AS(dtw_full(std::vector<std::uint16_t>{}, std::vector<std::uint16_t>{1}, one), UsageError);
  CHECK_THROWS_AS(dtw_full(std::vector<std::uint16_t>{5}, std::vector<std::uint16_t>{1}, one), UsageError);
}

TEST_CASE("dtw_full equals exhaustive path enumeration") {
  for (int trial = 0; trial < 1000; ++trial) {
    const auto k = static_cast<std::size_t>(uniform_int(2, 12));
    const auto t = random_table(k, static_cast<std::uint16_t>(uniform_int(1, 65535)));
    const auto la = static_cast<std::size_t>(uniform_int(1, 12));
    const auto lb = static_cast<std::size_t>(uniform_int(1, 12));
    const auto a = random_indices(la, k);
    const auto b = random_indices(lb, k);
    const std::uint64_t brute = oracle::dtw_enumerate(a, b, t);
    REQUIRE(dtw_accumulate(a, b, t) == brute);
    REQUIRE(dtw_full(a, b, t) == static_cast<std::uint16_t>(round_div(static_cast<std::int64_t>(brute),
                                                                       static_cast<std::int64_t>(la + lb))));
  }
}

TEST_CASE("dtw accumulation saturates instead of wrapping") {
  const auto t = table_from(2, {{0, 1, 255.99}});
  // 70000 cells of ~65533 each would pass 2^32.
  const auto a2 = seq(70000, 0);
  const std::vector<std::uint16_t> b2{1};
  CHECK(dtw_accumulate(a2, b2, t) == 0xFFFFFFFFu);
  CHECK(dtw_full(a2, b2, t) == static_cast<std::uint16_t>(round_div(0xFFFFFFFFLL, 70001)));
}

TEST_CASE("diagonal_distance") {
  const auto t = table_from(4, {{0, 1, 4.0}, {2, 3, 6.0}});
  CHECK(diagonal_distance(std::vector<std::uint16_t>{0, 2}, std::vector<std::uint16_t>{1, 3}, t) == q88(2.5));
  const auto r = random_table(32, 9000);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_indices(64, 32);
    REQUIRE(diagonal_distance(a, a, r) == 0);
  }
  CHECK_THROWS_AS(diagonal_distance(std::vector<std::uint16_t>{0, 1}, std::vector<std::uint16_t>{1}, t), UsageError);
  OpCounts ops;
  diagonal_distance(random_indices(64, 4), random_indices(64, 4), t, &ops);
  CHECK(ops.lookups == 64);
  CHECK(ops.mults == 0);
}

TEST_CASE("diagonal distance dominates full DTW") {
  for (int trial = 0; trial < 1000; ++trial) {
    const auto k = static_cast<std::size_t>(uniform_int(2, 64));
    const auto t = random_table(k, static_cast<std::uint16_t>(uniform_int(1, 65535)));
    const auto n = static_cast<std::size_t>(uniform_int(2, 64));
    const auto a = random_indices(n, k);
    const auto b = random_indices(n, k);
    REQUIRE(diagonal_distance(a, b, t) >= dtw_full(a, b, t));
    REQUIRE(diagonal_distance(a, a, t) == dtw_full(a, a, t));
  }
}

TEST_CASE("classify") {
  // u is all codeword 0; each template sits on one other codeword.
  const auto t = table_from(4, {{0, 1, 10.0}, {0, 2, 4.0}, {0, 3, 14.0}, {1, 2, 9.0}, {1, 3, 9.0}, {2, 3, 9.0}});
  const std::vector<Template> templates{{"one", seq(8, 1)}, {"two", seq(8, 2)}, {"three", seq(8, 3)}};
  MatcherConfig cfg{.T = 8, .rejection_threshold = q88(4.0), .mode = MatchMode::diagonal};

  const auto r = classify({seq(20, 0)}, templates, cfg, t);
  CHECK(r.per_template_scores == std::vector<std::uint16_t>{q88(5.0), q88(2.0), q88(7.0)});
  CHECK(r.decision() == "two");
  CHECK(r.template_index == 1);
  CHECK(r.score == q88(2.0));

  cfg.rejection_threshold = q88(1.5);
  const auto rej = classify({seq(20, 0)}, templates, cfg, t);
  CHECK(rej.rejected());
  CHECK(rej.decision() == "REJECT");
  CHECK(rej.score == q88(2.0));

  // Exact match scores zero; ties go to the earlier template.
  cfg.rejection_threshold = 0;
  const auto exact = classify({seq(8, 3)}, templates, cfg, t);
  CHECK(exact.decision() == "three");
  CHECK(exact.score == 0);
  const std::vector<Template> twins{{"a", seq(8, 2)}, {"b", seq(8, 2)}};
  cfg.rejection_threshold = 0xFFFF;
  CHECK(classify({seq(8, 0)}, twins, cfg, t).decision() == "a");

  cfg.mode = MatchMode::full_dtw;
  const auto full = classify({seq(20, 0)}, templates, cfg, t);
  CHECK(full.decision() == "two");

  CHECK_THROWS_AS(classify({seq(8, 0)}, {}, cfg, t), UsageError);
}

TEST_CASE("classify invariants on random inputs") {
  for (int trial = 0; trial < 300; ++trial) {
    const auto t = random_table(16, 20000);
    std::vector<Template> templates;
    for (int i = 0; i < 5; ++i) templates.push_back({"k" + std::to_string(i), random_indices(16, 16)});
    MatcherConfig cfg{.T = 16, .rejection_threshold = static_cast<std::uint16_t>(uniform_int(0, 12000)),
                      .mode = trial % 2 ? MatchMode::full_dtw : MatchMode::diagonal};
    const EncodedUtterance u{random_indices(static_cast<std::size_t>(uniform_int(1, 60)), 16)};
    const auto r = classify(u, templates, cfg, t);
    const auto min = *std::min_element(r.per_template_scores.begin(), r.per_template_scores.end());
    REQUIRE(r.score == min);
    if (!r.rejected()) {
      REQUIRE(r.score <= cfg.rejection_threshold);
      REQUIRE(r.per_template_scores[*r.template_index] == min);
    } else {
      REQUIRE(r.score > cfg.rejection_threshold);
    }

    // Scaling the table (and threshold) by 2 keeps the decision for accepted inputs.
    const auto n_min = std::count(r.per_template_scores.begin(), r.per_template_scores.end(), min);
    if (!r.rejected() && n_min == 1) {
      auto t2 = t;
      for (auto& v : t2.d) v = static_cast<std::uint16_t>(v * 2);
      auto cfg2 = cfg;
      cfg2.rejection_threshold = static_cast<std::uint16_t>(std::min<int>(cfg.rejection_threshold * 2, 0xFFFF));
      REQUIRE(classify(u, templates, cfg2, t2).decision() == r.decision());
    }
  }
}

TEST_CASE("build_template picks the dtw_full medoid") {
  const auto t = random_table(8, 3000);
  MatcherConfig cfg{.T = 6};
  const std::vector<EncodedUtterance> single{{{1, 2, 3}}};
  CHECK(build_template(single, "x", cfg, t).indices == time_normalize(single[0], 6).indices);

  const EncodedUtterance a{{1, 2, 3, 4}}, b{{5, 6, 7}};
  const std::vector<EncodedUtterance> dup{a, b, a};
  const auto med = build_template(dup, "x", cfg, t);
  CHECK(med.indices == time_normalize(a, 6).indices);
  CHECK(med.keyword == "x");

  // Brute-force medoid under the enumeration oracle.
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = static_cast<std::size_t>(uniform_int(2, 10));
    const auto tab = random_table(k, 5000);
    std::vector<EncodedUtterance> us;
    for (int i = 0; i < 5; ++i) us.push_back({random_indices(static_cast<std::size_t>(uniform_int(1, 8)), k)});
    std::size_t best = 0;
    std::uint64_t best_sum = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t i = 0; i < us.size(); ++i) {
      std::uint64_t s = 0;
      for (std::size_t j = 0; j < us.size(); ++j) {
        const auto raw = oracle::dtw_enumerate(us[i].indices, us[j].indices, tab);
        s += static_cast<std::uint64_t>(round_div(static_cast<std::int64_t>(raw),
                                                  static_cast<std::int64_t>(us[i].indices.size() + us[j].indices.size())));
      }
      if (s < best_sum) {
        best_sum = s;
        best = i;
      }
    }
    REQUIRE(build_template(us, "m", cfg, tab).indices == time_normalize(us[best], 6).indices);
  }
  CHECK_THROWS_AS(build_template({}, "x", cfg, t), UsageError);
}

TEST_CASE("mode parsing") {
  CHECK(parse_match_mode("full") == MatchMode::full_dtw);
  CHECK(parse_match_mode("full_dtw") == MatchMode::full_dtw);
  CHECK(parse_match_mode("diagonal") == MatchMode::diagonal);
  CHECK(to_string(MatchMode::diagonal) == "diagonal");
  CHECK_THROWS_AS(parse_match_mode("sakoe"), ConfigError);
  CHECK_THROWS_AS(MatcherConfig{.T = 1}.validate(), ConfigError);
}
