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

#include <cstdint>
#include <random>
#include <vector>

#include "kws/numerics.hpp"
#include "kws/vq.hpp"

namespace kws::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20260101);
  return g;
}

inline std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng());
}

inline double uniform_real(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Fixed random_fixed(QFormat f) { return Fixed{uniform_int(f.raw_min(), f.raw_max()), f}; }

/// 128 Q1.15 samples drawn uniformly over the given fraction of full scale.
inline std::vector<std::int16_t> random_frame(double scale = 1.0) {
  std::vector<std::int16_t> f(128);
  const auto lim = static_cast<std::int64_t>(32767 * scale);
  for (auto& x : f) x = static_cast<std::int16_t>(uniform_int(-lim - 1, lim));
  return f;
}

inline std::vector<double> to_real(const std::vector<std::int16_t>& q) {
  std::vector<double> d(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) d[i] = q[i] / 32768.0;
  return d;
}

/// Symmetric table with a zero diagonal and entries in [0, max_entry].
inline DistanceTable random_table(std::size_t k, std::uint16_t max_entry) {
  DistanceTable t{k, std::vector<std::uint16_t>(k * k, 0)};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto v = static_cast<std::uint16_t>(uniform_int(0, max_entry));
      t.d[i * k + j] = v;
      t.d[j * k + i] = v;
    }
  }
  return t;
}

inline std::vector<std::uint16_t> random_indices(std::size_t n, std::size_t k) {
  std::vector<std::uint16_t> v(n);
  for (auto& x : v) x = static_cast<std::uint16_t>(uniform_int(0, static_cast<std::int64_t>(k) - 1));
  return v;
}

}  // namespace kws::testing
