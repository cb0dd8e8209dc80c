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

namespace kws {

/// Arithmetic-operation tally filled in by instrumented datapath calls.
/// Callers own the counter; passing nullptr disables counting.
struct OpCounts {
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;
  std::uint64_t lookups = 0;

  OpCounts& operator+=(const OpCounts& o) {
    mults += o.mults;
    adds += o.adds;
    lookups += o.lookups;
    return *this;
  }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

namespace detail {
inline void count(OpCounts* c, std::uint64_t mults, std::uint64_t adds, std::uint64_t lookups = 0) {
  if (c != nullptr) {
    c->mults += mults;
    c->adds += adds;
    c->lookups += lookups;
  }
}
}  // namespace detail

}  // namespace kws
