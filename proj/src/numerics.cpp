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

#include "kws/numerics.hpp"

#include <cmath>

#include "kws/error.hpp"

namespace kws {

double QFormat::ulp() const { return std::ldexp(1.0, -fraction_bits); }
double QFormat::max_value() const { return std::ldexp(static_cast<double>(raw_max()), -fraction_bits); }
double QFormat::min_value() const { return std::ldexp(static_cast<double>(raw_min()), -fraction_bits); }

double Fixed::to_double() const { return std::ldexp(static_cast<double>(raw), -format.fraction_bits); }

std::int64_t quantize_raw(double x, QFormat fmt) {
  if (std::isnan(x)) return 0;
  const double scaled = std::ldexp(x, fmt.fraction_bits);
  if (scaled >= static_cast<double>(fmt.raw_max())) return fmt.raw_max();
  if (scaled <= static_cast<double>(fmt.raw_min())) return fmt.raw_min();
  // std::round is half-away-from-zero.
  return saturate(static_cast<std::int64_t>(std::round(scaled)), fmt);
}

Fixed to_fixed(double x, QFormat fmt) {
  if (!fmt.valid()) throw UsageError("to_fixed: invalid Q format");
  return Fixed{quantize_raw(x, fmt), fmt};
}

Fixed sat_add(Fixed a, Fixed b) {
  if (!(a.format == b.format)) throw UsageError("sat_add: format mismatch");
  const std::int64_t sum = std::int64_t{a.raw} + b.raw;
  return Fixed{saturate(sum, a.format), a.format};
}

Fixed sat_sub(Fixed a, Fixed b) {
  if (!(a.format == b.format)) throw UsageError("sat_sub: format mismatch");
  const std::int64_t diff = std::int64_t{a.raw} - b.raw;
  return Fixed{saturate(diff, a.format), a.format};
}

Fixed mul_round(Fixed a, Fixed b, QFormat out_fmt) {
  if (!a.format.valid() || !b.format.valid() || !out_fmt.valid()) {
    throw UsageError("mul_round: invalid Q format");
  }
  // Raw words are at most 32 bits wide, so the exact product needs 128 bits.
  __extension__ typedef __int128 wide;
  const wide product = static_cast<wide>(a.raw) * static_cast<wide>(b.raw);
  const int shift = a.format.fraction_bits + b.format.fraction_bits - out_fmt.fraction_bits;
  wide shifted;
  if (shift > 0) {
    const wide half = static_cast<wide>(1) << (shift - 1);
    shifted = product >= 0 ? (product + half) >> shift : -((-product + half) >> shift);
  } else {
    // |product| < 2^64 and -shift <= 32, so this cannot overflow.
    shifted = product * (static_cast<wide>(1) << -shift);
  }
  const wide hi = out_fmt.raw_max();
  const wide lo = out_fmt.raw_min();
  const wide clamped = shifted > hi ? hi : (shifted < lo ? lo : shifted);
  return Fixed{static_cast<std::int64_t>(clamped), out_fmt};
}

}  // namespace kws
