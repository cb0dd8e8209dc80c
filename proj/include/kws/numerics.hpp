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

// Fixed-point arithmetic shared by the datapath models.
//
// Every add saturates, every narrowing shift rounds half away from zero.

#include <cstdint>
#include <limits>

namespace kws {

struct QFormat {
  int integer_bits = 0;
  int fraction_bits = 15;
  bool is_signed = true;

  constexpr int total_bits() const { return integer_bits + fraction_bits + (is_signed ? 1 : 0); }
  constexpr bool valid() const {
    return integer_bits >= 0 && fraction_bits >= 0 && total_bits() >= 1 && total_bits() <= 32;
  }
  constexpr std::int64_t raw_max() const {
    return (std::int64_t{1} << (integer_bits + fraction_bits)) - 1;
  }
  constexpr std::int64_t raw_min() const {
    return is_signed ? -(std::int64_t{1} << (integer_bits + fraction_bits)) : 0;
  }
  /// Value of one least-significant bit.
  double ulp() const;
  double max_value() const;
  double min_value() const;

  friend constexpr bool operator==(const QFormat&, const QFormat&) = default;
};

// Datapath formats. Names follow the usual Qm.n notation of 16-bit DSP work,
// where "Q1.15" counts the sign bit as the integer part.
inline constexpr QFormat kSampleQ{0, 15, true};     // Q1.15 PCM samples, window, twiddles, weights
inline constexpr QFormat kFftQ{1, 14, true};        // Q2.14 FFT datapath
inline constexpr QFormat kFeatureQ{7, 8, true};     // Q7.8 log energies, MFCCs, codewords
inline constexpr QFormat kDistanceQ{8, 8, false};   // Q8.8 unsigned distances and scores
inline constexpr QFormat kPowerQ{4, 28, false};     // |X|^2, exact square of Q2.14
inline constexpr QFormat kEnergyQ{8, 24, false};    // Mel filter energies

/// A raw integer tagged with its format. The raw value is always in range.
struct Fixed {
  std::int64_t raw = 0;
  QFormat format = kSampleQ;

  double to_double() const;
  friend constexpr bool operator==(const Fixed&, const Fixed&) = default;
};

/// Nearest representable value, ties away from zero, saturating at the limits.
Fixed to_fixed(double x, QFormat fmt);
inline double to_float(Fixed f) { return f.to_double(); }

/// Exact sum clamped to the format range. Throws UsageError on format mismatch.
Fixed sat_add(Fixed a, Fixed b);
Fixed sat_sub(Fixed a, Fixed b);

/// Full-precision product, rounded into out_fmt, then saturated.
Fixed mul_round(Fixed a, Fixed b, QFormat out_fmt);

// Raw helpers used inside the datapath loops.

/// Arithmetic shift right by `shift` bits with round-half-away-from-zero.
/// A negative shift is a left shift.
constexpr std::int64_t round_shift(std::int64_t v, int shift) {
  if (shift <= 0) return v * (std::int64_t{1} << -shift);
  const std::int64_t half = std::int64_t{1} << (shift - 1);
  return v >= 0 ? (v + half) >> shift : -((-v + half) >> shift);
}

/// Integer division with round-half-away-from-zero; den > 0.
constexpr std::int64_t round_div(std::int64_t num, std::int64_t den) {
  return num >= 0 ? (num + den / 2) / den : -((-num + den / 2) / den);
}

constexpr std::int64_t saturate(std::int64_t v, QFormat fmt) {
  return v > fmt.raw_max() ? fmt.raw_max() : (v < fmt.raw_min() ? fmt.raw_min() : v);
}

constexpr std::int16_t sat16(std::int64_t v) {
  return static_cast<std::int16_t>(v > std::numeric_limits<std::int16_t>::max()
                                       ? std::numeric_limits<std::int16_t>::max()
                                   : v < std::numeric_limits<std::int16_t>::min()
                                       ? std::numeric_limits<std::int16_t>::min()
                                       : v);
}

constexpr std::uint32_t satu32(std::int64_t v) {
  return static_cast<std::uint32_t>(v < 0 ? 0
                                    : v > std::int64_t{std::numeric_limits<std::uint32_t>::max()}
                                        ? std::numeric_limits<std::uint32_t>::max()
                                        : v);
}

/// Quantize a real value straight to a raw word of fmt.
std::int64_t quantize_raw(double x, QFormat fmt);

}  // namespace kws
