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

// Software model of the feature extraction unit: downsampling, pre-emphasis,
// Hamming window, 128-point staged FFT, sparse Mel filterbank, log2 and DCT.
//
// All stages run on integer words; see numerics.hpp for the formats.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kws/numerics.hpp"
#include "kws/op_counts.hpp"

namespace kws {

inline constexpr int kFftSize = 128;
inline constexpr int kFftStages = 7;
inline constexpr int kNumBins = kFftSize / 2 + 1;

/// Mono audio, Q1.15 samples.
struct PcmClip {
  std::vector<std::int16_t> samples;
  int sample_rate = 16000;

  /// Throws UsageError unless non-empty with a rate of 8 or 16 kHz.
  void validate() const;
};

struct FrontendConfig {
  int input_rate = 16000;
  int downsample_factor = 2;
  Fixed pre_emphasis_alpha{31744, kSampleQ};  // 31/32
  int frame_len = kFftSize;
  int hop = 64;
  int n_mel = 24;
  int n_mfcc = 12;

  int pipeline_rate() const { return input_rate / downsample_factor; }
  /// Throws ConfigError on any violated invariant.
  void validate() const;
  friend bool operator==(const FrontendConfig&, const FrontendConfig&) = default;
};

struct ComplexQ {
  std::int16_t re = 0;  // Q2.14
  std::int16_t im = 0;
  friend bool operator==(const ComplexQ&, const ComplexQ&) = default;
};

/// Bins 0..64 of a real 128-point transform, scaled by 2^-stage_scale_log2.
struct Spectrum {
  std::array<ComplexQ, kNumBins> bins{};
  int stage_scale_log2 = 0;
};

/// |X[k]|^2 as unsigned Q4.28 raw words.
using PowerSpectrum = std::array<std::uint32_t, kNumBins>;

/// One triangular filter stored as its non-zero run of Q1.15 weights.
struct MelFilter {
  int start_bin = 0;
  std::vector<std::int16_t> weights;
  friend bool operator==(const MelFilter&, const MelFilter&) = default;
};

struct MelFilterbank {
  std::vector<MelFilter> filters;

  std::size_t stored_weights() const;
  /// Weight of filter m at bin k, zero outside the stored run.
  std::int16_t weight(std::size_t m, int bin) const;
  friend bool operator==(const MelFilterbank&, const MelFilterbank&) = default;
};

/// Cosine table for c_1..c_n_mfcc over n_mel inputs, Q1.15, row-major by coefficient.
struct DctTable {
  int n_mel = 0;
  int n_mfcc = 0;
  std::vector<std::int16_t> cosines;
  friend bool operator==(const DctTable&, const DctTable&) = default;
};

/// One frame's cepstral coefficients, Q7.8 raw.
struct MfccVector {
  std::vector<std::int16_t> coeffs;
  friend bool operator==(const MfccVector&, const MfccVector&) = default;
};

/// Constant tables the FEU reads. Dumped for hardware-vector comparison.
struct FrontendTables {
  std::vector<std::int16_t> window;       // 128 x Q1.15
  std::vector<std::int16_t> twiddle_re;   // 64 x Q1.15, cos(2*pi*k/128)
  std::vector<std::int16_t> twiddle_im;   // 64 x Q1.15, -sin(2*pi*k/128)
  std::vector<std::int16_t> log2_table;   // 32 x Q1.15 log2(1 + k/32)
  MelFilterbank mel;
  DctTable dct;
  friend bool operator==(const FrontendTables&, const FrontendTables&) = default;
};

/// Per-stage operation tallies of the frontend.
struct FrontendStageCounts {
  OpCounts downsample, pre_emphasis, window, fft, power, mel, log, dct;
};

// Table builders.
std::vector<std::int16_t> hamming_window_q15();
std::vector<std::int16_t> twiddles_re_q15();
std::vector<std::int16_t> twiddles_im_q15();
std::vector<std::int16_t> log2_fraction_table();
MelFilterbank build_mel_filterbank(int n_mel, int sample_rate);
/// Rows j = 1..n_mfcc of sqrt(2/n_mel) * cos(pi j (m + 1/2) / n_mel) in Q1.15.
DctTable build_dct_table(int n_mel, int n_mfcc);
FrontendTables build_frontend_tables(const FrontendConfig& cfg);

// Stages.

/// Low-pass [1,4,6,4,1]/16 then keep every factor-th sample. Factor 1 is a copy.
PcmClip downsample(const PcmClip& clip, int factor, OpCounts* counts = nullptr);

/// y[0] = x[0], y[n] = sat(x[n] - alpha * x[n-1]).
std::vector<std::int16_t> pre_emphasize(std::span<const std::int16_t> frame, Fixed alpha,
                                        OpCounts* counts = nullptr);

std::vector<std::int16_t> apply_window(std::span<const std::int16_t> frame,
                                       std::span<const std::int16_t> window,
                                       OpCounts* counts = nullptr);
std::vector<std::int16_t> apply_window(std::span<const std::int16_t> frame,
                                       OpCounts* counts = nullptr);

/// Radix-2 DIT, bit-reversed input, 7 stages of 64 butterflies with a 1-bit
/// right shift per stage. Output = DFT / 128 in Q2.14.
Spectrum fft128(std::span<const std::int16_t> frame, std::span<const std::int16_t> twiddle_re,
                std::span<const std::int16_t> twiddle_im, OpCounts* counts = nullptr);
Spectrum fft128(std::span<const std::int16_t> frame, OpCounts* counts = nullptr);

PowerSpectrum power_spectrum(const Spectrum& s, OpCounts* counts = nullptr);

/// Q8.24 energies, one per filter, visiting only the stored runs.
std::vector<std::uint32_t> apply_mel_filters(std::span<const std::uint32_t> powers,
                                             const MelFilterbank& fb,
                                             OpCounts* counts = nullptr);

/// Log of a zero energy: log2 of one Q8.24 ulp, i.e. -24.0 (raw -6144).
inline constexpr std::int16_t kLogFloorRaw = -kEnergyQ.fraction_bits * (1 << kFeatureQ.fraction_bits);

/// log2 of a Q8.24 energy, returned as Q7.8 raw. Zero clamps to kLogFloorRaw.
std::int16_t log2_approx(std::uint32_t energy, std::span<const std::int16_t> table,
                         OpCounts* counts = nullptr);
std::int16_t log2_approx(std::uint32_t energy, OpCounts* counts = nullptr);

MfccVector dct(std::span<const std::int16_t> log_energies, const DctTable& table,
               OpCounts* counts = nullptr);
MfccVector dct(std::span<const std::int16_t> log_energies, int n_mfcc,
               OpCounts* counts = nullptr);

/// One 128-sample frame at the pipeline rate through every per-frame stage.
MfccVector process_frame(std::span<const std::int16_t> frame, const FrontendConfig& cfg,
                         const FrontendTables& tables, FrontendStageCounts* counts = nullptr);

/// Number of whole frames in `length` samples (0 when shorter than a frame).
std::size_t frame_count(std::size_t length, const FrontendConfig& cfg);

/// Full pipeline. A clip shorter than one frame yields an empty sequence.
std::vector<MfccVector> extract_mfcc(const PcmClip& clip, const FrontendConfig& cfg,
                                     const FrontendTables& tables,
                                     FrontendStageCounts* counts = nullptr);
std::vector<MfccVector> extract_mfcc(const PcmClip& clip, const FrontendConfig& cfg);

}  // namespace kws
