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

#include "kws/frontend.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "kws/error.hpp"

namespace kws {

namespace {

constexpr double kPi = std::numbers::pi;

std::int16_t q15(double x) { return static_cast<std::int16_t>(quantize_raw(x, kSampleQ)); }

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

void require_length(std::span<const std::int16_t> frame, const char* op) {
  if (frame.size() != static_cast<std::size_t>(kFftSize)) {
    throw UsageError(std::string(op) + ": expected 128 samples, got " +
                     std::to_string(frame.size()));
  }
}

constexpr unsigned bit_reverse7(unsigned v) {
  unsigned r = 0;
  for (int i = 0; i < kFftStages; ++i) {
    r = (r << 1) | (v & 1U);
    v >>= 1;
  }
  return r;
}

const FrontendTables& default_static_tables() {
  static const FrontendTables tables = [] {
    FrontendTables t;
    t.window = hamming_window_q15();
    t.twiddle_re = twiddles_re_q15();
    t.twiddle_im = twiddles_im_q15();
    t.log2_table = log2_fraction_table();
    return t;
  }();
  return tables;
}

}  // namespace

void PcmClip::validate() const {
  if (samples.empty()) throw UsageError("PcmClip: empty clip");
  if (sample_rate != 8000 && sample_rate != 16000) {
    throw UsageError("PcmClip: unsupported sample rate " + std::to_string(sample_rate));
  }
}

void FrontendConfig::validate() const {
  if (input_rate != 8000 && input_rate != 16000) {
    throw ConfigError("frontend: input_rate must be 8000 or 16000");
  }
  if (downsample_factor != 1 && downsample_factor != 2) {
    throw ConfigError("frontend: downsample_factor must be 1 or 2");
  }
  if (input_rate % downsample_factor != 0 || pipeline_rate() < 8000) {
    throw ConfigError("frontend: pipeline rate below 8 kHz");
  }
  if (frame_len != kFftSize) throw ConfigError("frontend: frame_len must be 128");
  if (hop <= 0 || hop > frame_len) throw ConfigError("frontend: hop must be in 1..frame_len");
  if (n_mel < 2) throw ConfigError("frontend: n_mel must be >= 2");
  if (n_mfcc < 1 || n_mfcc > n_mel) throw ConfigError("frontend: n_mfcc must be in 1..n_mel");
  if (!(pre_emphasis_alpha.format == kSampleQ) || pre_emphasis_alpha.raw < 0) {
    throw ConfigError("frontend: pre_emphasis_alpha must be a non-negative Q1.15 value");
  }
}

std::size_t MelFilterbank::stored_weights() const {
  std::size_t n = 0;
  for (const auto& f : filters) n += f.weights.size();
  return n;
}

std::int16_t MelFilterbank::weight(std::size_t m, int bin) const {
  const auto& f = filters.at(m);
  const int offset = bin - f.start_bin;
  if (offset < 0 || offset >= static_cast<int>(f.weights.size())) return 0;
  return f.weights[static_cast<std::size_t>(offset)];
}

std::vector<std::int16_t> hamming_window_q15() {
  std::vector<std::int16_t> w(kFftSize);
  for (int n = 0; n < kFftSize; ++n) {
    w[n] = q15(0.54 - 0.46 * std::cos(2.0 * kPi * n / (kFftSize - 1)));
  }
  return w;
}

std::vector<std::int16_t> twiddles_re_q15() {
  std::vector<std::int16_t> t(kFftSize / 2);
  for (int k = 0; k < kFftSize / 2; ++k) t[k] = q15(std::cos(2.0 * kPi * k / kFftSize));
  return t;
}

std::vector<std::int16_t> twiddles_im_q15() {
  std::vector<std::int16_t> t(kFftSize / 2);
  for (int k = 0; k < kFftSize / 2; ++k) t[k] = q15(-std::sin(2.0 * kPi * k / kFftSize));
  return t;
}

std::vector<std::int16_t> log2_fraction_table() {
  std::vector<std::int16_t> t(32);
  for (int k = 0; k < 32; ++k) t[k] = q15(std::log2(1.0 + k / 32.0));
  return t;
}

MelFilterbank build_mel_filterbank(int n_mel, int sample_rate) {
  if (n_mel < 2) throw ConfigError("build_mel_filterbank: n_mel must be >= 2");
  if (sample_rate <= 0) throw ConfigError("build_mel_filterbank: bad sample rate");

  // Edge and center positions in fractional FFT bins.
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> pos(static_cast<std::size_t>(n_mel) + 2);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const double mel = mel_max * static_cast<double>(i) / (n_mel + 1);
    pos[i] = mel_to_hz(mel) * kFftSize / sample_rate;
  }
  pos.back() = kFftSize / 2;

  MelFilterbank fb;
  fb.filters.reserve(static_cast<std::size_t>(n_mel));
  for (int m = 0; m < n_mel; ++m) {
    const double lo = pos[m], mid = pos[m + 1], hi = pos[m + 2];
    std::vector<std::int16_t> dense(kNumBins, 0);
    for (int k = 0; k < kNumBins; ++k) {
      double w = 0.0;
      if (k > lo && k <= mid) {
        w = (k - lo) / (mid - lo);
      } else if (k > mid && k < hi) {
        w = (hi - k) / (hi - mid);
      }
      dense[k] = q15(w);
    }
    const auto first = std::find_if(dense.begin(), dense.end(), [](auto v) { return v != 0; });
    MelFilter f;
    if (first == dense.end()) {
      f.start_bin = static_cast<int>(std::lround(mid));
    } else {
      const auto last = std::find_if(dense.rbegin(), dense.rend(), [](auto v) { return v != 0; });
      f.start_bin = static_cast<int>(first - dense.begin());
      f.weights.assign(first, last.base());
    }
    fb.filters.push_back(std::move(f));
  }
  return fb;
}

DctTable build_dct_table(int n_mel, int n_mfcc) {
  if (n_mel < 1 || n_mfcc < 1 || n_mfcc > n_mel) {
    throw ConfigError("build_dct_table: need 1 <= n_mfcc <= n_mel");
  }
  DctTable t{n_mel, n_mfcc, {}};
  t.cosines.reserve(static_cast<std::size_t>(n_mel) * n_mfcc);
  const double scale = std::sqrt(2.0 / n_mel);
  for (int j = 1; j <= n_mfcc; ++j) {
    for (int m = 0; m < n_mel; ++m) {
      t.cosines.push_back(q15(scale * std::cos(kPi * j * (m + 0.5) / n_mel)));
    }
  }
  return t;
}

FrontendTables build_frontend_tables(const FrontendConfig& cfg) {
  cfg.validate();
  FrontendTables t = default_static_tables();
  t.mel = build_mel_filterbank(cfg.n_mel, cfg.pipeline_rate());
  t.dct = build_dct_table(cfg.n_mel, cfg.n_mfcc);
  return t;
}

PcmClip downsample(const PcmClip& clip, int factor, OpCounts* counts) {
  if (factor != 1 && factor != 2) {
    throw ConfigError("downsample: unsupported factor " + std::to_string(factor));
  }
  if (clip.sample_rate / factor < 8000) {
    throw ConfigError("downsample: output rate would drop below 8 kHz");
  }
  if (factor == 1) return clip;

  const auto& x = clip.samples;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto at = [&](std::ptrdiff_t i) -> std::int64_t {
    return x[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1))];
  };

  PcmClip out;
  out.sample_rate = clip.sample_rate / factor;
  out.samples.resize(x.size() / static_cast<std::size_t>(factor));
  for (std::size_t m = 0; m < out.samples.size(); ++m) {
    const auto c = static_cast<std::ptrdiff_t>(m) * factor;
    // [1 4 6 4 1] as shifts and adds.
    const std::int64_t outer = at(c - 2) + at(c + 2);
    const std::int64_t inner = at(c - 1) + at(c + 1);
    const std::int64_t acc = outer + (inner << 2) + (at(c) << 2) + (at(c) << 1);
    out.samples[m] = sat16(round_shift(acc, 4));
  }
  detail::count(counts, 0, 5 * out.samples.size());
  return out;
}

std::vector<std::int16_t> pre_emphasize(std::span<const std::int16_t> frame, Fixed alpha,
                                        OpCounts* counts) {
  if (frame.empty()) throw UsageError("pre_emphasize: empty frame");
  if (!(alpha.format == kSampleQ)) throw UsageError("pre_emphasize: alpha must be Q1.15");
  std::vector<std::int16_t> y(frame.size());
  std::int64_t prev = 0;
  for (std::size_t n = 0; n < frame.size(); ++n) {
    const std::int64_t scaled = round_shift(alpha.raw * prev, kSampleQ.fraction_bits);
    y[n] = sat16(frame[n] - scaled);
    prev = frame[n];
  }
  detail::count(counts, frame.size(), frame.size());
  return y;
}

std::vector<std::int16_t> apply_window(std::span<const std::int16_t> frame,
                                       std::span<const std::int16_t> window, OpCounts* counts) {
  require_length(frame, "apply_window");
  if (window.size() != frame.size()) throw UsageError("apply_window: window length mismatch");
  std::vector<std::int16_t> y(frame.size());
  for (std::size_t n = 0; n < frame.size(); ++n) {
    y[n] = sat16(round_shift(std::int64_t{frame[n]} * window[n], kSampleQ.fraction_bits));
  }
  detail::count(counts, frame.size(), 0);
  return y;
}

std::vector<std::int16_t> apply_window(std::span<const std::int16_t> frame, OpCounts* counts) {
  return apply_window(frame, default_static_tables().window, counts);
}

Spectrum fft128(std::span<const std::int16_t> frame, std::span<const std::int16_t> twiddle_re,
                std::span<const std::int16_t> twiddle_im, OpCounts* counts) {
  require_length(frame, "fft128");
  if (twiddle_re.size() != kFftSize / 2 || twiddle_im.size() != kFftSize / 2) {
    throw UsageError("fft128: twiddle tables must hold 64 entries");
  }

  // Q1.15 input re-expressed in Q2.14, loaded in bit-reversed order.
  std::array<std::int32_t, kFftSize> re{}, im{};
  for (unsigned n = 0; n < kFftSize; ++n) {
    re[bit_reverse7(n)] = static_cast<std::int32_t>(round_shift(frame[n], 1));
  }

  constexpr int kTwShift = 15;      // twiddle fraction bits
  constexpr int kStageShift = kTwShift + 1;  // back to Q2.14 and halve
  for (int stage = 1; stage <= kFftStages; ++stage) {
    const int half = 1 << (stage - 1);
    const int tw_step = (kFftSize / 2) / half;
    for (int group = 0; group < kFftSize; group += 2 * half) {
      for (int j = 0; j < half; ++j) {
        const int a = group + j;
        const int b = a + half;
        const std::int64_t wr = twiddle_re[static_cast<std::size_t>(j * tw_step)];
        const std::int64_t wi = twiddle_im[static_cast<std::size_t>(j * tw_step)];
        const std::int64_t tr = wr * re[b] - wi * im[b];
        const std::int64_t ti = wr * im[b] + wi * re[b];
        const std::int64_t ar = std::int64_t{re[a]} << kTwShift;
        const std::int64_t ai = std::int64_t{im[a]} << kTwShift;
        re[a] = sat16(round_shift(ar + tr, kStageShift));
        im[a] = sat16(round_shift(ai + ti, kStageShift));
        re[b] = sat16(round_shift(ar - tr, kStageShift));
        im[b] = sat16(round_shift(ai - ti, kStageShift));
      }
    }
    // 64 butterflies: 4 real multiplies and 6 real adds each.
    detail::count(counts, 4 * kFftSize / 2, 6 * kFftSize / 2);
  }

  Spectrum s;
  s.stage_scale_log2 = kFftStages;
  for (int k = 0; k < kNumBins; ++k) {
    s.bins[k] = ComplexQ{static_cast<std::int16_t>(re[k]), static_cast<std::int16_t>(im[k])};
  }
  return s;
}

Spectrum fft128(std::span<const std::int16_t> frame, OpCounts* counts) {
  const auto& t = default_static_tables();
  return fft128(frame, t.twiddle_re, t.twiddle_im, counts);
}

PowerSpectrum power_spectrum(const Spectrum& s, OpCounts* counts) {
  PowerSpectrum p{};
  for (int k = 0; k < kNumBins; ++k) {
    const std::int64_t r = s.bins[k].re;
    const std::int64_t i = s.bins[k].im;
    // Q2.14 squared is exactly Q4.28; |r|,|i| <= 2^15 keeps the sum under 2^31.
    p[k] = static_cast<std::uint32_t>(r * r + i * i);
  }
  detail::count(counts, 2 * kNumBins, kNumBins);
  return p;
}

std::vector<std::uint32_t> apply_mel_filters(std::span<const std::uint32_t> powers,
                                             const MelFilterbank& fb, OpCounts* counts) {
  if (powers.size() != static_cast<std::size_t>(kNumBins)) {
    throw UsageError("apply_mel_filters: expected 65 power values");
  }
  // Q1.15 x Q4.28 = Q.43; narrow to Q8.24.
  constexpr int kShift = kSampleQ.fraction_bits + kPowerQ.fraction_bits - kEnergyQ.fraction_bits;
  std::vector<std::uint32_t> energies(fb.filters.size());
  for (std::size_t m = 0; m < fb.filters.size(); ++m) {
    const auto& f = fb.filters[m];
    std::int64_t acc = 0;
    for (std::size_t k = 0; k < f.weights.size(); ++k) {
      acc += std::int64_t{f.weights[k]} * powers[static_cast<std::size_t>(f.start_bin) + k];
    }
    energies[m] = satu32(round_shift(acc, kShift));
    detail::count(counts, f.weights.size(), f.weights.size());
  }
  return energies;
}

std::int16_t log2_approx(std::uint32_t energy, std::span<const std::int16_t> table,
                         OpCounts* counts) {
  if (table.size() != 32) throw UsageError("log2_approx: table must hold 32 entries");
  // The datapath takes the same path for every input, zero included.
  detail::count(counts, 1, 3, 2);
  if (energy == 0) return kLogFloorRaw;

  const int msb = 31 - std::countl_zero(energy);
  const int integer_part = msb - kEnergyQ.fraction_bits;
  const std::uint32_t mant = energy << (31 - msb);  // leading one at bit 31
  const auto idx = static_cast<std::size_t>((mant >> 26) & 31U);
  const std::int64_t frac = (mant >> 16) & 1023U;

  const std::int64_t lo = table[idx];
  const std::int64_t hi = idx == 31 ? (std::int64_t{1} << 15) : table[idx + 1];
  const std::int64_t interp = lo + round_shift((hi - lo) * frac, 10);  // Q.15
  const std::int64_t out = (std::int64_t{integer_part} << kFeatureQ.fraction_bits) +
                           round_shift(interp, kSampleQ.fraction_bits - kFeatureQ.fraction_bits);
  return sat16(out);
}

std::int16_t log2_approx(std::uint32_t energy, OpCounts* counts) {
  return log2_approx(energy, default_static_tables().log2_table, counts);
}

MfccVector dct(std::span<const std::int16_t> log_energies, const DctTable& table,
               OpCounts* counts) {
  if (log_energies.size() != static_cast<std::size_t>(table.n_mel)) {
    throw UsageError("dct: input length does not match n_mel");
  }
  MfccVector out;
  out.coeffs.resize(static_cast<std::size_t>(table.n_mfcc));
  const auto n_mel = static_cast<std::size_t>(table.n_mel);
  for (std::size_t j = 0; j < out.coeffs.size(); ++j) {
    const std::int16_t* row = table.cosines.data() + j * n_mel;
    std::int64_t acc = 0;
    for (std::size_t m = 0; m < n_mel; ++m) acc += std::int64_t{log_energies[m]} * row[m];
    out.coeffs[j] = sat16(round_shift(acc, kSampleQ.fraction_bits));
  }
  detail::count(counts, n_mel * out.coeffs.size(), n_mel * out.coeffs.size());
  return out;
}

MfccVector dct(std::span<const std::int16_t> log_energies, int n_mfcc, OpCounts* counts) {
  return dct(log_energies, build_dct_table(static_cast<int>(log_energies.size()), n_mfcc), counts);
}

MfccVector process_frame(std::span<const std::int16_t> frame, const FrontendConfig& cfg,
                         const FrontendTables& tables, FrontendStageCounts* counts) {
  auto* c = counts;
  const auto emphasized = pre_emphasize(frame, cfg.pre_emphasis_alpha, c ? &c->pre_emphasis : nullptr);
  const auto windowed = apply_window(emphasized, tables.window, c ? &c->window : nullptr);
  const auto spectrum = fft128(windowed, tables.twiddle_re, tables.twiddle_im, c ? &c->fft : nullptr);
  const auto power = power_spectrum(spectrum, c ? &c->power : nullptr);
  const auto energies = apply_mel_filters(power, tables.mel, c ? &c->mel : nullptr);
  std::vector<std::int16_t> logs(energies.size());
  for (std::size_t m = 0; m < energies.size(); ++m) {
    logs[m] = log2_approx(energies[m], tables.log2_table, c ? &c->log : nullptr);
  }
  return dct(logs, tables.dct, c ? &c->dct : nullptr);
}

std::size_t frame_count(std::size_t length, const FrontendConfig& cfg) {
  const auto len = static_cast<std::size_t>(cfg.frame_len);
  if (length < len) return 0;
  return (length - len) / static_cast<std::size_t>(cfg.hop) + 1;
}

std::vector<MfccVector> extract_mfcc(const PcmClip& clip, const FrontendConfig& cfg,
                                     const FrontendTables& tables, FrontendStageCounts* counts) {
  cfg.validate();
  clip.validate();

  PcmClip pipeline;
  if (clip.sample_rate == cfg.pipeline_rate()) {
    pipeline = clip;
  } else if (clip.sample_rate == cfg.input_rate) {
    pipeline = downsample(clip, cfg.downsample_factor, counts ? &counts->downsample : nullptr);
  } else {
    throw ConfigError("extract_mfcc: clip rate " + std::to_string(clip.sample_rate) +
                      " matches neither the input nor the pipeline rate");
  }

  const std::size_t frames = frame_count(pipeline.samples.size(), cfg);
  std::vector<MfccVector> out;
  out.reserve(frames);
  const std::span<const std::int16_t> all(pipeline.samples);
  for (std::size_t i = 0; i < frames; ++i) {
    out.push_back(process_frame(all.subspan(i * static_cast<std::size_t>(cfg.hop),
                                            static_cast<std::size_t>(cfg.frame_len)),
                                cfg, tables, counts));
  }
  return out;
}

std::vector<MfccVector> extract_mfcc(const PcmClip& clip, const FrontendConfig& cfg) {
  return extract_mfcc(clip, cfg, build_frontend_tables(cfg));
}

}  // namespace kws
