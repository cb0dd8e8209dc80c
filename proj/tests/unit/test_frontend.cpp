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

#include <cmath>
#include <numbers>

#include "kws/error.hpp"
#include "kws/frontend.hpp"
#include "kws/oracle.hpp"
#include "test_util.hpp"

using namespace kws;
using kws::testing::random_frame;
using kws::testing::to_real;
using kws::testing::uniform_int;
using kws::testing::uniform_real;

namespace {

constexpr double kPi = std::numbers::pi;

double sqnr_db(const Spectrum& s, const oracle::ComplexVector& ref) {
  double sig = 0.0, noise = 0.0;
  for (int k = 0; k < kNumBins; ++k) {
    const std::complex<double> got(s.bins[k].re / 16384.0, s.bins[k].im / 16384.0);
    sig += std::norm(ref[k]);
    noise += std::norm(got - ref[k]);
  }
  return 10.0 * std::log10(sig / noise);
}

PcmClip tone(double hz, double amp, int rate, std::size_t n) {
  PcmClip c{std::vector<std::int16_t>(n), rate};
  for (std::size_t i = 0; i < n; ++i) {
    c.samples[i] = static_cast<std::int16_t>(quantize_raw(amp * std::sin(2 * kPi * hz * i / rate), kSampleQ));
  }
  return c;
}

double rms(const std::vector<std::int16_t>& x, std::size_t skip) {
  double s = 0.0;
  for (std::size_t i = skip; i < x.size() - skip; ++i) s += static_cast<double>(x[i]) * x[i];
  return std::sqrt(s / static_cast<double>(x.size() - 2 * skip));
}

}  // namespace

TEST_CASE("frozen tables") {
  // Reference values computed independently in numpy.
  const auto w = hamming_window_q15();
  REQUIRE(w.size() == 128);
  CHECK(w[0] == 2621);
  CHECK(w[1] == 2640);
  CHECK(w[32] == 17881);
  CHECK(w[63] == 32763);
  CHECK(w[64] == 32763);
  CHECK(w[127] == 2621);
  const auto re = twiddles_re_q15();
  const auto im = twiddles_im_q15();
  REQUIRE(re.size() == 64);
  CHECK(re[0] == 32767);
  CHECK(re[16] == 23170);
  CHECK(re[32] == 0);
  CHECK(re[48] == -23170);
  CHECK(im[0] == 0);
  CHECK(im[16] == -23170);
  CHECK(im[32] == -32768);
  CHECK(im[48] == -23170);
  const auto lg = log2_fraction_table();
  REQUIRE(lg.size() == 32);
  CHECK(lg[0] == 0);
  CHECK(lg[1] == 1455);
  CHECK(lg[16] == 19168);
  CHECK(lg[31] == 32024);
  const auto d = build_dct_table(24, 12);
  REQUIRE(d.cosines.size() == 24 * 12);
  CHECK(d.cosines[0] == 9439);
  CHECK(d.cosines[11 * 24 + 23] == 6689);
  CHECK(d.cosines[5 * 24 + 5] == -3620);
}

TEST_CASE("config validation") {
  FrontendConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.pipeline_rate() == 8000);
  auto bad = c;
  bad.frame_len = 256;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.hop = 129;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.n_mfcc = 25;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.downsample_factor = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(PcmClip({}, 16000).validate(), UsageError);
  CHECK_THROWS_AS(PcmClip({1, 2}, 44100).validate(), UsageError);
}

TEST_CASE("downsample") {
  PcmClip half{std::vector<std::int16_t>(16000, 16384), 16000};
  const auto out = downsample(half, 2);
  CHECK(out.sample_rate == 8000);
  REQUIRE(out.samples.size() == 8000);
  for (auto s : out.samples) REQUIRE(s == 16384);

  const auto z = downsample(PcmClip{std::vector<std::int16_t>(1001, 0), 16000}, 2);
  CHECK(z.sample_rate == 8000);
  CHECK(z.samples.size() == 500);
  for (auto s : z.samples) REQUIRE(s == 0);

  CHECK_THROWS_AS(downsample(half, 3), ConfigError);
  CHECK_THROWS_AS(downsample(PcmClip{{1, 2, 3, 4}, 8000}, 2), ConfigError);
  CHECK(downsample(half, 1).samples == half.samples);

  OpCounts ops;
  downsample(PcmClip{std::vector<std::int16_t>(200, 7), 16000}, 2, &ops);
  CHECK(ops.mults == 0);
  CHECK(ops.adds == 5 * 100);
}

TEST_CASE("downsample alias rejection near Nyquist") {
  const auto pass = downsample(tone(1000.0, 0.5, 16000, 16000), 2);
  const auto alias = downsample(tone(7900.0, 0.5, 16000, 16000), 2);
  const double atten_db = 20.0 * std::log10(rms(pass.samples, 8) / rms(alias.samples, 8));
  CHECK(atten_db >= 20.0);
  // The measured figure tracks the kernel's analytic response.
  const double analytic_db =
      20.0 * std::log10(oracle::binomial_kernel_gain(1000.0 / 16000) / oracle::binomial_kernel_gain(7900.0 / 16000));
  CHECK(analytic_db >= 20.0);
  CHECK(atten_db >= 40.0);
}

TEST_CASE("pre_emphasize") {
  const Fixed alpha{31744, kSampleQ};
  const std::vector<std::int16_t> c(128, 16384);
  const auto y = pre_emphasize(c, alpha);
  CHECK(y[0] == 16384);
  for (std::size_t n = 1; n < y.size(); ++n) REQUIRE(y[n] == 512);
  for (auto v : pre_emphasize(std::vector<std::int16_t>(128, 0), alpha)) REQUIRE(v == 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_frame(0.5);
    const auto e = pre_emphasize(x, alpha);
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double want = (x[n] - (n ? 0.96875 * x[n - 1] : 0.0));
      REQUIRE(std::abs(e[n] - want) <= 2.0);
    }
  }
  OpCounts ops;
  pre_emphasize(c, alpha, &ops);
  CHECK(ops.mults == 128);
  CHECK(ops.adds == 128);
}

TEST_CASE("apply_window") {
  std::vector<std::int16_t> imp(128, 0);
  imp[0] = 32767;
  const auto y = apply_window(imp);
  CHECK(std::abs(y[0] / 32768.0 - 0.08) < 1e-3);
  for (std::size_t n = 1; n < y.size(); ++n) REQUIRE(y[n] == 0);
  const auto w = hamming_window_q15();
  const auto full = apply_window(std::vector<std::int16_t>(128, 32767));
  for (std::size_t n = 0; n < 128; ++n) REQUIRE(std::abs(full[n] - w[n]) <= 1);
  for (auto v : apply_window(std::vector<std::int16_t>(128, 0))) REQUIRE(v == 0);
  CHECK_THROWS_AS(apply_window(std::vector<std::int16_t>(64, 0)), UsageError);
}

TEST_CASE("fft128 analytic cases") {
  const auto z = fft128(std::vector<std::int16_t>(128, 0));
  CHECK(z.stage_scale_log2 == kFftStages);
  for (const auto& b : z.bins) REQUIRE(b == ComplexQ{});

  std::vector<std::int16_t> imp(128, 0);
  imp[0] = 16384;  // 0.5
  const auto s = fft128(imp);
  for (const auto& b : s.bins) {
    REQUIRE(std::abs(b.re - 64) <= 1);  // 0.5 / 128 in Q2.14
    REQUIRE(std::abs(b.im) <= 1);
  }

  std::vector<std::int16_t> cosine(128);
  for (int n = 0; n < 128; ++n) cosine[n] = static_cast<std::int16_t>(quantize_raw(0.5 * std::cos(2 * kPi * 16 * n / 128), kSampleQ));
  const auto c = fft128(cosine);
  const double mag16 = std::hypot(c.bins[16].re, c.bins[16].im) / 16384.0;
  CHECK(mag16 == doctest::Approx(0.25).epsilon(0.01));
  for (int k = 0; k < kNumBins; ++k) {
    if (k != 16) REQUIRE(std::hypot(c.bins[k].re, c.bins[k].im) <= 2.0);
  }
  CHECK(sqnr_db(c, oracle::dft_naive(to_real(cosine))) >= 45.0);

  CHECK_THROWS_AS(fft128(std::vector<std::int16_t>(127, 0)), UsageError);
}

TEST_CASE("fft128 SQNR over random full-scale frames") {
  double sum = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = random_frame();
    sum += sqnr_db(fft128(x), oracle::dft_naive(to_real(x)));
  }
  CHECK(sum / 100.0 >= 45.0);
}

TEST_CASE("fft128 linearity at fixed scaling") {
  for (int trial = 0; trial < 200; ++trial) {
    auto x = random_frame();
    for (auto& v : x) v = static_cast<std::int16_t>(v & ~3);  // exact scaling by 1/4
    const auto X = fft128(x);
    for (const int div : {2, 4}) {
      std::vector<std::int16_t> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = static_cast<std::int16_t>(x[i] / div);
      const auto Y = fft128(y);
      for (int k = 0; k < kNumBins; ++k) {
        REQUIRE(std::abs(Y.bins[k].re - X.bins[k].re / static_cast<double>(div)) <= 2.0);
        REQUIRE(std::abs(Y.bins[k].im - X.bins[k].im / static_cast<double>(div)) <= 2.0);
      }
    }
  }
}

TEST_CASE("fft128 Parseval at model precision") {
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_frame();
    const auto X = fft128(x);
    double time_energy = 0.0;
    for (auto v : x) time_energy += (v / 32768.0) * (v / 32768.0);
    double freq = 0.0;
    for (int k = 0; k < kNumBins; ++k) {
      const double p = std::pow(X.bins[k].re / 16384.0, 2) + std::pow(X.bins[k].im / 16384.0, 2);
      freq += (k == 0 || k == 64) ? p : 2.0 * p;
    }
    REQUIRE(128.0 * freq == doctest::Approx(time_energy).epsilon(0.01));
  }
}

TEST_CASE("fft128 operation counts") {
  OpCounts ops;
  fft128(random_frame(), &ops);
  CHECK(ops.mults == 7 * 64 * 4);
  CHECK(ops.adds == 7 * 64 * 6);
}

TEST_CASE("power_spectrum") {
  for (auto p : power_spectrum(Spectrum{})) REQUIRE(p == 0u);
  Spectrum s;
  s.bins[3].re = 4096;  // 0.25
  const auto p = power_spectrum(s);
  CHECK(p[3] == 16777216u);  // 0.0625 in Q4.28
  for (int trial = 0; trial < 1000; ++trial) {
    Spectrum r;
    for (auto& b : r.bins) {
      b.re = static_cast<std::int16_t>(uniform_int(-32768, 32767));
      b.im = static_cast<std::int16_t>(uniform_int(-32768, 32767));
    }
    const auto q = power_spectrum(r);
    for (int k = 0; k < kNumBins; ++k) {
      const double want = std::pow(r.bins[k].re / 16384.0, 2) + std::pow(r.bins[k].im / 16384.0, 2);
      REQUIRE(std::abs(q[k] / 268435456.0 - want) <= 1.0 / 268435456.0);
    }
  }
}

TEST_CASE("mel filterbank structure") {
  const auto fb = build_mel_filterbank(24, 8000);
  REQUIRE(fb.filters.size() == 24);
  // Frozen: 121 stored weights against 24 * 65 = 1560 dense.
  CHECK(fb.stored_weights() == 121);
  CHECK(fb.stored_weights() < 24 * 65);
  CHECK(fb.filters[0].start_bin == 1);
  CHECK(fb.filters[12].start_bin == 17);
  CHECK(fb.filters[23].start_bin == 54);
  CHECK(fb.filters[23].weights.size() == 10);

  for (std::size_t m = 0; m < fb.filters.size(); ++m) {
    for (auto w : fb.filters[m].weights) REQUIRE(w >= 0);
    if (m + 2 < fb.filters.size()) {
      const auto& a = fb.filters[m];
      REQUIRE(a.start_bin + static_cast<int>(a.weights.size()) <= fb.filters[m + 2].start_bin);
    }
  }
  for (int k = 0; k < kNumBins; ++k) {
    int covering = 0;
    std::int64_t sum = 0;
    for (std::size_t m = 0; m < fb.filters.size(); ++m) {
      covering += fb.weight(m, k) != 0;
      sum += fb.weight(m, k);
    }
    REQUIRE(covering <= 2);
    // Between the first and last centres the triangles sum to one.
    if (k >= 2 && k <= 58) REQUIRE(std::abs(sum - 32768) <= 2);
  }
}

TEST_CASE("apply_mel_filters") {
  const auto fb = build_mel_filterbank(24, 8000);
  std::vector<std::uint32_t> unit(kNumBins, 1u << 28);
  const auto e = apply_mel_filters(unit, fb);
  for (std::size_t m = 0; m < fb.filters.size(); ++m) {
    std::int64_t s = 0;
    for (auto w : fb.filters[m].weights) s += w;
    REQUIRE(e[m] == static_cast<std::uint32_t>(s << 9));  // Q1.15 sum expressed in Q8.24
  }
  for (auto v : apply_mel_filters(std::vector<std::uint32_t>(kNumBins, 0), fb)) REQUIRE(v == 0u);

  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::uint32_t> p(kNumBins);
    for (auto& v : p) v = static_cast<std::uint32_t>(uniform_int(0, 0xFFFFFFFFLL));
    const auto sparse = apply_mel_filters(p, fb);
    for (std::size_t m = 0; m < fb.filters.size(); ++m) {
      std::int64_t acc = 0;
      for (int k = 0; k < kNumBins; ++k) acc += std::int64_t{fb.weight(m, k)} * p[static_cast<std::size_t>(k)];
      REQUIRE(sparse[m] == satu32(round_shift(acc, 19)));
    }
  }
  OpCounts ops;
  apply_mel_filters(unit, fb, &ops);
  CHECK(ops.mults == fb.stored_weights());
  CHECK(ops.lookups == 0);
  CHECK_THROWS_AS(apply_mel_filters(std::vector<std::uint32_t>(64, 0), fb), UsageError);
}

TEST_CASE("mel weights track the float triangles") {
  const auto fb = build_mel_filterbank(24, 8000);
  const auto dense = oracle::mel_weights(24, 8000);
  for (std::size_t m = 0; m < 24; ++m) {
    for (int k = 0; k < kNumBins; ++k) {
      REQUIRE(std::abs(fb.weight(m, k) / 32768.0 - dense[m][static_cast<std::size_t>(k)]) <= 1.0 / 32768);
    }
  }
}

TEST_CASE("log2_approx") {
  constexpr std::uint32_t one = 1u << 24;
  CHECK(log2_approx(one) == 0);
  CHECK(log2_approx(8 * one) == 3 * 256);
  CHECK(log2_approx(one / 4) == -2 * 256);
  CHECK(log2_approx(1) == -24 * 256);
  CHECK(log2_approx(0) == kLogFloorRaw);
  CHECK(kLogFloorRaw == -6144);

  double worst = 0.0;
  // Exhaustive over one octave: every mantissa pattern the table sees.
  for (std::uint32_t e = one; e < 2 * one; ++e) {
    worst = std::max(worst, std::abs(log2_approx(e) / 256.0 - std::log2(e / double(one))));
  }
  // Random energies in (2^-8, 2^7).
  for (int i = 0; i < 200000; ++i) {
    const auto e = static_cast<std::uint32_t>(uniform_int(std::int64_t{1} << 16, (std::int64_t{1} << 31) - 1));
    worst = std::max(worst, std::abs(log2_approx(e) / 256.0 - std::log2(e / double(one))));
  }
  CHECK(worst <= 0.023);
  OpCounts ops;
  log2_approx(12345, &ops);
  CHECK(ops.mults == 1);
  CHECK(ops.adds == 3);
  CHECK(ops.lookups == 2);
}

TEST_CASE("dct") {
  const auto t = build_dct_table(24, 12);
  for (auto c : dct(std::vector<std::int16_t>(24, 0), t).coeffs) REQUIRE(c == 0);
  for (auto c : dct(std::vector<std::int16_t>(24, -5000), t).coeffs) REQUIRE(std::abs(c) <= 2);
  double worst = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::int16_t> L(24);
    std::vector<double> Ld(24);
    for (int m = 0; m < 24; ++m) {
      L[m] = static_cast<std::int16_t>(uniform_int(-24 * 256, 8 * 256));
      Ld[m] = L[m] / 256.0;
    }
    const auto got = dct(L, t);
    const auto want = oracle::dct2(Ld, 12);
    for (int j = 0; j < 12; ++j) worst = std::max(worst, std::abs(got.coeffs[j] / 256.0 - want[j]));
  }
  CHECK(worst <= 1.0 / 64);
  CHECK_THROWS_AS(dct(std::vector<std::int16_t>(23, 0), t), UsageError);
  CHECK_THROWS_AS(build_dct_table(12, 13), ConfigError);
}

TEST_CASE("process_frame tracks the double-precision pipeline") {
  const FrontendConfig cfg;
  const auto tables = build_frontend_tables(cfg);
  double sum = 0.0, worst = 0.0;
  int n = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_frame(0.5);
    const auto got = process_frame(x, cfg, tables);
    const auto want = oracle::frame_mfcc(to_real(x), 0.96875, 24, 12, 8000);
    for (int j = 0; j < 12; ++j) {
      const double e = std::abs(got.coeffs[j] / 256.0 - want[j]);
      sum += e;
      worst = std::max(worst, e);
      ++n;
    }
  }
  CHECK(sum / n < 0.1);
  CHECK(worst < 1.0);
}

TEST_CASE("extract_mfcc framing and determinism") {
  const FrontendConfig cfg;
  CHECK(frame_count(8000, cfg) == 124);
  CHECK(frame_count(127, cfg) == 0);
  CHECK(frame_count(128, cfg) == 1);
  CHECK(frame_count(192, cfg) == 2);

  const auto c8 = tone(440.0, 0.3, 8000, 8000);
  CHECK(extract_mfcc(c8, cfg).size() == 124);
  const auto c16 = tone(440.0, 0.3, 16000, 16000);
  const auto f16 = extract_mfcc(c16, cfg);
  CHECK(f16.size() == 124);
  CHECK(f16 == extract_mfcc(c16, cfg));
  for (const auto& f : f16) REQUIRE(f.coeffs.size() == 12);

  const auto silent = extract_mfcc(PcmClip{std::vector<std::int16_t>(8000, 0), 8000}, cfg);
  REQUIRE(silent.size() == 124);
  for (const auto& f : silent) REQUIRE(f == silent[0]);

  CHECK(extract_mfcc(PcmClip{std::vector<std::int16_t>(100, 5), 8000}, cfg).empty());

  FrontendConfig narrow = cfg;
  narrow.input_rate = 8000;
  narrow.downsample_factor = 1;
  CHECK_THROWS_AS(extract_mfcc(c16, narrow), ConfigError);

  FrontendStageCounts counts;
  extract_mfcc(c8, cfg, build_frontend_tables(cfg), &counts);
  CHECK(counts.fft.mults == 124 * 7 * 64 * 4);
  CHECK(counts.downsample.adds == 0);
}
