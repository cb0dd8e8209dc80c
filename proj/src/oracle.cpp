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

#include "kws/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "kws/error.hpp"

namespace kws::oracle {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kN = 128;
constexpr double kLogFloor = -24.0;  // log2 of the smallest nonzero Q8.24 energy
}  // namespace

ComplexVector dft_naive(std::span<const double> x) {
  if (x.size() != kN) throw UsageError("dft_naive: expected 128 samples");
  ComplexVector out(kN / 2 + 1);
  for (int k = 0; k <= kN / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (int n = 0; n < kN; ++n) {
      const double ang = -2.0 * kPi * k * n / kN;
      acc += x[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc / static_cast<double>(kN);
  }
  return out;
}

ComplexVector fft_recursive(std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  if (n == 1) return {x[0]};
  if (n == 0 || (n & (n - 1)) != 0) throw UsageError("fft_recursive: length must be a power of two");
  std::vector<std::complex<double>> even(n / 2), odd(n / 2);
  for (std::size_t i = 0; i < n / 2; ++i) {
    even[i] = x[2 * i];
    odd[i] = x[2 * i + 1];
  }
  const auto e = fft_recursive(even);
  const auto o = fft_recursive(odd);
  ComplexVector out(n);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const auto t = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n)) * o[k];
    out[k] = e[k] + t;
    out[k + n / 2] = e[k] - t;
  }
  return out;
}

FloatVector dct2(std::span<const double> x, int n_mfcc) {
  const auto n = static_cast<double>(x.size());
  FloatVector c(static_cast<std::size_t>(n_mfcc), 0.0);
  for (int j = 1; j <= n_mfcc; ++j) {
    double acc = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
      acc += x[m] * std::cos(kPi * j * (static_cast<double>(m) + 0.5) / n);
    }
    c[static_cast<std::size_t>(j - 1)] = std::sqrt(2.0 / n) * acc;
  }
  return c;
}

std::vector<FloatVector> mel_weights(int n_mel, int sample_rate) {
  const auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  const auto inv = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const double top = mel(sample_rate / 2.0);
  std::vector<double> edge(static_cast<std::size_t>(n_mel) + 2);
  for (std::size_t i = 0; i < edge.size(); ++i) {
    edge[i] = inv(top * static_cast<double>(i) / (n_mel + 1)) * kN / sample_rate;
  }
  edge.back() = kN / 2;
  std::vector<FloatVector> w(static_cast<std::size_t>(n_mel), FloatVector(kN / 2 + 1, 0.0));
  for (int m = 0; m < n_mel; ++m) {
    for (int k = 0; k <= kN / 2; ++k) {
      const double l = edge[m], c = edge[m + 1], r = edge[m + 2];
      if (k > l && k <= c) w[m][k] = (k - l) / (c - l);
      else if (k > c && k < r) w[m][k] = (r - k) / (r - c);
    }
  }
  return w;
}

double binomial_kernel_gain(double normalized_freq) {
  const std::complex<double> z = std::polar(1.0, -2.0 * kPi * normalized_freq);
  const double taps[] = {1, 4, 6, 4, 1};
  std::complex<double> h = 0.0;
  std::complex<double> zk = 1.0;
  for (double t : taps) {
    h += t * zk;
    zk *= z;
  }
  return std::abs(h) / 16.0;
}

FloatVector frame_mfcc(std::span<const double> frame, double alpha, int n_mel, int n_mfcc,
                       int sample_rate) {
  if (frame.size() != kN) throw UsageError("frame_mfcc: expected 128 samples");
  FloatVector x(kN);
  for (int n = 0; n < kN; ++n) {
    const double emph = n == 0 ? frame[0] : frame[n] - alpha * frame[n - 1];
    x[n] = emph * (0.54 - 0.46 * std::cos(2.0 * kPi * n / (kN - 1)));
  }
  const auto spec = dft_naive(x);
  const auto w = mel_weights(n_mel, sample_rate);
  FloatVector logs(static_cast<std::size_t>(n_mel));
  for (int m = 0; m < n_mel; ++m) {
    double e = 0.0;
    for (int k = 0; k <= kN / 2; ++k) e += w[m][k] * std::norm(spec[k]);
    logs[m] = std::max(e > 0.0 ? std::log2(e) : kLogFloor, kLogFloor);
  }
  return dct2(logs, n_mfcc);
}

std::uint64_t dtw_enumerate(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
                            const DistanceTable& table) {
  if (a.empty() || b.empty()) throw UsageError("dtw_enumerate: empty sequence");
  if (a.size() * b.size() > 144) throw UsageError("dtw_enumerate: instance too large");
  const std::size_t n = a.size(), m = b.size();
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  // Depth-first walk over every path from (0,0) to (n-1,m-1).
  std::function<void(std::size_t, std::size_t, std::uint64_t)> walk =
      [&](std::size_t i, std::size_t j, std::uint64_t acc) {
        acc += table.at(a[i], b[j]);
        if (i == n - 1 && j == m - 1) {
          best = std::min(best, acc);
          return;
        }
        if (i + 1 < n) walk(i + 1, j, acc);
        if (j + 1 < m) walk(i, j + 1, acc);
        if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
      };
  walk(0, 0, 0);
  return best;
}

KmeansResult kmeans_reference(const std::vector<FloatVector>& vectors,
                              std::vector<FloatVector> seeds, int max_iters) {
  if (vectors.size() < seeds.size() || seeds.empty()) {
    throw UsageError("kmeans_reference: need at least as many vectors as seeds");
  }
  KmeansResult r{std::move(seeds), {}};
  const std::size_t k = r.centroids.size();
  const std::size_t dim = vectors.front().size();
  std::vector<std::size_t> owner(vectors.size(), k);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (std::size_t n = 0; n < vectors.size(); ++n) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double d = 0.0;
        for (std::size_t x = 0; x < dim; ++x) d += std::pow(vectors[n][x] - r.centroids[c][x], 2);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      changed = changed || owner[n] != best;
      owner[n] = best;
    }
    std::vector<FloatVector> sum(k, FloatVector(dim, 0.0));
    std::vector<double> cnt(k, 0.0);
    for (std::size_t n = 0; n < vectors.size(); ++n) {
      for (std::size_t x = 0; x < dim; ++x) sum[owner[n]][x] += vectors[n][x];
      cnt[owner[n]] += 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (cnt[c] > 0.0) {
        for (std::size_t x = 0; x < dim; ++x) r.centroids[c][x] = sum[c][x] / cnt[c];
      }
    }
    double total = 0.0;
    for (std::size_t n = 0; n < vectors.size(); ++n) {
      for (std::size_t x = 0; x < dim; ++x) total += std::pow(vectors[n][x] - r.centroids[owner[n]][x], 2);
    }
    r.distortions.push_back(total / static_cast<double>(vectors.size()));
    if (!changed) break;
  }
  return r;
}

}  // namespace kws::oracle
