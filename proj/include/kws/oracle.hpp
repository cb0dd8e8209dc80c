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

// Double-precision and brute-force references. Nothing here calls into the
// fixed-point datapath; tests and `kws verify` compare the two.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "kws/vq.hpp"

namespace kws::oracle {

using FloatVector = std::vector<double>;
using ComplexVector = std::vector<std::complex<double>>;

/// Direct O(N^2) DFT of 128 samples, bins 0..64, scaled by 1/128.
ComplexVector dft_naive(std::span<const double> x);

/// Recursive radix-2 FFT of any power-of-two length, unscaled, all bins.
ComplexVector fft_recursive(std::span<const std::complex<double>> x);

/// c_1..c_n_mfcc of the orthonormal DCT-II, sqrt(2/N) * sum x[m] cos(pi j (m + 1/2) / N).
FloatVector dct2(std::span<const double> x, int n_mfcc);

/// Triangular Mel weights evaluated in double, dense n_mel x 65.
std::vector<FloatVector> mel_weights(int n_mel, int sample_rate);

/// Magnitude response of the [1,4,6,4,1]/16 kernel at f/fs.
double binomial_kernel_gain(double normalized_freq);

/// MFCCs of one 128-sample frame (values in [-1, 1)) computed entirely in double.
/// Log energies are clamped below at -24.
FloatVector frame_mfcc(std::span<const double> frame, double alpha, int n_mel, int n_mfcc,
                       int sample_rate);

/// Minimum path sum over an explicit enumeration of every monotone warping
/// path (steps (1,0), (0,1), (1,1)). Throws UsageError if |a|*|b| > 144.
std::uint64_t dtw_enumerate(std::span<const std::uint16_t> a, std::span<const std::uint16_t> b,
                            const DistanceTable& table);

struct KmeansResult {
  std::vector<FloatVector> centroids;
  std::vector<double> distortions;  // mean squared error after each update
};

/// Plain Lloyd iterations from the given seeds; stops when assignments settle.
KmeansResult kmeans_reference(const std::vector<FloatVector>& vectors,
                              std::vector<FloatVector> seeds, int max_iters = 100);

}  // namespace kws::oracle
