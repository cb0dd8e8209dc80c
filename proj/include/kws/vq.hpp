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

// Offline LBG codebook training and the fixed-point quantizer the matcher
// consumes. Training is floating point; everything it emits is Q7.8 / Q8.8.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kws/frontend.hpp"

namespace kws {

struct Codebook {
  int dim = 0;
  std::vector<std::int16_t> codewords;  // size() x dim, Q7.8 raw, row-major

  std::size_t size() const { return dim == 0 ? 0 : codewords.size() / static_cast<std::size_t>(dim); }
  std::span<const std::int16_t> codeword(std::size_t i) const {
    return std::span<const std::int16_t>(codewords).subspan(i * static_cast<std::size_t>(dim),
                                                            static_cast<std::size_t>(dim));
  }
  friend bool operator==(const Codebook&, const Codebook&) = default;
};

/// K x K squared codeword distances in unsigned Q8.8.
struct DistanceTable {
  std::size_t k = 0;
  std::vector<std::uint16_t> d;

  std::uint16_t at(std::size_t i, std::size_t j) const { return d[i * k + j]; }
  friend bool operator==(const DistanceTable&, const DistanceTable&) = default;
};

struct EncodedUtterance {
  std::vector<std::uint16_t> indices;
  friend bool operator==(const EncodedUtterance&, const EncodedUtterance&) = default;
};

struct LbgOptions {
  int codebook_size = 64;
  double epsilon = 0.01;
  int max_iters = 50;
  double convergence = 1e-4;  // relative distortion improvement
  std::uint64_t seed = 1;
};

/// Mean squared-error per Lloyd iteration, grouped by codebook size.
struct TrainingLog {
  struct Level {
    std::size_t codebook_size = 0;
    std::vector<double> distortions;
  };
  std::vector<Level> levels;
  double final_distortion = 0.0;        // float centroids
  double quantized_distortion = 0.0;    // after rounding centroids to Q7.8
};

/// LBG splitting from the global centroid up to `opts.codebook_size` codewords.
/// Throws TrainingError with fewer vectors than codewords and ConfigError when
/// the size is not a power of two.
Codebook train_codebook(std::span<const MfccVector> vectors, const LbgOptions& opts,
                        TrainingLog* log = nullptr);

struct Quantized {
  std::size_t index = 0;
  std::int64_t distortion = 0;  // squared distance, Q.16 raw
};

/// Nearest codeword by squared Euclidean distance; ties go to the lowest index.
Quantized quantize_vector(const MfccVector& v, const Codebook& cb);

DistanceTable build_distance_table(const Codebook& cb);

/// Throws UsageError on an empty sequence.
EncodedUtterance encode_utterance(std::span<const MfccVector> mfccs, const Codebook& cb);

}  // namespace kws
