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

#include "kws/vq.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "kws/error.hpp"

namespace kws {

namespace {

using Point = std::vector<double>;

/// Perturbation source. Draws from raw mt19937_64 bits so the sequence is
/// identical on every standard library.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : gen_(seed) {}
  double unit() { return 0.5 + static_cast<double>(gen_() >> 11) * 0x1.0p-53; }  // [0.5, 1.5)

 private:
  std::mt19937_64 gen_;
};

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

Point perturbed(const Point& c, double eps, double sign, SplitRng& rng) {
  Point p(c.size());
  for (std::size_t d = 0; d < c.size(); ++d) {
    const double u = rng.unit();
    // A zero coordinate would not move under a multiplicative split.
    p[d] = c[d] != 0.0 ? c[d] * (1.0 + sign * eps * u) : sign * eps * u;
  }
  return p;
}

struct Assignment {
  std::vector<std::size_t> cell;
  std::vector<double> dist;
};

void assign(const std::vector<Point>& data, const std::vector<Point>& cb, Assignment& a) {
  for (std::size_t n = 0; n < data.size(); ++n) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cb.size(); ++i) {
      const double d = sq_dist(data[n], cb[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    a.cell[n] = best;
    a.dist[n] = best_d;
  }
}

/// Lloyd iterations at a fixed codebook size. Returns the last distortion.
double lloyd(const std::vector<Point>& data, std::vector<Point>& cb, const LbgOptions& opts,
             SplitRng& rng, TrainingLog::Level& level) {
  const std::size_t dim = data.front().size();
  Assignment a{std::vector<std::size_t>(data.size()), std::vector<double>(data.size())};
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iters; ++it) {
    assign(data, cb, a);

    std::vector<Point> sums(cb.size(), Point(dim, 0.0));
    std::vector<std::size_t> counts(cb.size(), 0);
    for (std::size_t n = 0; n < data.size(); ++n) {
      auto& s = sums[a.cell[n]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += data[n][d];
      ++counts[a.cell[n]];
    }
    for (std::size_t i = 0; i < cb.size(); ++i) {
      if (counts[i] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) cb[i][d] = sums[i][d] / static_cast<double>(counts[i]);
    }

    // Distortion of the current assignment against the updated centroids.
    std::vector<double> cell_distortion(cb.size(), 0.0);
    double total = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
      const double d = sq_dist(data[n], cb[a.cell[n]]);
      cell_distortion[a.cell[n]] += d;
      total += d;
    }
    const double mean = total / static_cast<double>(data.size());
    level.distortions.push_back(mean);

    // Empty cells take a perturbed copy of the worst cell's codeword; the
    // worst codeword itself stays put.
    for (std::size_t i = 0; i < cb.size(); ++i) {
      if (counts[i] != 0) continue;
      std::size_t worst = 0;
      for (std::size_t j = 1; j < cb.size(); ++j) {
        if (cell_distortion[j] > cell_distortion[worst]) worst = j;
      }
      cb[i] = perturbed(cb[worst], opts.epsilon, 1.0, rng);
      cell_distortion[worst] = 0.0;
    }

    if (mean == 0.0) return mean;
    if (std::isfinite(prev) && (prev - mean) / prev < opts.convergence) return mean;
    prev = mean;
  }
  return level.distortions.empty() ? 0.0 : level.distortions.back();
}

}  // namespace

Codebook train_codebook(std::span<const MfccVector> vectors, const LbgOptions& opts,
                        TrainingLog* log) {
  if (opts.codebook_size < 1 || !std::has_single_bit(static_cast<unsigned>(opts.codebook_size))) {
    throw ConfigError("train_codebook: codebook size must be a power of two");
  }
  if (!(opts.epsilon > 0.0)) throw ConfigError("train_codebook: epsilon must be positive");
  if (opts.max_iters < 1) throw ConfigError("train_codebook: max_iters must be >= 1");
  const auto k = static_cast<std::size_t>(opts.codebook_size);
  if (vectors.size() < k) {
    throw TrainingError("train_codebook: " + std::to_string(vectors.size()) +
                        " vectors cannot train " + std::to_string(k) + " codewords");
  }

  const std::size_t dim = vectors.front().coeffs.size();
  std::vector<Point> data;
  data.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.coeffs.size() != dim) throw UsageError("train_codebook: inconsistent vector dimension");
    Point p(dim);
    for (std::size_t d = 0; d < dim; ++d) p[d] = std::ldexp(static_cast<double>(v.coeffs[d]), -8);
    data.push_back(std::move(p));
  }

  TrainingLog local;
  TrainingLog& out_log = log != nullptr ? *log : local;
  out_log = TrainingLog{};

  SplitRng rng(opts.seed);
  Point centroid(dim, 0.0);
  for (const auto& p : data) {
    for (std::size_t d = 0; d < dim; ++d) centroid[d] += p[d];
  }
  for (auto& c : centroid) c /= static_cast<double>(data.size());
  std::vector<Point> cb{centroid};

  {
    TrainingLog::Level level{1, {}};
    double total = 0.0;
    for (const auto& p : data) total += sq_dist(p, centroid);
    level.distortions.push_back(total / static_cast<double>(data.size()));
    out_log.final_distortion = level.distortions.back();
    out_log.levels.push_back(std::move(level));
  }

  while (cb.size() < k) {
    std::vector<Point> split;
    split.reserve(cb.size() * 2);
    for (const auto& c : cb) split.push_back(perturbed(c, opts.epsilon, 1.0, rng));
    for (const auto& c : cb) split.push_back(perturbed(c, opts.epsilon, -1.0, rng));
    cb = std::move(split);
    TrainingLog::Level level{cb.size(), {}};
    out_log.final_distortion = lloyd(data, cb, opts, rng, level);
    out_log.levels.push_back(std::move(level));
  }

  Codebook result;
  result.dim = static_cast<int>(dim);
  result.codewords.reserve(k * dim);
  for (const auto& c : cb) {
    for (double x : c) result.codewords.push_back(static_cast<std::int16_t>(quantize_raw(x, kFeatureQ)));
  }

  double qtotal = 0.0;
  for (const auto& v : vectors) {
    qtotal += std::ldexp(static_cast<double>(quantize_vector(v, result).distortion), -16);
  }
  out_log.quantized_distortion = qtotal / static_cast<double>(vectors.size());
  return result;
}

Quantized quantize_vector(const MfccVector& v, const Codebook& cb) {
  if (v.coeffs.size() != static_cast<std::size_t>(cb.dim) || cb.size() == 0) {
    throw UsageError("quantize_vector: dimension mismatch");
  }
  Quantized best{0, std::numeric_limits<std::int64_t>::max()};
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const auto cw = cb.codeword(i);
    std::int64_t acc = 0;
    for (std::size_t d = 0; d < cw.size(); ++d) {
      const std::int64_t diff = std::int64_t{v.coeffs[d]} - cw[d];
      acc += diff * diff;
    }
    if (acc < best.distortion) best = Quantized{i, acc};
  }
  return best;
}

DistanceTable build_distance_table(const Codebook& cb) {
  const std::size_t k = cb.size();
  DistanceTable t{k, std::vector<std::uint16_t>(k * k, 0)};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto a = cb.codeword(i);
      const auto b = cb.codeword(j);
      std::int64_t acc = 0;
      for (std::size_t d = 0; d < a.size(); ++d) {
        const std::int64_t diff = std::int64_t{a[d]} - b[d];
        acc += diff * diff;
      }
      // Q.16 squared distance narrowed to Q8.8.
      const auto v = static_cast<std::uint16_t>(saturate(round_shift(acc, 8), kDistanceQ));
      t.d[i * k + j] = v;
      t.d[j * k + i] = v;
    }
  }
  return t;
}

EncodedUtterance encode_utterance(std::span<const MfccVector> mfccs, const Codebook& cb) {
  if (mfccs.empty()) throw UsageError("encode_utterance: empty feature sequence");
  EncodedUtterance u;
  u.indices.reserve(mfccs.size());
  for (const auto& v : mfccs) u.indices.push_back(static_cast<std::uint16_t>(quantize_vector(v, cb).index));
  return u;
}

}  // namespace kws
