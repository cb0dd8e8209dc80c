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

// The trained model image.
//
// Binary layout, all integers little-endian:
//   "KWS1" magic, u16 version,
//   then five sections in fixed order (config, codebook, distance table,
//   templates, frontend tables), each as u32 payload length + payload.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kws/frontend.hpp"
#include "kws/matcher.hpp"
#include "kws/vq.hpp"

namespace kws {

inline constexpr std::uint16_t kModelVersion = 1;

struct Model {
  FrontendConfig frontend;
  MatcherConfig matcher;
  std::uint64_t seed = 0;
  Codebook codebook;
  DistanceTable distances;
  std::vector<Template> templates;
  FrontendTables tables;

  friend bool operator==(const Model&, const Model&) = default;
};

std::vector<std::uint8_t> serialize_model(const Model& model);

/// Throws ParseError (with byte offset) on malformed input and VersionError
/// on an unknown version.
Model deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace kws
