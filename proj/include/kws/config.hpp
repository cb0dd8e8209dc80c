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

#include <cstdint>
#include <string>

#include "kws/frontend.hpp"
#include "kws/matcher.hpp"
#include "kws/vq.hpp"

namespace kws {

/// Everything `train` and `evaluate` need besides the data itself.
struct KwsConfig {
  FrontendConfig frontend;
  LbgOptions vq;
  MatcherConfig matcher;
  /// Fraction of correct-keyword train matches the calibrated threshold must accept.
  double accept_fraction = 0.95;
  /// Accelerator clock used by cost reports.
  double clock_hz = 400e3;

  void validate() const;
};

/// Parses a JSON document; missing keys keep their defaults. Throws ConfigError.
KwsConfig parse_config(const std::string& json_text);
KwsConfig load_config(const std::string& path);
std::string config_to_json(const KwsConfig& cfg);

}  // namespace kws
