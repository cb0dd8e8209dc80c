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
#include <span>
#include <string>

#include "kws/frontend.hpp"

namespace kws {

/// Reads a RIFF/WAVE file: PCM, 16-bit, mono, 8 or 16 kHz. Samples map to
/// Q1.15 as raw / 32768. Throws IoError when the file cannot be read and
/// UnsupportedFormatError naming the offending property otherwise.
PcmClip load_wav(const std::string& path);
PcmClip parse_wav(std::span<const std::uint8_t> bytes, const std::string& name);

/// Writes a canonical 44-byte-header PCM16 mono file.
void write_wav(const std::string& path, const PcmClip& clip);

}  // namespace kws
