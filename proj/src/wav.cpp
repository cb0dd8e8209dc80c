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

#include "kws/wav.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "byte_io.hpp"
#include "kws/error.hpp"

namespace kws {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

bool tag_is(std::span<const std::uint8_t> b, const char* tag) {
  return std::memcmp(b.data(), tag, 4) == 0;
}

}  // namespace

PcmClip parse_wav(std::span<const std::uint8_t> bytes, const std::string& name) {
  detail::ByteReader r(bytes);
  if (!tag_is(r.bytes(4, "RIFF tag"), "RIFF")) {
    throw UnsupportedFormatError(name + ": not a RIFF file");
  }
  r.u32("RIFF size");
  if (!tag_is(r.bytes(4, "WAVE tag"), "WAVE")) {
    throw UnsupportedFormatError(name + ": RIFF container is not WAVE");
  }

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  while (r.remaining() >= 8) {
    const auto id = r.bytes(4, "chunk id");
    const std::uint32_t size = r.u32("chunk size");
    if (tag_is(id, "fmt ")) {
      detail::ByteReader f(r.bytes(size, "fmt chunk"));
      std::uint16_t format = f.u16("audio format");
      channels = f.u16("channel count");
      rate = f.u32("sample rate");
      f.u32("byte rate");
      f.u16("block align");
      bits = f.u16("bits per sample");
      if (format == kFormatExtensible && f.remaining() >= 10) {
        f.u16("cb size");
        f.u16("valid bits");
        f.u32("channel mask");
        format = f.u16("sub format");
      }
      if (format != kFormatPcm) {
        throw UnsupportedFormatError(name + ": audio format " + std::to_string(format) +
                                     " is not linear PCM");
      }
      have_fmt = true;
    } else if (tag_is(id, "data")) {
      if (!have_fmt) throw UnsupportedFormatError(name + ": data chunk before fmt chunk");
      if (channels != 1) {
        throw UnsupportedFormatError(name + ": " + std::to_string(channels) +
                                     " channels (only mono is supported)");
      }
      if (bits != 16) {
        throw UnsupportedFormatError(name + ": " + std::to_string(bits) +
                                     "-bit samples (only 16-bit is supported)");
      }
      if (rate != 8000 && rate != 16000) {
        throw UnsupportedFormatError(name + ": sample rate " + std::to_string(rate) +
                                     " Hz (only 8000 and 16000 are supported)");
      }
      // Tolerate a data size that overruns the file, as some writers do.
      const std::size_t n = std::min<std::size_t>(size, r.remaining()) / 2;
      PcmClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) clip.samples[i] = r.i16("sample");
      if (clip.samples.empty()) throw UnsupportedFormatError(name + ": no samples");
      return clip;
    } else {
      r.skip(std::min<std::size_t>(size, r.remaining()), "chunk body");
    }
    if ((size & 1U) != 0 && r.remaining() > 0) r.skip(1, "chunk pad");
  }
  throw UnsupportedFormatError(name + (have_fmt ? ": no data chunk" : ": no fmt chunk"));
}

PcmClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return parse_wav(bytes, path);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.offset());
  }
}

void write_wav(const std::string& path, const PcmClip& clip) {
  detail::ByteWriter w;
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>("RIFF"), 4));
  w.u32(36 + data_bytes);
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>("WAVEfmt "), 8));
  w.u32(16);
  w.u16(kFormatPcm);
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(clip.sample_rate));
  w.u32(static_cast<std::uint32_t>(clip.sample_rate) * 2);
  w.u16(2);
  w.u16(16);
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>("data"), 4));
  w.u32(data_bytes);
  for (auto s : clip.samples) w.i16(s);
  const auto buf = w.take();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace kws
