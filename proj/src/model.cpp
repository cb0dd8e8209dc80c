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

#include "kws/model.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "byte_io.hpp"
#include "kws/error.hpp"

namespace kws {

namespace {

constexpr char kMagic[4] = {'K', 'W', 'S', '1'};

using detail::ByteReader;
using detail::ByteWriter;

template <typename Fn>
void section(ByteWriter& w, Fn&& body) {
  const std::size_t at = w.size();
  w.u32(0);
  body();
  w.patch_u32(at, static_cast<std::uint32_t>(w.size() - at - 4));
}

void write_i16s(ByteWriter& w, std::span<const std::int16_t> v) {
  w.u16(static_cast<std::uint16_t>(v.size()));
  for (auto x : v) w.i16(x);
}

std::vector<std::int16_t> read_i16s(ByteReader& r, const char* what) {
  const std::size_t n = r.u16(what);
  r.require(2 * n, what);
  std::vector<std::int16_t> v(n);
  for (auto& x : v) x = r.i16(what);
  return v;
}

/// Reads a length-prefixed section and checks that its body consumed exactly that length.
template <typename Fn>
void read_section(ByteReader& r, const char* name, Fn&& body) {
  const std::size_t len_at = r.offset();
  const std::size_t len = r.u32(name);
  r.require(len, name);
  const std::size_t start = r.offset();
  body();
  if (r.offset() - start != len) {
    throw ParseError(std::string(name) + " section length mismatch", len_at);
  }
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Model& m) {
  ByteWriter w;
  w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.u16(kModelVersion);

  section(w, [&] {
    const auto& fe = m.frontend;
    w.u32(static_cast<std::uint32_t>(fe.input_rate));
    w.u16(static_cast<std::uint16_t>(fe.downsample_factor));
    w.i16(static_cast<std::int16_t>(fe.pre_emphasis_alpha.raw));
    w.u16(static_cast<std::uint16_t>(fe.frame_len));
    w.u16(static_cast<std::uint16_t>(fe.hop));
    w.u16(static_cast<std::uint16_t>(fe.n_mel));
    w.u16(static_cast<std::uint16_t>(fe.n_mfcc));
    w.u16(static_cast<std::uint16_t>(m.matcher.T));
    w.u16(m.matcher.rejection_threshold);
    w.u8(m.matcher.mode == MatchMode::diagonal ? 1 : 0);
    w.u64(m.seed);
  });

  section(w, [&] {
    w.u32(static_cast<std::uint32_t>(m.codebook.size()));
    w.u16(static_cast<std::uint16_t>(m.codebook.dim));
    for (auto x : m.codebook.codewords) w.i16(x);
  });

  section(w, [&] {
    w.u32(static_cast<std::uint32_t>(m.distances.k));
    for (auto x : m.distances.d) w.u16(x);
  });

  section(w, [&] {
    w.u16(static_cast<std::uint16_t>(m.templates.size()));
    for (const auto& t : m.templates) {
      w.str(t.keyword);
      w.u16(static_cast<std::uint16_t>(t.indices.size()));
      for (auto i : t.indices) w.u16(i);
    }
  });

  section(w, [&] {
    const auto& t = m.tables;
    write_i16s(w, t.window);
    write_i16s(w, t.twiddle_re);
    write_i16s(w, t.twiddle_im);
    write_i16s(w, t.log2_table);
    w.u16(static_cast<std::uint16_t>(t.mel.filters.size()));
    for (const auto& f : t.mel.filters) {
      w.u16(static_cast<std::uint16_t>(f.start_bin));
      write_i16s(w, f.weights);
    }
    w.u16(static_cast<std::uint16_t>(t.dct.n_mel));
    w.u16(static_cast<std::uint16_t>(t.dct.n_mfcc));
    for (auto x : t.dct.cosines) w.i16(x);
  });
  return w.take();
}

Model deserialize_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError("bad magic (expected KWS1)", 0);
  }
  r.skip(4, "magic");
  const std::uint16_t version = r.u16("version");
  if (version != kModelVersion) throw VersionError(version, kModelVersion);

  Model m;
  read_section(r, "config", [&] {
    auto& fe = m.frontend;
    fe.input_rate = static_cast<int>(r.u32("input_rate"));
    fe.downsample_factor = r.u16("downsample_factor");
    fe.pre_emphasis_alpha = Fixed{r.i16("pre_emphasis_alpha"), kSampleQ};
    fe.frame_len = r.u16("frame_len");
    fe.hop = r.u16("hop");
    fe.n_mel = r.u16("n_mel");
    fe.n_mfcc = r.u16("n_mfcc");
    m.matcher.T = r.u16("T");
    m.matcher.rejection_threshold = r.u16("rejection_threshold");
    const std::size_t mode_at = r.offset();
    const auto mode = r.u8("mode");
    if (mode > 1) throw ParseError("unknown matcher mode " + std::to_string(mode), mode_at);
    m.matcher.mode = mode == 1 ? MatchMode::diagonal : MatchMode::full_dtw;
    m.seed = r.u64("seed");
  });
  try {
    m.frontend.validate();
    m.matcher.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("invalid config section: ") + e.what(), 6);
  }

  read_section(r, "codebook", [&] {
    const std::size_t k = r.u32("codebook size");
    const std::size_t at = r.offset();
    m.codebook.dim = r.u16("codebook dim");
    if (m.codebook.dim != m.frontend.n_mfcc) {
      throw ParseError("codebook dimension does not match n_mfcc", at);
    }
    r.require(2 * k * static_cast<std::size_t>(m.codebook.dim), "codewords");
    m.codebook.codewords.resize(k * static_cast<std::size_t>(m.codebook.dim));
    for (auto& x : m.codebook.codewords) x = r.i16("codeword");
  });

  read_section(r, "distance table", [&] {
    const std::size_t at = r.offset();
    m.distances.k = r.u32("table size");
    if (m.distances.k != m.codebook.size()) throw ParseError("distance table size does not match codebook", at);
    r.require(2 * m.distances.k * m.distances.k, "distance entries");
    m.distances.d.resize(m.distances.k * m.distances.k);
    for (auto& x : m.distances.d) x = r.u16("distance");
  });

  read_section(r, "templates", [&] {
    const std::size_t n = r.u16("template count");
    for (std::size_t i = 0; i < n; ++i) {
      Template t;
      const std::size_t name_len = r.u16("keyword length");
      const auto name = r.bytes(name_len, "keyword");
      t.keyword.assign(name.begin(), name.end());
      const std::size_t len_at = r.offset();
      const std::size_t len = r.u16("template length");
      if (len != static_cast<std::size_t>(m.matcher.T)) throw ParseError("template length differs from T", len_at);
      t.indices.resize(len);
      for (auto& idx : t.indices) {
        const std::size_t at = r.offset();
        idx = r.u16("template index");
        if (idx >= m.codebook.size()) throw ParseError("template index out of range", at);
      }
      m.templates.push_back(std::move(t));
    }
  });

  read_section(r, "tables", [&] {
    auto& t = m.tables;
    t.window = read_i16s(r, "window");
    t.twiddle_re = read_i16s(r, "twiddle_re");
    t.twiddle_im = read_i16s(r, "twiddle_im");
    t.log2_table = read_i16s(r, "log2 table");
    const std::size_t n_filters = r.u16("mel filter count");
    for (std::size_t i = 0; i < n_filters; ++i) {
      MelFilter f;
      f.start_bin = r.u16("mel start bin");
      const std::size_t at = r.offset();
      f.weights = read_i16s(r, "mel weights");
      if (f.start_bin + f.weights.size() > static_cast<std::size_t>(kNumBins)) {
        throw ParseError("mel filter extends past bin 64", at);
      }
      t.mel.filters.push_back(std::move(f));
    }
    t.dct.n_mel = r.u16("dct n_mel");
    t.dct.n_mfcc = r.u16("dct n_mfcc");
    const std::size_t n = static_cast<std::size_t>(t.dct.n_mel) * static_cast<std::size_t>(t.dct.n_mfcc);
    r.require(2 * n, "dct cosines");
    t.dct.cosines.resize(n);
    for (auto& x : t.dct.cosines) x = r.i16("dct cosine");
  });
  const auto& t = m.tables;
  if (t.window.size() != kFftSize || t.twiddle_re.size() != kFftSize / 2 ||
      t.twiddle_im.size() != kFftSize / 2 || t.log2_table.size() != 32 ||
      t.mel.filters.size() != static_cast<std::size_t>(m.frontend.n_mel) ||
      t.dct.n_mel != m.frontend.n_mel || t.dct.n_mfcc != m.frontend.n_mfcc) {
    throw ParseError("frontend tables inconsistent with config", r.offset());
  }
  if (r.remaining() != 0) throw ParseError("trailing bytes after model", r.offset());
  return m;
}

void save_model(const std::string& path, const Model& model) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for model '" + path + "'");
}

Model load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model '" + path + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace kws
