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

#include "kws/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kws/error.hpp"

namespace kws {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, '\t')) out.push_back(field);
  return out;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
  throw ConfigError("manifest line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

std::string Manifest::resolve(const ManifestEntry& e) const {
  const std::filesystem::path p(e.path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).string();
}

std::vector<const ManifestEntry*> Manifest::select(Split split) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    if (e.split == split) out.push_back(&e);
  }
  return out;
}

Manifest parse_manifest(const std::string& text, const std::string& base_dir) {
  Manifest m;
  m.base_dir = base_dir;
  bool declared = false;
  std::set<std::string> paths;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto f = split_tabs(line);
      if (f.front() == "#keywords") {
        if (declared) fail(line_no, "duplicate #keywords directive");
        declared = true;
        m.keywords.assign(f.begin() + 1, f.end());
        if (m.keywords.empty()) fail(line_no, "#keywords declares no labels");
      }
      continue;
    }
    const auto f = split_tabs(line);
    if (f.size() != 3) fail(line_no, "expected 3 tab-separated fields, got " + std::to_string(f.size()));
    ManifestEntry e;
    e.path = f[0];
    if (e.path.empty()) fail(line_no, "empty path");
    if (!paths.insert(e.path).second) fail(line_no, "duplicate path '" + e.path + "'");
    if (f[1].empty()) fail(line_no, "empty label (use '-' for negative clips)");
    if (f[1] != "-") e.keyword = f[1];
    if (f[2] == "train") e.split = Split::train;
    else if (f[2] == "test") e.split = Split::test;
    else fail(line_no, "split must be 'train' or 'test', got '" + f[2] + "'");

    if (e.keyword) {
      const bool known = std::find(m.keywords.begin(), m.keywords.end(), *e.keyword) != m.keywords.end();
      if (!known) {
        if (declared) fail(line_no, "label '" + *e.keyword + "' is not declared in #keywords");
        m.keywords.push_back(*e.keyword);
      }
    }
    m.entries.push_back(std::move(e));
  }

  for (const auto& kw : m.keywords) {
    const bool has_train = std::any_of(m.entries.begin(), m.entries.end(), [&](const auto& e) {
      return e.split == Split::train && e.keyword == kw;
    });
    if (!has_train) throw ConfigError("manifest: keyword '" + kw + "' has no train clips");
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace kws
