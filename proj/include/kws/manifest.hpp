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

// Corpus manifest: one clip per line, `<relative-path>\t<keyword|->\t<train|test>`.
// Blank lines and lines starting with '#' are ignored, except an optional
// `#keywords\t<kw1>\t<kw2>...` directive that declares the label set and order.

#include <optional>
#include <string>
#include <vector>

namespace kws {

enum class Split { train, test };

struct ManifestEntry {
  std::string path;                    // as written in the manifest
  std::optional<std::string> keyword;  // nullopt for negative clips ("-")
  Split split = Split::train;
};

struct Manifest {
  std::vector<std::string> keywords;  // declared or first-appearance order
  std::vector<ManifestEntry> entries;
  std::string base_dir;               // paths resolve against this

  std::string resolve(const ManifestEntry& e) const;
  std::vector<const ManifestEntry*> select(Split split) const;
};

/// Throws ConfigError with the line number on malformed input, duplicate
/// paths, undeclared labels, or a keyword without training clips.
Manifest parse_manifest(const std::string& text, const std::string& base_dir);
Manifest load_manifest(const std::string& path);

}  // namespace kws
