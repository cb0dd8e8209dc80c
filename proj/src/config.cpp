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

#include "kws/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kws/error.hpp"

namespace kws {

using nlohmann::json;

void KwsConfig::validate() const {
  frontend.validate();
  matcher.validate();
  if (!(accept_fraction > 0.0 && accept_fraction <= 1.0)) {
    throw ConfigError("accept_fraction must be in (0, 1]");
  }
  if (!(clock_hz > 0.0)) throw ConfigError("clock_hz must be positive");
  if (vq.codebook_size < 1 || vq.codebook_size > 65536) {
    throw ConfigError("vq.codebook_size must be in 1..65536");
  }
}

KwsConfig parse_config(const std::string& json_text) {
  KwsConfig cfg;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    if (auto f = j.find("frontend"); f != j.end()) {
      auto& fe = cfg.frontend;
      fe.input_rate = f->value("input_rate", fe.input_rate);
      fe.downsample_factor = f->value("downsample_factor", fe.downsample_factor);
      if (f->contains("pre_emphasis_alpha")) {
        fe.pre_emphasis_alpha = to_fixed(f->at("pre_emphasis_alpha").get<double>(), kSampleQ);
      }
      fe.frame_len = f->value("frame_len", fe.frame_len);
      fe.hop = f->value("hop", fe.hop);
      fe.n_mel = f->value("n_mel", fe.n_mel);
      fe.n_mfcc = f->value("n_mfcc", fe.n_mfcc);
    }
    if (auto v = j.find("vq"); v != j.end()) {
      cfg.vq.codebook_size = v->value("codebook_size", cfg.vq.codebook_size);
      cfg.vq.epsilon = v->value("epsilon", cfg.vq.epsilon);
      cfg.vq.max_iters = v->value("max_iters", cfg.vq.max_iters);
      cfg.vq.convergence = v->value("convergence", cfg.vq.convergence);
    }
    if (auto m = j.find("matcher"); m != j.end()) {
      cfg.matcher.T = m->value("T", cfg.matcher.T);
      if (m->contains("mode")) cfg.matcher.mode = parse_match_mode(m->at("mode").get<std::string>());
      cfg.accept_fraction = m->value("accept_fraction", cfg.accept_fraction);
    }
    cfg.vq.seed = j.value("seed", cfg.vq.seed);
    cfg.clock_hz = j.value("clock_hz", cfg.clock_hz);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

KwsConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const KwsConfig& cfg) {
  const auto& fe = cfg.frontend;
  json j = {
      {"frontend",
       {{"input_rate", fe.input_rate},
        {"downsample_factor", fe.downsample_factor},
        {"pre_emphasis_alpha", fe.pre_emphasis_alpha.to_double()},
        {"frame_len", fe.frame_len},
        {"hop", fe.hop},
        {"n_mel", fe.n_mel},
        {"n_mfcc", fe.n_mfcc}}},
      {"vq",
       {{"codebook_size", cfg.vq.codebook_size},
        {"epsilon", cfg.vq.epsilon},
        {"max_iters", cfg.vq.max_iters},
        {"convergence", cfg.vq.convergence}}},
      {"matcher",
       {{"T", cfg.matcher.T},
        {"mode", to_string(cfg.matcher.mode)},
        {"accept_fraction", cfg.accept_fraction}}},
      {"seed", cfg.vq.seed},
      {"clock_hz", cfg.clock_hz},
  };
  return j.dump(2);
}

}  // namespace kws
