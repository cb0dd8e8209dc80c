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

#include "kws/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "kws/error.hpp"
#include "kws/wav.hpp"

namespace kws {

namespace {

std::vector<MfccVector> clip_features(const std::string& path, const FrontendConfig& fe,
                                      const FrontendTables& tables) {
  const PcmClip clip = load_wav(path);
  auto feats = extract_mfcc(clip, fe, tables);
  if (feats.empty()) throw UsageError(path + ": clip is shorter than one frame");
  return feats;
}

double q88(std::uint16_t raw) { return raw / 256.0; }

}  // namespace

std::uint16_t calibrate_threshold(std::vector<std::uint16_t> scores, double fraction) {
  if (scores.empty()) return static_cast<std::uint16_t>(kDistanceQ.raw_max());
  std::sort(scores.begin(), scores.end());
  const auto need = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(scores.size())));
  return scores[std::clamp<std::size_t>(need, 1, scores.size()) - 1];
}

Model run_train(const Manifest& manifest, const KwsConfig& cfg, TrainSummary* summary) {
  cfg.validate();
  const auto train = manifest.select(Split::train);
  if (train.empty()) throw TrainingError("run_train: manifest has no train clips");

  Model model;
  model.frontend = cfg.frontend;
  model.matcher = cfg.matcher;
  model.seed = cfg.vq.seed;
  model.tables = build_frontend_tables(cfg.frontend);

  std::vector<std::vector<MfccVector>> features;
  features.reserve(train.size());
  std::vector<MfccVector> pooled;
  for (const auto* e : train) {
    features.push_back(clip_features(manifest.resolve(*e), cfg.frontend, model.tables));
    pooled.insert(pooled.end(), features.back().begin(), features.back().end());
  }

  TrainSummary local;
  TrainSummary& sum = summary != nullptr ? *summary : local;
  sum = TrainSummary{};
  sum.train_vectors = pooled.size();
  model.codebook = train_codebook(pooled, cfg.vq, &sum.codebook_log);
  model.distances = build_distance_table(model.codebook);

  std::vector<std::vector<EncodedUtterance>> per_keyword(manifest.keywords.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!train[i]->keyword) continue;
    const auto kw = std::find(manifest.keywords.begin(), manifest.keywords.end(), *train[i]->keyword);
    per_keyword[static_cast<std::size_t>(kw - manifest.keywords.begin())].push_back(
        encode_utterance(features[i], model.codebook));
  }
  for (std::size_t k = 0; k < manifest.keywords.size(); ++k) {
    if (per_keyword[k].empty()) {
      throw TrainingError("run_train: keyword '" + manifest.keywords[k] + "' has no train clips");
    }
    model.templates.push_back(build_template(per_keyword[k], manifest.keywords[k], cfg.matcher, model.distances));
  }

  // Threshold from each keyword clip against its own template, diagonal mode.
  for (std::size_t k = 0; k < per_keyword.size(); ++k) {
    for (const auto& u : per_keyword[k]) {
      const auto n = time_normalize(u, cfg.matcher.T);
      sum.calibration_scores.push_back(diagonal_distance(n.indices, model.templates[k].indices, model.distances));
    }
  }
  model.matcher.rejection_threshold = calibrate_threshold(sum.calibration_scores, cfg.accept_fraction);
  return model;
}

MatchResult classify_clip(const Model& model, const PcmClip& clip, MatchMode mode, OpCounts* counts) {
  const auto feats = extract_mfcc(clip, model.frontend, model.tables);
  if (feats.empty()) throw UsageError("classify: clip is shorter than one frame");
  MatcherConfig mc = model.matcher;
  mc.mode = mode;
  return classify(encode_utterance(feats, model.codebook), model.templates, mc, model.distances, counts);
}

double EvalReport::chance_level() const {
  return row_labels.empty() ? 0.0 : 1.0 / static_cast<double>(row_labels.size());
}

EvalReport run_evaluate(const Manifest& manifest, const Model& model, MatchMode mode,
                        const EvalOptions& opts) {
  const auto entries = manifest.select(opts.split);
  if (entries.empty()) throw UsageError("evaluate: the selected split has no clips");
  if (model.templates.empty()) throw UsageError("evaluate: model has no templates");

  std::vector<ClipResult> results(entries.size());
  std::vector<std::exception_ptr> errors(entries.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      const auto* e = entries[i];
      ClipResult& r = results[i];
      r.path = e->path;
      r.truth = e->keyword;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        OpCounts ops;
        r.match = classify_clip(model, load_wav(manifest.resolve(*e)), mode, &ops);
        r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        r.matcher_lookups = ops.lookups;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = opts.threads != 0 ? opts.threads : std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(entries.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& ex) {
      const std::string what = ex.what();
      // Reader errors already carry the path.
      if (what.find(entries[i]->path) != std::string::npos) throw;
      throw Error("clip '" + entries[i]->path + "': " + what);
    }
  }

  EvalReport rep;
  rep.mode = mode;
  rep.T = model.matcher.T;
  rep.row_labels = manifest.keywords;
  const bool has_negatives = std::any_of(entries.begin(), entries.end(), [](auto* e) { return !e->keyword; });
  if (has_negatives) rep.row_labels.push_back("-");
  rep.col_labels.clear();
  for (const auto& t : model.templates) rep.col_labels.push_back(t.keyword);
  rep.col_labels.push_back("REJECT");
  rep.confusion.assign(rep.row_labels.size(), std::vector<std::size_t>(rep.col_labels.size(), 0));

  const auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
  };
  for (auto& r : results) {
    r.correct = r.truth == r.match.keyword;
    const std::size_t row = index_of(rep.row_labels, r.truth.value_or("-"));
    const std::size_t col = r.match.keyword ? index_of(rep.col_labels, *r.match.keyword) : rep.col_labels.size() - 1;
    if (row < rep.row_labels.size()) ++rep.confusion[row][col];
    rep.total += 1;
    rep.correct += r.correct ? 1 : 0;
    rep.rejected += r.match.rejected() ? 1 : 0;
    rep.matcher_lookups += r.matcher_lookups;
  }
  rep.accuracy = static_cast<double>(rep.correct) / static_cast<double>(rep.total);
  rep.rejection_rate = static_cast<double>(rep.rejected) / static_cast<double>(rep.total);
  rep.clips = std::move(results);

  const auto fe_stages = frontend_cost(model.frontend, model.tables.mel);
  const auto report = latency_report(fe_stages, opts.clock_hz);
  const auto match = matcher_cost(mode, model.matcher.T, model.templates.size());
  rep.cost.frontend_cycles_per_frame = report.total_cycles_per_frame;
  rep.cost.matcher_cycles = match.cycles;
  rep.cost.clock_hz = opts.clock_hz;
  rep.cost.frame_latency_ms = 1e3 * static_cast<double>(report.total_cycles_per_frame + match.cycles) / opts.clock_hz;
  rep.cost.frame_budget_ms = frame_budget_ms(model.frontend);
  rep.cost.model_bytes = memory_report(serialize_model(model));
  return rep;
}

std::string report_to_json(const EvalReport& r) {
  using nlohmann::json;
  json clips = json::array();
  for (const auto& c : r.clips) {
    json scores = json::array();
    for (auto s : c.match.per_template_scores) scores.push_back(s);
    clips.push_back({{"path", c.path},
                     {"truth", c.truth.value_or("-")},
                     {"decision", c.match.decision()},
                     {"score_q88", c.match.score},
                     {"score", q88(c.match.score)},
                     {"per_template_scores_q88", scores},
                     {"correct", c.correct},
                     {"matcher_lookups", c.matcher_lookups}});
  }
  json j = {{"mode", to_string(r.mode)},
            {"T", r.T},
            {"total", r.total},
            {"correct", r.correct},
            {"rejected", r.rejected},
            {"accuracy", r.accuracy},
            {"rejection_rate", r.rejection_rate},
            {"chance_level", r.chance_level()},
            {"confusion", {{"rows", r.row_labels}, {"cols", r.col_labels}, {"counts", r.confusion}}},
            {"matcher_lookups", r.matcher_lookups},
            {"cost",
             {{"frontend_cycles_per_frame", r.cost.frontend_cycles_per_frame},
              {"matcher_cycles", r.cost.matcher_cycles},
              {"clock_hz", r.cost.clock_hz},
              {"frame_latency_ms", r.cost.frame_latency_ms},
              {"frame_budget_ms", r.cost.frame_budget_ms},
              {"model_bytes", r.cost.model_bytes}}},
            {"clips", clips}};
  return j.dump(2) + "\n";
}

std::string timing_to_json(const EvalReport& r) {
  using nlohmann::json;
  json clips = json::array();
  double total = 0.0;
  for (const auto& c : r.clips) {
    clips.push_back({{"path", c.path}, {"wall_ms", c.wall_ms}});
    total += c.wall_ms;
  }
  const double mean = r.clips.empty() ? 0.0 : total / static_cast<double>(r.clips.size());
  return json{{"mean_wall_ms", mean}, {"clips", clips}}.dump(2) + "\n";
}

std::string format_report(const EvalReport& r) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "mode %s, T=%d, %zu clips\n", to_string(r.mode).c_str(), r.T, r.total);
  os << buf;
  std::snprintf(buf, sizeof buf, "accuracy %.4f (%zu/%zu), chance %.4f, rejection rate %.4f\n",
                r.accuracy, r.correct, r.total, r.chance_level(), r.rejection_rate);
  os << buf;
  os << "\nconfusion (rows = truth, cols = decision)\n";
  std::snprintf(buf, sizeof buf, "%-12s", "");
  os << buf;
  for (const auto& c : r.col_labels) {
    std::snprintf(buf, sizeof buf, " %8.8s", c.c_str());
    os << buf;
  }
  os << '\n';
  for (std::size_t i = 0; i < r.row_labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-12.12s", r.row_labels[i].c_str());
    os << buf;
    for (auto n : r.confusion[i]) {
      std::snprintf(buf, sizeof buf, " %8zu", n);
      os << buf;
    }
    os << '\n';
  }
  std::snprintf(buf, sizeof buf,
                "\nmatcher lookups %llu; frame latency %.3f ms at %.0f Hz (budget %.3f ms); "
                "model %zu bytes\n",
                static_cast<unsigned long long>(r.matcher_lookups), r.cost.frame_latency_ms,
                r.cost.clock_hz, r.cost.frame_budget_ms, r.cost.model_bytes);
  os << buf;
  return os.str();
}

}  // namespace kws
