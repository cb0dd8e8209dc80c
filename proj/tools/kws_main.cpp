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

// kws: command-line harness for the keyword-spotting accelerator model.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kws/config.hpp"
#include "kws/costmodel.hpp"
#include "kws/error.hpp"
#include "kws/frontend.hpp"
#include "kws/harness.hpp"
#include "kws/manifest.hpp"
#include "kws/model.hpp"
#include "kws/oracle.hpp"
#include "kws/wav.hpp"

namespace fs = std::filesystem;

namespace {

// Published reference point for the accelerator: 2.98 ms per frame at 400 kHz.
constexpr double kReferenceFrameLatencyMs = 2.98;
constexpr double kReferenceClockHz = 400e3;
constexpr double kReferenceAreaReduction = 0.992;
constexpr double kReferencePowerReduction = 0.842;
constexpr std::size_t kOnChipMemoryBytes = 128 * 1024;

struct Globals {
  std::string config_path;
  std::string mode;
  std::int64_t seed = -1;
};

kws::KwsConfig load_cfg(const Globals& g) {
  kws::KwsConfig cfg = g.config_path.empty() ? kws::KwsConfig{} : kws::load_config(g.config_path);
  if (!g.mode.empty()) cfg.matcher.mode = kws::parse_match_mode(g.mode);
  if (g.seed >= 0) cfg.vq.seed = static_cast<std::uint64_t>(g.seed);
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kws::IoError("cannot write '" + path + "'");
  out << text;
}

std::vector<std::int16_t> to_q15(std::span<const double> x) {
  std::vector<std::int16_t> q(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) q[i] = static_cast<std::int16_t>(kws::quantize_raw(x[i], kws::kSampleQ));
  return q;
}

int cmd_extract(const Globals& g, const std::string& wav, const std::string& out, bool real) {
  const auto cfg = load_cfg(g);
  const auto feats = kws::extract_mfcc(kws::load_wav(wav), cfg.frontend);
  std::string text;
  char buf[32];
  for (const auto& f : feats) {
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
      if (real) std::snprintf(buf, sizeof buf, "%s%.8g", i ? " " : "", f.coeffs[i] / 256.0);
      else std::snprintf(buf, sizeof buf, "%s%d", i ? " " : "", f.coeffs[i]);
      text += buf;
    }
    text += '\n';
  }
  write_text(out, text);
  if (feats.empty()) std::cerr << "kws extract: clip shorter than one frame, no features\n";
  return 0;
}

int cmd_train(const Globals& g, const std::string& manifest_path, const std::string& out,
              const std::string& log_path) {
  const auto cfg = load_cfg(g);
  const auto manifest = kws::load_manifest(manifest_path);
  kws::TrainSummary summary;
  const auto model = kws::run_train(manifest, cfg, &summary);
  kws::save_model(out, model);
  const auto bytes = kws::serialize_model(model);
  std::cout << "trained " << model.templates.size() << " templates, K=" << model.codebook.size()
            << " codebook from " << summary.train_vectors << " vectors\n"
            << "final distortion " << summary.codebook_log.final_distortion << " (quantized "
            << summary.codebook_log.quantized_distortion << ")\n"
            << "rejection threshold " << model.matcher.rejection_threshold / 256.0 << "\n"
            << "model " << bytes.size() << " bytes -> " << out << "\n";
  if (!log_path.empty()) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : summary.codebook_log.levels) {
      levels.push_back({{"codebook_size", l.codebook_size}, {"distortions", l.distortions}});
    }
    write_text(log_path, nlohmann::json{{"levels", levels},
                                        {"final_distortion", summary.codebook_log.final_distortion},
                                        {"calibration_scores_q88", summary.calibration_scores}}
                                 .dump(2) + "\n");
  }
  return 0;
}

int cmd_evaluate(const Globals& g, const std::string& manifest_path, const std::string& model_path,
                 const std::string& json_out, const std::string& timing_out, const std::string& split,
                 unsigned threads) {
  const auto cfg = load_cfg(g);
  const auto manifest = kws::load_manifest(manifest_path);
  const auto model = kws::load_model(model_path);
  kws::EvalOptions opts;
  opts.split = split == "train" ? kws::Split::train : kws::Split::test;
  opts.threads = threads;
  opts.clock_hz = cfg.clock_hz;
  const auto mode = g.mode.empty() ? model.matcher.mode : cfg.matcher.mode;
  const auto report = kws::run_evaluate(manifest, model, mode, opts);
  std::cout << kws::format_report(report);
  if (!json_out.empty()) write_text(json_out, kws::report_to_json(report));
  if (!timing_out.empty()) write_text(timing_out, kws::timing_to_json(report));
  return 0;
}

int cmd_classify(const Globals& g, const std::string& model_path, const std::string& wav) {
  const auto model = kws::load_model(model_path);
  const auto mode = g.mode.empty() ? model.matcher.mode : kws::parse_match_mode(g.mode);
  const auto r = kws::classify_clip(model, kws::load_wav(wav), mode);
  std::printf("%s score %.4f (threshold %.4f)\n", r.decision().c_str(), r.score / 256.0,
              model.matcher.rejection_threshold / 256.0);
  for (std::size_t i = 0; i < r.per_template_scores.size(); ++i) {
    std::printf("  %-16s %.4f\n", model.templates[i].keyword.c_str(), r.per_template_scores[i] / 256.0);
  }
  return 0;
}

int cmd_cost_report(const Globals& g, const std::string& model_path, const std::string& json_out,
                    std::size_t n_templates_opt) {
  const auto cfg = load_cfg(g);
  kws::FrontendConfig fe = cfg.frontend;
  int T = cfg.matcher.T;
  std::size_t n_templates = n_templates_opt;
  std::size_t model_bytes = 0;
  kws::MelFilterbank fb;
  if (!model_path.empty()) {
    const auto model = kws::load_model(model_path);
    fe = model.frontend;
    T = model.matcher.T;
    n_templates = model.templates.size();
    fb = model.tables.mel;
    model_bytes = kws::memory_report(kws::serialize_model(model));
  } else {
    fb = kws::build_mel_filterbank(fe.n_mel, fe.pipeline_rate());
  }

  const auto stages = kws::frontend_cost(fe, fb);
  const auto report = kws::latency_report(stages, cfg.clock_hz);
  const auto diag = kws::matcher_cost(kws::MatchMode::diagonal, T, n_templates);
  const auto full = kws::matcher_cost(kws::MatchMode::full_dtw, T, n_templates);
  const double budget = kws::frame_budget_ms(fe);
  const double with_match = 1e3 * static_cast<double>(report.total_cycles_per_frame + diag.cycles) / cfg.clock_hz;
  const auto ablation = kws::compression_ablation(fe, T, n_templates);

  std::cout << "frontend, per frame\n" << kws::format_stage_table(stages);
  std::printf("total %llu cycles/frame -> %.3f ms at %.0f Hz\n",
              static_cast<unsigned long long>(report.total_cycles_per_frame), report.latency_ms(), cfg.clock_hz);
  std::cout << "\nmatcher, per utterance (" << n_templates << " templates, T=" << T << ")\n"
            << kws::format_stage_table(std::vector{diag, full});
  const double lookup_reduction =
      full.table_lookups ? 1.0 - static_cast<double>(diag.table_lookups) / static_cast<double>(full.table_lookups) : 0.0;
  std::printf("diagonal/full lookups = %llu/%llu, reduction %.2f%%\n",
              static_cast<unsigned long long>(diag.table_lookups),
              static_cast<unsigned long long>(full.table_lookups), 100.0 * lookup_reduction);
  std::printf("reference: silicon area -%.1f%%, power -%.1f%% for the diagonal unit (not modeled)\n",
              100.0 * kReferenceAreaReduction, 100.0 * kReferencePowerReduction);
  std::printf("\nframe latency incl. diagonal match %.3f ms, real-time budget %.3f ms: %s\n", with_match,
              budget, with_match <= budget ? "OK" : "OVER BUDGET");
  std::printf("reference: published frame latency %.2f ms at %.0f kHz (%.0f cycles)\n",
              kReferenceFrameLatencyMs, kReferenceClockHz / 1e3,
              kReferenceFrameLatencyMs * 1e-3 * kReferenceClockHz);

  std::printf("\ncompression ablation, per second of audio\n");
  for (const auto* s : {&ablation.baseline, &ablation.deployed}) {
    std::printf("  %-24s rate %5d Hz, %4zu frames, %6llu mults/frame, %8llu mults/s, %8llu distance lookups\n",
                s->label.c_str(), s->pipeline_rate, s->frames,
                static_cast<unsigned long long>(s->mults_per_frame),
                static_cast<unsigned long long>(s->mults_per_second),
                static_cast<unsigned long long>(s->distance_lookups));
  }
  std::printf("  distance computation reduction %.3f%%, mults/frame reduction %.2f%%, mults/s reduction %.2f%%\n",
              100.0 * ablation.distance_reduction, 100.0 * ablation.mults_per_frame_reduction,
              100.0 * ablation.mults_per_second_reduction);
  if (model_bytes) {
    std::printf("\nmodel size %zu bytes of %zu on-chip (%s)\n", model_bytes, kOnChipMemoryBytes,
                model_bytes <= kOnChipMemoryBytes ? "fits" : "DOES NOT FIT");
  }

  if (!json_out.empty()) {
    nlohmann::json js = nlohmann::json::array();
    for (const auto& s : stages) {
      js.push_back({{"stage", s.stage_name}, {"mults", s.mults}, {"adds", s.adds},
                    {"lookups", s.table_lookups}, {"cycles", s.cycles}});
    }
    const auto side = [](const kws::AblationReport::Side& s) {
      return nlohmann::json{{"label", s.label}, {"pipeline_rate", s.pipeline_rate}, {"frames", s.frames},
                            {"mults_per_frame", s.mults_per_frame}, {"mults_per_second", s.mults_per_second},
                            {"distance_lookups", s.distance_lookups}};
    };
    nlohmann::json j = {
        {"frontend_stages", js},
        {"total_cycles_per_frame", report.total_cycles_per_frame},
        {"clock_hz", cfg.clock_hz},
        {"frontend_latency_ms", report.latency_ms()},
        {"frame_latency_with_match_ms", with_match},
        {"frame_budget_ms", budget},
        {"reference_frame_latency_ms", kReferenceFrameLatencyMs},
        {"matcher", {{"templates", n_templates}, {"T", T},
                     {"diagonal_lookups", diag.table_lookups}, {"full_lookups", full.table_lookups},
                     {"diagonal_cycles", diag.cycles}, {"full_cycles", full.cycles},
                     {"lookup_reduction", lookup_reduction}}},
        {"ablation", {{"baseline", side(ablation.baseline)}, {"deployed", side(ablation.deployed)},
                      {"distance_reduction", ablation.distance_reduction},
                      {"mults_per_frame_reduction", ablation.mults_per_frame_reduction},
                      {"mults_per_second_reduction", ablation.mults_per_second_reduction}}},
        {"model_bytes", model_bytes},
    };
    write_text(json_out, j.dump(2) + "\n");
  }
  return with_match <= budget ? 0 : 1;
}

double sqnr_db(const kws::Spectrum& s, const kws::oracle::ComplexVector& ref) {
  double sig = 0.0, noise = 0.0;
  for (int k = 0; k < kws::kNumBins; ++k) {
    const std::complex<double> got(s.bins[k].re / 16384.0, s.bins[k].im / 16384.0);
    sig += std::norm(ref[k]);
    noise += std::norm(got - ref[k]);
  }
  return noise == 0.0 ? 200.0 : 10.0 * std::log10(sig / noise);
}

int cmd_verify(const Globals& g, const std::string& wav, int random_frames) {
  const auto cfg = load_cfg(g);
  const auto tables = kws::build_frontend_tables(cfg.frontend);
  std::vector<std::vector<double>> frames;
  if (!wav.empty()) {
    auto clip = kws::load_wav(wav);
    if (clip.sample_rate != cfg.frontend.pipeline_rate()) clip = kws::downsample(clip, cfg.frontend.downsample_factor);
    for (std::size_t i = 0; i < kws::frame_count(clip.samples.size(), cfg.frontend); ++i) {
      std::vector<double> f(kws::kFftSize);
      for (int n = 0; n < kws::kFftSize; ++n) f[n] = clip.samples[i * cfg.frontend.hop + n] / 32768.0;
      frames.push_back(std::move(f));
    }
  } else {
    std::mt19937_64 rng(static_cast<std::uint64_t>(g.seed >= 0 ? g.seed : 1));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < random_frames; ++i) {
      std::vector<double> f(kws::kFftSize);
      for (auto& x : f) x = 0.5 * u(rng);  // headroom for pre-emphasis
      frames.push_back(std::move(f));
    }
  }
  if (frames.empty()) throw kws::UsageError("verify: no frames to check");

  double sqnr_sum = 0.0, sqnr_min = 1e9, mfcc_max_err = 0.0, mfcc_sum_err = 0.0;
  std::size_t mfcc_n = 0;
  for (const auto& f : frames) {
    const auto q = to_q15(f);
    std::vector<double> qd(q.begin(), q.end());
    for (auto& x : qd) x /= 32768.0;
    const double s = sqnr_db(kws::fft128(q), kws::oracle::dft_naive(qd));
    sqnr_sum += s;
    sqnr_min = std::min(sqnr_min, s);

    const auto fixed = kws::process_frame(q, cfg.frontend, tables);
    const auto ref = kws::oracle::frame_mfcc(qd, cfg.frontend.pre_emphasis_alpha.to_double(), cfg.frontend.n_mel,
                                             cfg.frontend.n_mfcc, cfg.frontend.pipeline_rate());
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const double e = std::abs(fixed.coeffs[j] / 256.0 - ref[j]);
      mfcc_max_err = std::max(mfcc_max_err, e);
      mfcc_sum_err += e;
      ++mfcc_n;
    }
  }
  std::printf("frames checked        %zu\n", frames.size());
  std::printf("fft128 SQNR           mean %.2f dB, min %.2f dB\n", sqnr_sum / static_cast<double>(frames.size()), sqnr_min);
  std::printf("MFCC abs error        mean %.4f, max %.4f\n", mfcc_sum_err / static_cast<double>(mfcc_n), mfcc_max_err);
  return 0;
}

void write_lines(const fs::path& path, std::span<const std::int16_t> v) {
  std::ofstream out(path);
  if (!out) throw kws::IoError("cannot write '" + path.string() + "'");
  for (auto x : v) out << x << '\n';
}

int cmd_dump_tables(const Globals& g, const std::string& dir, const std::string& model_path) {
  kws::FrontendTables t;
  std::optional<kws::Model> model;
  if (!model_path.empty()) {
    model = kws::load_model(model_path);
    t = model->tables;
  } else {
    t = kws::build_frontend_tables(load_cfg(g).frontend);
  }
  fs::create_directories(dir);
  const fs::path d(dir);
  write_lines(d / "window.txt", t.window);
  write_lines(d / "twiddle_re.txt", t.twiddle_re);
  write_lines(d / "twiddle_im.txt", t.twiddle_im);
  write_lines(d / "log2.txt", t.log2_table);
  write_lines(d / "dct.txt", t.dct.cosines);
  std::vector<std::int16_t> layout, weights;
  for (const auto& f : t.mel.filters) {
    layout.push_back(static_cast<std::int16_t>(f.start_bin));
    layout.push_back(static_cast<std::int16_t>(f.weights.size()));
    weights.insert(weights.end(), f.weights.begin(), f.weights.end());
  }
  write_lines(d / "mel_layout.txt", layout);
  write_lines(d / "mel_weights.txt", weights);
  if (model) {
    write_lines(d / "codebook.txt", model->codebook.codewords);
    std::ofstream dist(d / "distance.txt");
    for (auto x : model->distances.d) dist << x << '\n';
    std::ofstream tmpl(d / "templates.txt");
    for (const auto& t : model->templates) {
      tmpl << t.keyword;
      for (auto i : t.indices) tmpl << ' ' << i;
      tmpl << '\n';
    }
  }
  std::cout << "tables written to " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyword-spotting accelerator model: MFCC front end, VQ codebook, diagonal DTW"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--mode", g.mode, "Matcher mode: full or diagonal");
  app.add_option("--seed", g.seed, "Seed for codebook splitting / random verification frames");

  std::string wav, out, manifest, model, json_out, timing_out, log_path, split = "test";
  bool real = false;
  unsigned threads = 0;
  int random_frames = 100;
  std::size_t n_templates = 5;

  auto* extract = app.add_subcommand("extract", "Dump MFCC frames of a WAV file as text");
  extract->add_option("wav", wav, "Input WAV")->required();
  extract->add_option("-o,--out", out, "Output file (default stdout)");
  extract->add_flag("--real", real, "Print real values instead of raw Q7.8 integers");

  auto* train = app.add_subcommand("train", "Train codebook, templates and threshold");
  train->add_option("--manifest", manifest, "Corpus manifest")->required();
  train->add_option("-o,--out", out, "Model file to write")->required();
  train->add_option("--log", log_path, "Write training log JSON");

  auto* evaluate = app.add_subcommand("evaluate", "Classify a manifest split and report accuracy");
  evaluate->add_option("--manifest", manifest, "Corpus manifest")->required();
  evaluate->add_option("--model", model, "Model file")->required();
  evaluate->add_option("--json", json_out, "Write the report as JSON");
  evaluate->add_option("--timing-out", timing_out, "Write per-clip wall times as JSON");
  evaluate->add_option("--split", split, "train or test")->check(CLI::IsMember({"train", "test"}));
  evaluate->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* classify = app.add_subcommand("classify", "Classify a single WAV file");
  classify->add_option("--model", model, "Model file")->required();
  classify->add_option("wav", wav, "Input WAV")->required();

  auto* cost = app.add_subcommand("cost-report", "Operation counts, cycles, latency and memory");
  cost->add_option("--model", model, "Take configuration and size from a model file");
  cost->add_option("--json", json_out, "Write the report as JSON");
  cost->add_option("--templates", n_templates, "Template count when no model is given");

  auto* verify = app.add_subcommand("verify", "Compare the fixed-point datapath against the float oracles");
  verify->add_option("wav", wav, "WAV file (default: random half-scale frames)");
  verify->add_option("--frames", random_frames, "Random half-scale frames when no WAV is given");

  auto* dump = app.add_subcommand("dump-tables", "Write datapath tables as text, one raw value per line");
  dump->add_option("-o,--out-dir", out, "Output directory")->required();
  dump->add_option("--model", model, "Dump the tables stored in a model file");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*extract) return cmd_extract(g, wav, out, real);
    if (*train) return cmd_train(g, manifest, out, log_path);
    if (*evaluate) return cmd_evaluate(g, manifest, model, json_out, timing_out, split, threads);
    if (*classify) return cmd_classify(g, model, wav);
    if (*cost) return cmd_cost_report(g, model, json_out, n_templates);
    if (*verify) return cmd_verify(g, wav, random_frames);
    if (*dump) return cmd_dump_tables(g, out, model);
  } catch (const kws::Error& e) {
    std::cerr << "kws: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
