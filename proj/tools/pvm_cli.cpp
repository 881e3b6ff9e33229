// pvm: preset-voice matching toolkit.
//
// Subcommands: curate, train, eval, lib build, lib validate, run, bench,
// make-fixture. See README.md for worked examples.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pvm/pvm.hpp"

namespace fs = std::filesystem;
using namespace pvm;

namespace {

enum class TrainTarget { Gender, MaleEmotion, FemaleEmotion };

TrainTarget parse_target(const std::string& text) {
  if (text == "gender") return TrainTarget::Gender;
  if (text == "male-emotion") return TrainTarget::MaleEmotion;
  if (text == "female-emotion") return TrainTarget::FemaleEmotion;
  throw InvalidArgument("unknown training target '" + text + "'");
}

/// Walks a curated gender-partitioned layout and produces labeled feature
/// vectors for one classifier target.
LabeledFeatures load_layout_features(const fs::path& layout, TrainTarget target,
                                     const StftConfig& config) {
  LabeledFeatures data;
  std::vector<std::pair<fs::path, int>> sources;  // (cell dir, label)

  if (target == TrainTarget::Gender) {
    data.class_labels = gender_label_names();
    for (std::size_t g = 0; g < kGenders.size(); ++g) {
      for (Emotion e : kEmotions) {
        sources.emplace_back(layout / dir_name(kGenders[g]) / dir_name(e), static_cast<int>(g));
      }
    }
  } else {
    data.class_labels = emotion_label_names();
    const Gender gender = target == TrainTarget::MaleEmotion ? Gender::Male : Gender::Female;
    for (std::size_t e = 0; e < kEmotions.size(); ++e) {
      sources.emplace_back(layout / dir_name(gender) / dir_name(kEmotions[e]), static_cast<int>(e));
    }
  }

  for (const auto& [cell, label] : sources) {
    if (!fs::is_directory(cell)) continue;
    std::vector<fs::path> files;
    for (const auto& it : fs::directory_iterator(cell)) {
      if (it.is_regular_file() && it.path().extension() == ".wav") files.push_back(it.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& wav : files) {
      data.features.push_back(extract_features(mel_spectrogram(read_wav(wav), config)));
      data.labels.push_back(label);
    }
  }

  if (data.features.empty()) {
    throw InvalidArgument("no WAV files found under '" + layout.string() +
                          "' for the requested target");
  }
  return data;
}

int cmd_curate(const std::string& root, const std::string& layout_kind, const std::string& out,
               bool no_intensity_filter, double pitch_min, double pitch_max, double loud_min,
               double loud_max, bool spectrograms) {
  const CorpusLayout layout = parse_corpus_layout(layout_kind);

  FilterPolicy policy;
  policy.pitch_min = pitch_min;
  policy.pitch_max = pitch_max;
  policy.loudness_min = loud_min;
  policy.loudness_max = loud_max;
  // strong-intensity gating applies to ravdess-style corpora unless disabled
  policy.require_strong_intensity = layout == CorpusLayout::RavdessStyle && !no_intensity_filter;

  const ScanResult scan = scan_corpus(root, layout);
  const CurationReport report = build_gender_dependent_layout(scan.samples, out, policy);

  const std::size_t rejected_label = report.rejected_label + scan.rejected_label;
  std::printf("scanned            %zu\n", scan.scanned);
  std::printf("kept               %zu\n", report.kept);
  std::printf("rejected: pitch    %zu\n", report.rejected_pitch);
  std::printf("rejected: loudness %zu\n", report.rejected_loudness);
  std::printf("rejected: label    %zu\n", rejected_label);
  for (const auto& [cell, count] : report.kept_per_class) {
    std::printf("  %-16s %zu\n", cell.c_str(), count);
  }

  if (spectrograms) {
    const ExportResult exported = export_spectrograms(out, {});
    std::printf("spectrograms       %zu written, %zu skipped\n", exported.written, exported.skipped);
  }
  std::printf("layout + manifest under %s\n", out.c_str());
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& target_text, std::uint64_t seed,
              const std::string& out, int epochs_override, int batch_size, double l2) {
  const TrainTarget target = parse_target(target_text);
  const StftConfig config;
  const LabeledFeatures data = load_layout_features(data_dir, target, config);

  TrainConfig config_train;
  config_train.seed = seed;
  config_train.batch_size = batch_size;
  config_train.l2 = l2;
  // gender converges in 20 epochs; the emotion models get 30
  config_train.epochs = epochs_override > 0 ? epochs_override
                        : target == TrainTarget::Gender ? 20
                                                        : 30;

  std::printf("training %s on %zu samples (%zu classes, dim %zu, %d epochs, seed %llu)\n",
              target_text.c_str(), data.size(), data.class_labels.size(),
              data.features.front().size(), config_train.epochs,
              static_cast<unsigned long long>(seed));
  const TrainResult result = train(data, config_train);
  std::printf("loss: initial %.4f -> final %.4f (validation %.4f)\n", result.initial_train_loss,
              result.final_train_loss, result.final_validation_loss);

  if (!result.test_indices.empty()) {
    std::vector<FeatureVector> xs;
    std::vector<int> ys;
    for (int idx : result.test_indices) {
      xs.push_back(data.features[static_cast<std::size_t>(idx)]);
      ys.push_back(data.labels[static_cast<std::size_t>(idx)]);
    }
    const EvalReport report = evaluate(result.model, xs, ys);
    std::fputs(render_report(report, "held-out test split").c_str(), stdout);
  }

  save_model(out, result.model);
  std::printf("model written to %s\n", out.c_str());
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_dir,
             const std::string& target_text, const std::string& csv_out) {
  const SoftmaxModel model = load_model(model_path);

  TrainTarget target;
  if (!target_text.empty()) {
    target = parse_target(target_text);
  } else if (model.class_labels == gender_label_names()) {
    target = TrainTarget::Gender;
  } else {
    throw InvalidArgument(
        "cannot infer which gender subtree to evaluate an emotion model on; "
        "pass --target male-emotion or --target female-emotion");
  }

  const LabeledFeatures data = load_layout_features(data_dir, target, {});
  if (data.class_labels != model.class_labels) {
    throw InvalidArgument("layout classes do not match the model's label set");
  }

  const EvalReport report = evaluate(model, data.features, data.labels);
  std::fputs(render_report(report, "evaluation of " + model_path).c_str(), stdout);

  if (!csv_out.empty()) {
    std::ofstream out(csv_out, std::ios::trunc);
    out << report_to_csv(report);
    std::printf("csv written to %s\n", csv_out.c_str());
  }
  return 0;
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int print_coverage(const PresetLibrary& lib, const std::vector<std::string>& languages) {
  const CoverageReport coverage = lib.validate(languages);
  for (const LanguageCoverage& lc : coverage.per_language) {
    if (lc.missing_cells.empty()) {
      std::printf("%s: all 10 cells covered\n", lc.language.c_str());
    } else {
      std::printf("%s: %zu missing cells:", lc.language.c_str(), lc.missing_cells.size());
      for (const FeatureCode& code : lc.missing_cells) std::printf(" %s", code.str().c_str());
      std::printf("\n");
    }
  }
  for (const std::string& id : coverage.missing_audio) {
    std::printf("warning: entry '%s' points at a missing audio file\n", id.c_str());
  }
  for (const std::string& warning : lib.warnings()) {
    std::printf("warning: %s\n", warning.c_str());
  }
  std::printf(coverage.ok ? "library OK\n" : "library INCOMPLETE\n");
  return coverage.ok ? 0 : 1;
}

std::vector<std::string> library_languages(const PresetLibrary& lib) {
  std::vector<std::string> langs;
  for (const auto& entry : lib.entries()) {
    if (std::find(langs.begin(), langs.end(), entry.language) == langs.end()) {
      langs.push_back(entry.language);
    }
  }
  std::sort(langs.begin(), langs.end());
  return langs;
}

int cmd_lib_build(const std::string& manifest, bool check, const std::string& languages) {
  const PresetLibrary lib = load_library(manifest);
  std::printf("loaded %zu entries from %s\n", lib.size(), manifest.c_str());
  if (!check) return 0;
  const auto langs = languages.empty() ? library_languages(lib) : split_csv_list(languages);
  return print_coverage(lib, langs);
}

int cmd_lib_validate(const std::string& manifest, const std::string& languages) {
  const PresetLibrary lib = load_library(manifest);
  const auto langs = languages.empty() ? library_languages(lib) : split_csv_list(languages);
  return print_coverage(lib, langs);
}

int cmd_run(const std::string& stream_path, const std::string& lang, const std::string& models_dir,
            const std::string& lib_path, const std::string& mode_text, const std::string& tts_kind,
            const std::string& tts_cmd, int tts_timeout_ms, const std::string& out_dir,
            bool keep_going) {
  const std::vector<Segment> segments = read_stream_manifest(stream_path);
  const GemoModelSet models = load_model_set(models_dir);
  const PresetLibrary lib = load_library(lib_path);
  const RunMode mode = parse_run_mode(mode_text);

  std::unique_ptr<TtsBackend> tts;
  if (tts_kind == "mock") {
    tts = std::make_unique<MockTtsBackend>();
  } else if (tts_kind == "external") {
    if (tts_cmd.empty()) throw InvalidArgument("--tts external requires --tts-cmd");
    tts = std::make_unique<ExternalCommandTtsBackend>(
        tts_cmd, std::chrono::milliseconds(tts_timeout_ms));
  } else {
    throw InvalidArgument("unknown TTS backend '" + tts_kind + "'");
  }

  GemoMatcher matcher(models, lib);
  RunOptions options;
  options.keep_going = keep_going;
  const StreamResult result = run_stream(matcher, *tts, segments, lang, mode, options);

  fs::create_directories(out_dir);
  for (const SegmentOutput& output : result.outputs) {
    char name[32];
    std::snprintf(name, sizeof(name), "segment_%03zu.wav", output.segment_index);
    write_wav(fs::path(out_dir) / name, output.audio, WavFormat::Float32);
  }
  std::ofstream stats(fs::path(out_dir) / "stats.json", std::ios::trunc);
  stats << to_json(result.stats).dump(2) << "\n";

  std::printf("%zu segments, %zu aux runs, %zu tts runs (%zu failed)\n", result.stats.segments,
              result.stats.aux_runs, result.stats.tts_runs, result.stats.failed_segments);
  std::printf("aux %.3fs, tts %.3fs, total %.3fs\n", result.stats.aux_seconds,
              result.stats.tts_seconds, result.stats.total_seconds);
  std::printf("outputs + stats.json under %s\n", out_dir.c_str());
  return result.stats.failed_segments == 0 ? 0 : 1;
}

int cmd_bench(const std::string& stream_path, const std::string& modes_text, int reps,
              const std::string& out_csv, const std::string& models_dir,
              const std::string& lib_path, const std::string& lang, double stub_aux_ms,
              bool parallel) {
  const std::vector<Segment> segments = read_stream_manifest(stream_path);

  std::vector<RunMode> modes;
  for (const std::string& m : split_csv_list(modes_text)) modes.push_back(parse_run_mode(m));

  std::vector<Workload> workloads;
  workloads.push_back({fs::path(stream_path).stem().string(), segments});

  MockTtsBackend tts;
  std::unique_ptr<VoiceMatcher> matcher;
  GemoModelSet models;
  PresetLibrary lib;
  if (!models_dir.empty() && !lib_path.empty()) {
    models = load_model_set(models_dir);
    lib = load_library(lib_path);
    matcher = std::make_unique<GemoMatcher>(models, lib);
  } else {
    MatchResult canned;
    canned.code = {Gender::Female, Emotion::Neutral};
    canned.preset.id = "stub";
    canned.preset.language = lang;
    canned.preset.code = canned.code;
    canned.preset.consent.speaker_id = "stub";
    canned.preset.consent.consent_date = "2024-01-01";
    matcher = std::make_unique<StubMatcher>(
        canned, std::chrono::duration<double>(stub_aux_ms / 1000.0));
    std::printf("no --models/--lib given: benching with a %.1f ms stub aux stage\n", stub_aux_ms);
  }

  BenchOptions options;
  options.reps = reps;
  options.parallel_workloads = parallel;
  const auto rows = bench_pipeline(*matcher, tts, workloads, modes, lang, options);
  // total_mean_s is the wall clock per run, I/O and orchestration included;
  // aux/tts columns are the isolated stage compute times
  std::printf("%-12s %-10s %9s %8s %8s %12s %12s %12s\n", "workload", "mode", "segments", "aux",
              "tts", "aux_mean_s", "tts_mean_s", "total_mean_s");
  for (const BenchRow& row : rows) {
    std::printf("%-12s %-10s %9zu %8zu %8zu %12.6f %12.6f %12.6f\n", row.workload.c_str(),
                to_string(row.mode).c_str(), row.segments, row.aux_runs, row.tts_runs,
                row.aux_mean_s, row.tts_mean_s, row.total_mean_s);
    // isolated per-invocation aux cost, comparable across modes
    if (row.aux_runs > 0) {
      std::printf("%-12s %-10s isolated aux mean: %.6f s/run\n", "", "",
                  row.aux_mean_s / static_cast<double>(row.aux_runs));
    }
  }
  if (!out_csv.empty()) {
    write_bench_csv(out_csv, rows);
    std::printf("report written to %s\n", out_csv.c_str());
  }
  return 0;
}

// --- synthetic fixture generation -------------------------------------------

/// Emotion code used by ravdess-style fixture names.
int fixture_emotion_code(Emotion e) {
  switch (e) {
    case Emotion::Neutral: return 1;
    case Emotion::Happy: return 3;
    case Emotion::Sad: return 4;
    case Emotion::Angry: return 5;
    case Emotion::Disgust: return 7;
  }
  return 1;
}

/// Synthetic "voice": class-dependent fundamental plus two harmonics, with
/// per-file jitter, normalized into the curation loudness band.
AudioClip fixture_voice(Gender g, Emotion e, std::mt19937_64& rng, double seconds = 1.0) {
  const int emotion_index = static_cast<int>(e);
  const double base = g == Gender::Male ? 110.0 : 210.0;
  const double f0 = base * (1.0 + 0.17 * emotion_index);
  const double jitter = 1.0 + 0.02 * (static_cast<double>(rng() % 1000) / 1000.0 - 0.5);
  const double h2 = 0.2 + 0.1 * emotion_index;
  const double h3 = g == Gender::Male ? 0.3 : 0.1;

  AudioClip clip;
  clip.sample_rate = 22050;
  const auto n = static_cast<std::size_t>(seconds * clip.sample_rate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / clip.sample_rate;
    const double w = 2.0 * std::numbers::pi * f0 * jitter * t;
    clip.samples[i] = 0.6 * std::sin(w) + h2 * std::sin(2.0 * w) + h3 * std::sin(3.0 * w);
  }
  return with_rms_dbfs(clip, -21.5);
}

int cmd_make_fixture(const std::string& out_dir, int files_per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const fs::path root(out_dir);
  const fs::path corpus = root / "corpus";
  fs::create_directories(corpus);

  // ravdess-style corpus, strong intensity, unique actor/repetition fields
  for (Gender g : kGenders) {
    for (Emotion e : kEmotions) {
      for (int i = 0; i < files_per_class; ++i) {
        const int actor = (g == Gender::Male ? 1 : 2) + 2 * (i % 12);
        const int repetition = 1 + i / 12;
        char name[64];
        std::snprintf(name, sizeof(name), "03-01-%02d-02-01-%02d-%02d.wav",
                      fixture_emotion_code(e), repetition, actor);
        write_wav(corpus / name, fixture_voice(g, e, rng));
      }
    }
  }
  std::printf("corpus: %d files under %s\n", 10 * files_per_class, corpus.string().c_str());

  // preset library covering fr and de
  const fs::path voices = root / "voices";
  fs::create_directories(voices);
  PresetLibrary lib;
  for (const std::string& lang : {std::string("fr"), std::string("de")}) {
    for (Gender g : kGenders) {
      for (Emotion e : kEmotions) {
        const FeatureCode code{g, e};
        const std::string id = lang + "_" + detail::ascii_lower(to_string(g)) + "_" +
                               detail::ascii_lower(to_string(e));
        const fs::path wav = voices / (id + ".wav");
        write_wav(wav, fixture_voice(g, e, rng, 0.5));

        PresetVoiceEntry entry;
        entry.id = id;
        entry.language = lang;
        entry.code = code;
        entry.audio_path = "voices/" + id + ".wav";
        entry.consent.speaker_id = "fixture-" + id;
        entry.consent.consent_date = "2024-03-01";
        entry.consent.scope = "synthetic fixture, unrestricted";
        entry.quality_score = 3.0 + static_cast<double>(rng() % 20) / 10.0;
        lib.add_entry(entry);
      }
    }
  }
  save_library(root / "library.json", lib);
  std::printf("library: %zu presets + %s\n", lib.size(), (root / "library.json").string().c_str());

  // five-segment stream over two speakers
  const fs::path stream_audio = root / "stream_audio";
  fs::create_directories(stream_audio);
  std::ofstream stream(root / "stream.csv", std::ios::trunc);
  stream << kStreamManifestHeader << "\n";
  const char* speakers[] = {"A", "A", "B", "B", "A"};
  for (int i = 0; i < 5; ++i) {
    const Gender g = speakers[i][0] == 'A' ? Gender::Female : Gender::Male;
    char name[32];
    std::snprintf(name, sizeof(name), "seg_%02d.wav", i);
    write_wav(stream_audio / name, fixture_voice(g, Emotion::Neutral, rng, 0.6));
    stream << speakers[i] << ",stream_audio/" << name << ",synthetic line " << i << "\n";
  }
  std::printf("stream: %s\n", (root / "stream.csv").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"preset-voice matching toolkit"};
  app.require_subcommand(1);

  // curate
  std::string curate_root, curate_layout = "ravdess-style", curate_out;
  bool no_intensity_filter = false, spectrograms = false;
  FilterPolicy defaults;
  double pitch_min = defaults.pitch_min, pitch_max = defaults.pitch_max;
  double loud_min = defaults.loudness_min, loud_max = defaults.loudness_max;
  auto* curate = app.add_subcommand("curate", "build a gender-partitioned training layout");
  curate->add_option("--root", curate_root, "corpus root directory")->required();
  curate->add_option("--layout", curate_layout, "ravdess-style|flat-manifest");
  curate->add_option("--out", curate_out, "output layout directory")->required();
  curate->add_flag("--no-intensity-filter", no_intensity_filter,
                   "keep normal-intensity files in ravdess-style corpora");
  curate->add_option("--pitch-min", pitch_min, "pitch band lower edge, Hz");
  curate->add_option("--pitch-max", pitch_max, "pitch band upper edge, Hz");
  curate->add_option("--loud-min", loud_min, "loudness band lower edge, dBFS");
  curate->add_option("--loud-max", loud_max, "loudness band upper edge, dBFS");
  curate->add_flag("--spectrograms", spectrograms, "also export spectrogram PNGs");

  // train
  std::string train_data, train_target, train_out;
  std::uint64_t train_seed = 0;
  int train_epochs = 0, train_batch = 32;
  double train_l2 = 1e-4;
  auto* train_cmd = app.add_subcommand("train", "train one classifier from a curated layout");
  train_cmd->add_option("--data", train_data, "curated layout directory")->required();
  train_cmd->add_option("--target", train_target, "gender|male-emotion|female-emotion")->required();
  train_cmd->add_option("--seed", train_seed, "training seed");
  train_cmd->add_option("--out", train_out, "output model file")->required();
  train_cmd->add_option("--epochs", train_epochs, "override the per-target default epochs");
  train_cmd->add_option("--batch-size", train_batch, "mini-batch size");
  train_cmd->add_option("--l2", train_l2, "L2 penalty");

  // eval
  std::string eval_model, eval_data, eval_target, eval_csv;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model over a curated layout");
  eval_cmd->add_option("--model", eval_model, "model file")->required();
  eval_cmd->add_option("--data", eval_data, "curated layout directory")->required();
  eval_cmd->add_option("--target", eval_target, "gender|male-emotion|female-emotion");
  eval_cmd->add_option("--csv", eval_csv, "also write the report as CSV");

  // lib build / validate
  std::string lib_manifest, lib_languages;
  bool lib_check = false;
  auto* lib_cmd = app.add_subcommand("lib", "preset-voice library tools");
  lib_cmd->require_subcommand(1);
  auto* lib_build = lib_cmd->add_subcommand("build", "load a manifest and optionally check coverage");
  lib_build->add_option("--manifest", lib_manifest, "library.json manifest")->required();
  lib_build->add_flag("--check", lib_check, "verify per-language cell coverage");
  lib_build->add_option("--languages", lib_languages, "comma-separated language filter");
  auto* lib_validate = lib_cmd->add_subcommand("validate", "report per-language cell coverage");
  lib_validate->add_option("--manifest", lib_manifest, "library.json manifest")->required();
  lib_validate->add_option("--languages", lib_languages, "comma-separated languages")->required();

  // run
  std::string run_stream_path, run_lang, run_models, run_lib, run_mode = "pvm-cached";
  std::string run_tts = "mock", run_tts_cmd, run_out;
  int run_tts_timeout = 60000;
  bool run_keep_going = false;
  auto* run_cmd = app.add_subcommand("run", "process a multi-speaker stream end to end");
  run_cmd->add_option("--stream", run_stream_path, "stream manifest CSV")->required();
  run_cmd->add_option("--lang", run_lang, "target language code")->required();
  run_cmd->add_option("--models", run_models, "directory holding the three .smx models")->required();
  run_cmd->add_option("--lib", run_lib, "library.json manifest")->required();
  run_cmd->add_option("--mode", run_mode, "pvm-cached|baseline");
  run_cmd->add_option("--tts", run_tts, "mock|external");
  run_cmd->add_option("--tts-cmd", run_tts_cmd,
                      "external command template with {preset_audio} {text} {language} {out}");
  run_cmd->add_option("--tts-timeout-ms", run_tts_timeout, "external command deadline");
  run_cmd->add_option("--out", run_out, "output directory")->required();
  run_cmd->add_flag("--keep-going", run_keep_going, "skip failing segments instead of aborting");

  // bench
  std::string bench_stream, bench_modes = "pvm-cached,baseline", bench_out;
  std::string bench_models, bench_lib, bench_lang = "fr";
  int bench_reps = 10;
  double bench_stub_ms = 1.0;
  bool bench_parallel = false;
  auto* bench_cmd = app.add_subcommand("bench", "time the aux and TTS stages over a stream");
  bench_cmd->add_option("--stream", bench_stream, "stream manifest CSV")->required();
  bench_cmd->add_option("--modes", bench_modes, "comma-separated run modes");
  bench_cmd->add_option("--reps", bench_reps, "measured repetitions (one warm-up excluded)");
  bench_cmd->add_option("--out", bench_out, "report CSV path");
  bench_cmd->add_option("--models", bench_models, "model directory (real matcher)");
  bench_cmd->add_option("--lib", bench_lib, "library manifest (real matcher)");
  bench_cmd->add_option("--lang", bench_lang, "target language");
  bench_cmd->add_option("--stub-aux-ms", bench_stub_ms, "stub aux cost when no models given");
  bench_cmd->add_flag("--parallel", bench_parallel,
                      "run workloads on parallel threads (counts stay exact; timings get noisy)");

  // make-fixture
  std::string fixture_out;
  int fixture_per_class = 8;
  std::uint64_t fixture_seed = 1;
  auto* fixture_cmd =
      app.add_subcommand("make-fixture", "generate a synthetic corpus, library, and stream");
  fixture_cmd->add_option("--out", fixture_out, "fixture directory")->required();
  fixture_cmd->add_option("--files-per-class", fixture_per_class, "WAVs per gender-emotion class");
  fixture_cmd->add_option("--seed", fixture_seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (curate->parsed()) {
      return cmd_curate(curate_root, curate_layout, curate_out, no_intensity_filter, pitch_min,
                        pitch_max, loud_min, loud_max, spectrograms);
    }
    if (train_cmd->parsed()) {
      return cmd_train(train_data, train_target, train_seed, train_out, train_epochs, train_batch,
                       train_l2);
    }
    if (eval_cmd->parsed()) return cmd_eval(eval_model, eval_data, eval_target, eval_csv);
    if (lib_cmd->parsed()) {
      if (lib_build->parsed()) return cmd_lib_build(lib_manifest, lib_check, lib_languages);
      return cmd_lib_validate(lib_manifest, lib_languages);
    }
    if (run_cmd->parsed()) {
      return cmd_run(run_stream_path, run_lang, run_models, run_lib, run_mode, run_tts,
                     run_tts_cmd, run_tts_timeout, run_out, run_keep_going);
    }
    if (bench_cmd->parsed()) {
      return cmd_bench(bench_stream, bench_modes, bench_reps, bench_out, bench_models, bench_lib,
                       bench_lang, bench_stub_ms, bench_parallel);
    }
    if (fixture_cmd->parsed()) return cmd_make_fixture(fixture_out, fixture_per_class, fixture_seed);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
