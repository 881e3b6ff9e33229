#pragma once

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pvm/audio.hpp"
#include "pvm/csv.hpp"
#include "pvm/errors.hpp"
#include "pvm/gemo.hpp"
#include "pvm/preset_library.hpp"
#include "pvm/types.hpp"
#include "pvm/wav.hpp"

namespace pvm {

/// One unit of a multi-speaker stream: who is speaking, their source-language
/// audio, and the target-language text to synthesize.
struct Segment {
  std::string speaker_tag;
  AudioClip audio;
  std::string text;
};

struct MatchResult {
  FeatureCode code;
  PresetVoiceEntry preset;
  std::vector<double> gender_probabilities;
  std::vector<double> emotion_probabilities;
  double matcher_seconds = 0.0;
};

/// Stable 64-bit FNV-1a; used wherever the mock backend needs a
/// platform-independent hash.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// --- TTS backends -----------------------------------------------------------

class TtsBackend {
 public:
  virtual ~TtsBackend() = default;

  virtual AudioClip synthesize(const PresetVoiceEntry& preset, const std::string& text,
                               const std::string& language) = 0;

  /// Whether distinct streams may call synthesize concurrently.
  virtual bool supports_parallel_streams() const { return false; }
};

/// Payload recoverable from a mock-synthesized clip.
struct MockPayload {
  std::string preset_id;
  std::uint64_t text_hash = 0;
  std::string language;

  friend bool operator==(const MockPayload&, const MockPayload&) = default;
};

inline double mock_tone_hz(const std::string& preset_id) {
  return 200.0 + static_cast<double>(fnv1a64(preset_id) % 2000);
}

namespace detail {

inline constexpr int kMockRate = 22050;
inline constexpr double kMockToneSeconds = 0.1;
// byte b encodes as the midpoint of its 1/256 bucket, which survives both
// float32 and 16-bit PCM round trips
inline double mock_byte_sample(std::uint8_t b) { return (b + 0.5) / 256.0; }
inline std::uint8_t mock_sample_byte(double s) {
  const int v = static_cast<int>(std::floor(s * 256.0));
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

}  // namespace detail

/// Test/benchmark oracle standing in for a real voice-cloning TTS engine:
/// the output losslessly encodes (preset id, hash(text), language) in a
/// sample header, followed by a tone whose frequency depends on the preset.
class MockTtsBackend : public TtsBackend {
 public:
  AudioClip synthesize(const PresetVoiceEntry& preset, const std::string& text,
                       const std::string& language) override {
    if (text.empty()) throw InvalidArgument("MockTtsBackend: text must be non-empty");

    std::vector<std::uint8_t> header = {'P', 'V', 'M', '!'};
    auto put_u16 = [&](std::uint16_t v) {
      header.push_back(static_cast<std::uint8_t>(v & 0xff));
      header.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    if (preset.id.size() > 0xffff || language.size() > 0xffff) {
      throw InvalidArgument("MockTtsBackend: id/language too long to encode");
    }
    put_u16(static_cast<std::uint16_t>(preset.id.size()));
    header.insert(header.end(), preset.id.begin(), preset.id.end());
    const std::uint64_t text_hash = fnv1a64(text);
    for (int i = 0; i < 8; ++i) header.push_back(static_cast<std::uint8_t>((text_hash >> (8 * i)) & 0xff));
    put_u16(static_cast<std::uint16_t>(language.size()));
    header.insert(header.end(), language.begin(), language.end());

    AudioClip clip;
    clip.sample_rate = detail::kMockRate;
    clip.source = "mock:" + preset.id;
    clip.samples.reserve(header.size() + static_cast<std::size_t>(detail::kMockRate * detail::kMockToneSeconds));
    for (std::uint8_t b : header) clip.samples.push_back(detail::mock_byte_sample(b));

    const double tone_hz = mock_tone_hz(preset.id);
    const auto tone_len = static_cast<std::size_t>(detail::kMockRate * detail::kMockToneSeconds);
    for (std::size_t i = 0; i < tone_len; ++i) {
      clip.samples.push_back(
          0.5 * std::sin(2.0 * std::numbers::pi * tone_hz * static_cast<double>(i) / detail::kMockRate));
    }
    return clip;
  }

  bool supports_parallel_streams() const override { return true; }
};

/// Recovers the payload a MockTtsBackend embedded in a clip.
inline MockPayload decode_mock_clip(const AudioClip& clip) {
  const auto& s = clip.samples;
  std::size_t pos = 0;
  auto take_byte = [&]() -> std::uint8_t {
    if (pos >= s.size()) throw InvalidArgument("decode_mock_clip: clip too short");
    return detail::mock_sample_byte(s[pos++]);
  };
  auto take_u16 = [&]() -> std::uint16_t {
    const std::uint16_t lo = take_byte();
    return static_cast<std::uint16_t>(lo | (take_byte() << 8));
  };

  if (take_byte() != 'P' || take_byte() != 'V' || take_byte() != 'M' || take_byte() != '!') {
    throw InvalidArgument("decode_mock_clip: missing mock header");
  }
  MockPayload payload;
  const std::uint16_t id_len = take_u16();
  for (std::uint16_t i = 0; i < id_len; ++i) payload.preset_id += static_cast<char>(take_byte());
  for (int i = 0; i < 8; ++i) payload.text_hash |= static_cast<std::uint64_t>(take_byte()) << (8 * i);
  const std::uint16_t lang_len = take_u16();
  for (std::uint16_t i = 0; i < lang_len; ++i) payload.language += static_cast<char>(take_byte());
  return payload;
}

/// Adapter for an external synthesis command. The template is run through
/// /bin/sh with {preset_audio}, {text}, {language} and {out} substituted
/// (shell-quoted). The command must write a WAV file at {out}.
class ExternalCommandTtsBackend : public TtsBackend {
 public:
  explicit ExternalCommandTtsBackend(std::string command_template,
                                     std::chrono::milliseconds timeout = std::chrono::seconds(60),
                                     std::filesystem::path work_dir = std::filesystem::temp_directory_path())
      : template_(std::move(command_template)), timeout_(timeout), work_dir_(std::move(work_dir)) {}

  AudioClip synthesize(const PresetVoiceEntry& preset, const std::string& text,
                       const std::string& language) override {
    const std::string tag =
        std::to_string(::getpid()) + "_" + std::to_string(counter_.fetch_add(1));
    const std::filesystem::path out_path = work_dir_ / ("pvm_tts_out_" + tag + ".wav");
    const std::filesystem::path err_path = work_dir_ / ("pvm_tts_err_" + tag + ".log");

    std::string cmd = template_;
    replace_all(cmd, "{preset_audio}", shell_quote(preset.audio_path));
    replace_all(cmd, "{text}", shell_quote(text));
    replace_all(cmd, "{language}", shell_quote(language));
    replace_all(cmd, "{out}", shell_quote(out_path.string()));
    // subshell so the redirection captures stderr of the whole template
    cmd = "( " + cmd + " ) 2>" + shell_quote(err_path.string());

    const int status = run_with_deadline(cmd);
    const std::string diagnostics = slurp(err_path);
    std::filesystem::remove(err_path);

    if (status == kTimedOut) {
      std::filesystem::remove(out_path);
      throw ExternalTimeout("external TTS command exceeded " +
                            std::to_string(timeout_.count()) + " ms" +
                            (diagnostics.empty() ? "" : ": " + diagnostics));
    }
    if (status != 0) {
      std::filesystem::remove(out_path);
      throw ExternalFailure(status, diagnostics);
    }
    if (!std::filesystem::exists(out_path)) {
      throw ExternalOutputError("external TTS command wrote no output file" +
                                (diagnostics.empty() ? std::string{} : ": " + diagnostics));
    }
    try {
      AudioClip clip = read_wav(out_path);
      std::filesystem::remove(out_path);
      return clip;
    } catch (const WavError& e) {
      std::filesystem::remove(out_path);
      throw ExternalOutputError(std::string("external TTS output unreadable: ") + e.what());
    }
  }

 private:
  static constexpr int kTimedOut = -1000;

  static void replace_all(std::string& text, const std::string& needle, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
      text.replace(pos, needle.size(), value);
      pos += value.size();
    }
  }

  static std::string shell_quote(const std::string& text) {
    std::string out = "'";
    for (char c : text) {
      if (c == '\'') out += "'\\''";
      else out += c;
    }
    out += "'";
    return out;
  }

  static std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return {};
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    while (!content.empty() && (content.back() == '\n' || content.back() == '\r')) content.pop_back();
    return content;
  }

  /// Runs the command under /bin/sh, killing the process group when the
  /// deadline passes. Returns the exit code or kTimedOut.
  int run_with_deadline(const std::string& cmd) const {
    const pid_t pid = ::fork();
    if (pid < 0) throw ExternalFailure(-1, "fork failed");
    if (pid == 0) {
      ::setpgid(0, 0);
      ::execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    int status = 0;
    while (true) {
      const pid_t done = ::waitpid(pid, &status, WNOHANG);
      if (done == pid) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        return kTimedOut;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return -1;
  }

  std::string template_;
  std::chrono::milliseconds timeout_;
  std::filesystem::path work_dir_;
  std::atomic<unsigned long> counter_{0};
};

// --- voice matching ---------------------------------------------------------

/// The auxiliary (non-TTS) stage: maps input audio to a preset voice.
class VoiceMatcher {
 public:
  virtual ~VoiceMatcher() = default;
  virtual MatchResult match(const AudioClip& clip, const std::string& target_language) = 0;
};

/// Classifies (gender, emotion) hierarchically and queries the codebook.
inline MatchResult match_voice(const GemoModelSet& models, const PresetLibrary& lib,
                               const AudioClip& clip, const std::string& target_language,
                               const StftConfig& config = {}) {
  const auto started = std::chrono::steady_clock::now();
  const HierarchicalResult classified = classify_hierarchical(models, clip, config);
  MatchResult result;
  result.code = classified.code;
  result.gender_probabilities = classified.gender_probabilities;
  result.emotion_probabilities = classified.emotion_probabilities;
  result.preset = lib.lookup(target_language, classified.code);
  // downstream TTS backends get a path that works from any working directory
  result.preset.audio_path = lib.resolve_audio_path(result.preset).string();
  result.matcher_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

class GemoMatcher : public VoiceMatcher {
 public:
  GemoMatcher(const GemoModelSet& models, const PresetLibrary& lib, StftConfig config = {})
      : models_(&models), lib_(&lib), config_(config) {}

  MatchResult match(const AudioClip& clip, const std::string& target_language) override {
    return match_voice(*models_, *lib_, clip, target_language, config_);
  }

 private:
  const GemoModelSet* models_;
  const PresetLibrary* lib_;
  StftConfig config_;
};

/// Matcher with a fixed per-invocation cost (busy-wait) returning a canned
/// result; used by benchmarks to isolate the counting/scaling behavior.
class StubMatcher : public VoiceMatcher {
 public:
  explicit StubMatcher(MatchResult canned, std::chrono::duration<double> cost = {})
      : canned_(std::move(canned)), cost_(cost) {}

  MatchResult match(const AudioClip&, const std::string&) override {
    invocations_.fetch_add(1, std::memory_order_relaxed);
    if (cost_.count() > 0) {
      const auto until = std::chrono::steady_clock::now() + cost_;
      while (std::chrono::steady_clock::now() < until) {
      }
    }
    MatchResult r = canned_;
    r.matcher_seconds = cost_.count();
    return r;
  }

  std::size_t invocations() const { return invocations_.load(); }

 private:
  MatchResult canned_;
  std::chrono::duration<double> cost_;
  std::atomic<std::size_t> invocations_{0};
};

// --- stream orchestration ---------------------------------------------------

enum class RunMode {
  PvmCached,                // matcher re-runs only on speaker change
  PerUtterancePostprocess,  // baseline: aux stage once per segment
};

inline std::string to_string(RunMode mode) {
  return mode == RunMode::PvmCached ? "pvm-cached" : "baseline";
}

inline RunMode parse_run_mode(std::string_view text) {
  const std::string s = detail::ascii_lower(text);
  if (s == "pvm-cached") return RunMode::PvmCached;
  if (s == "baseline" || s == "per-utterance-postprocess") return RunMode::PerUtterancePostprocess;
  throw InvalidArgument("unknown run mode '" + std::string(text) + "'");
}

/// Half-open wall-clock interval in seconds since the start of the run.
struct StageInterval {
  double begin_s = 0.0;
  double end_s = 0.0;
};

struct SegmentOutput {
  std::size_t segment_index = 0;
  AudioClip audio;
  MatchResult match;
  std::size_t match_run_index = 0;  // which aux run produced `match`
  std::optional<StageInterval> aux_interval;  // present iff the matcher ran here
  StageInterval tts_interval;
};

struct RunStats {
  RunMode mode = RunMode::PvmCached;
  std::size_t segments = 0;
  std::size_t speaker_changes = 0;  // adjacent segments with differing tags
  std::size_t aux_runs = 0;
  std::size_t tts_runs = 0;
  std::size_t failed_segments = 0;
  double aux_seconds = 0.0;
  double tts_seconds = 0.0;
  double total_seconds = 0.0;
};

struct RunOptions {
  bool keep_going = false;  // skip failing segments instead of aborting
};

struct StreamResult {
  std::vector<SegmentOutput> outputs;
  RunStats stats;
};

/// Processes a stream in order. In PvmCached mode the matcher runs on the
/// first segment and whenever speaker_tag differs from the previous segment;
/// otherwise the cached MatchResult is reused. The baseline mode runs the
/// aux stage once per segment. TTS always runs per segment.
inline StreamResult run_stream(VoiceMatcher& matcher, TtsBackend& tts,
                               const std::vector<Segment>& segments,
                               const std::string& target_language, RunMode mode,
                               const RunOptions& options = {}) {
  if (segments.empty()) throw InvalidArgument("run_stream: stream must be non-empty");

  StreamResult result;
  result.stats.mode = mode;
  result.stats.segments = segments.size();
  for (std::size_t i = 1; i < segments.size(); ++i) {
    if (segments[i].speaker_tag != segments[i - 1].speaker_tag) ++result.stats.speaker_changes;
  }

  const auto run_start = std::chrono::steady_clock::now();
  auto now_s = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
  };

  std::optional<MatchResult> cached;
  std::string cached_tag;
  std::size_t cached_aux_index = 0;  // which aux run produced `cached`

  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& segment = segments[i];
    SegmentOutput output;
    output.segment_index = i;

    try {
      const bool need_aux = mode == RunMode::PerUtterancePostprocess || !cached ||
                            cached_tag != segment.speaker_tag;
      if (need_aux) {
        StageInterval interval;
        interval.begin_s = now_s();
        const std::size_t this_aux_index = result.stats.aux_runs++;
        MatchResult match = matcher.match(segment.audio, target_language);
        interval.end_s = now_s();
        result.stats.aux_seconds += interval.end_s - interval.begin_s;
        output.aux_interval = interval;
        cached = std::move(match);
        cached_tag = segment.speaker_tag;
        cached_aux_index = this_aux_index;
      }
      output.match = *cached;
      output.match_run_index = cached_aux_index;

      output.tts_interval.begin_s = now_s();
      ++result.stats.tts_runs;
      output.audio = tts.synthesize(cached->preset, segment.text, target_language);
      output.tts_interval.end_s = now_s();
      result.stats.tts_seconds += output.tts_interval.end_s - output.tts_interval.begin_s;
    } catch (const Error&) {
      if (!options.keep_going) {
        throw;
      }
      ++result.stats.failed_segments;
      continue;
    }

    result.outputs.push_back(std::move(output));
  }

  result.stats.total_seconds = now_s();
  return result;
}

// --- stream manifests and run artifacts --------------------------------------

inline constexpr const char* kStreamManifestHeader = "speaker_tag,audio_path,text";

/// Reads a `speaker_tag,audio_path,text` CSV; audio paths resolve relative
/// to the manifest's directory.
inline std::vector<Segment> read_stream_manifest(const std::filesystem::path& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows[0] != csv::parse_row(kStreamManifestHeader)) {
    throw ManifestError("'" + path.string() + "': expected header '" +
                        std::string(kStreamManifestHeader) + "'");
  }
  const std::filesystem::path base =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::vector<Segment> segments;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) {
      throw ManifestError("'" + path.string() + "' row " + std::to_string(r) +
                          ": expected 3 fields, got " + std::to_string(row.size()));
    }
    Segment segment;
    segment.speaker_tag = row[0];
    std::filesystem::path audio(row[1]);
    segment.audio = read_wav(audio.is_absolute() ? audio : base / audio);
    segment.text = row[2];
    if (segment.text.empty()) {
      throw ManifestError("'" + path.string() + "' row " + std::to_string(r) + ": text is empty");
    }
    segments.push_back(std::move(segment));
  }
  return segments;
}

inline nlohmann::json to_json(const RunStats& stats) {
  return nlohmann::json{{"mode", to_string(stats.mode)},
                        {"segments", stats.segments},
                        {"speaker_changes", stats.speaker_changes},
                        {"aux_runs", stats.aux_runs},
                        {"tts_runs", stats.tts_runs},
                        {"failed_segments", stats.failed_segments},
                        {"aux_seconds", stats.aux_seconds},
                        {"tts_seconds", stats.tts_seconds},
                        {"total_seconds", stats.total_seconds}};
}

}  // namespace pvm
