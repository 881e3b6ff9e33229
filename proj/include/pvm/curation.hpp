#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pvm/audio.hpp"
#include "pvm/csv.hpp"
#include "pvm/dsp.hpp"
#include "pvm/errors.hpp"
#include "pvm/image.hpp"
#include "pvm/pitch.hpp"
#include "pvm/types.hpp"
#include "pvm/wav.hpp"

namespace pvm {

enum class Intensity { Normal, Strong, Unspecified };

inline std::string to_string(Intensity i) {
  switch (i) {
    case Intensity::Normal: return "Normal";
    case Intensity::Strong: return "Strong";
    case Intensity::Unspecified: return "Unspecified";
  }
  return "Unspecified";
}

inline Intensity parse_intensity(std::string_view text) {
  const std::string s = detail::ascii_lower(text);
  if (s == "normal") return Intensity::Normal;
  if (s == "strong") return Intensity::Strong;
  if (s == "unspecified" || s.empty()) return Intensity::Unspecified;
  throw InvalidArgument("unknown intensity '" + std::string(text) + "'");
}

struct LabeledSample {
  std::filesystem::path path;
  std::string language;
  Gender gender = Gender::Male;
  Emotion emotion = Emotion::Neutral;
  Intensity intensity = Intensity::Unspecified;
  std::string corpus;
};

enum class CorpusLayout { RavdessStyle, FlatManifest };

inline CorpusLayout parse_corpus_layout(std::string_view text) {
  const std::string s = detail::ascii_lower(text);
  if (s == "ravdess-style") return CorpusLayout::RavdessStyle;
  if (s == "flat-manifest") return CorpusLayout::FlatManifest;
  throw InvalidArgument("unknown corpus layout '" + std::string(text) + "'");
}

struct ScanResult {
  std::vector<LabeledSample> samples;
  std::size_t rejected_label = 0;
  std::size_t scanned = 0;
};

/// Pitch and loudness acceptance bands. Defaults follow the curation recipe
/// this layout was built for: 75-3000 Hz and [-23, -20] dBFS.
struct FilterPolicy {
  double pitch_min = 75.0;
  double pitch_max = 3000.0;
  double loudness_min = -23.0;
  double loudness_max = -20.0;
  bool require_strong_intensity = false;

  void validate() const {
    if (!(pitch_min > 0.0 && pitch_min < pitch_max)) {
      throw InvalidArgument("FilterPolicy: need 0 < pitch_min < pitch_max");
    }
    if (!(loudness_min < loudness_max)) {
      throw InvalidArgument("FilterPolicy: need loudness_min < loudness_max");
    }
  }
};

struct FilterDecision {
  enum class Reason { None, Pitch, Loudness };

  bool keep = false;
  Reason reason = Reason::None;
  std::optional<double> pitch_hz;  // median voiced F0 when one was found
  double rms_dbfs = 0.0;
};

inline std::string to_string(FilterDecision::Reason r) {
  switch (r) {
    case FilterDecision::Reason::None: return "";
    case FilterDecision::Reason::Pitch: return "pitch";
    case FilterDecision::Reason::Loudness: return "loudness";
  }
  return "";
}

namespace detail {

inline std::optional<LabeledSample> parse_ravdess_name(const std::filesystem::path& path) {
  // Names are seven dash-separated two-digit codes:
  // modality-channel-emotion-intensity-statement-repetition-actor.
  const std::string stem = path.stem().string();
  std::vector<int> fields;
  std::stringstream ss(stem);
  std::string part;
  while (std::getline(ss, part, '-')) {
    if (part.size() != 2 || !std::isdigit(static_cast<unsigned char>(part[0])) ||
        !std::isdigit(static_cast<unsigned char>(part[1]))) {
      return std::nullopt;
    }
    fields.push_back((part[0] - '0') * 10 + (part[1] - '0'));
  }
  if (fields.size() != 7) return std::nullopt;

  static const std::map<int, Emotion> emotion_codes = {
      {1, Emotion::Neutral}, {2, Emotion::Neutral},  // calm folds into neutral
      {3, Emotion::Happy},   {4, Emotion::Sad},
      {5, Emotion::Angry},   {7, Emotion::Disgust},
  };
  const auto emotion_it = emotion_codes.find(fields[2]);
  if (emotion_it == emotion_codes.end()) return std::nullopt;  // outside the 5-class set
  if (fields[3] != 1 && fields[3] != 2) return std::nullopt;
  if (fields[6] < 1) return std::nullopt;

  LabeledSample sample;
  sample.path = path;
  sample.language = "en";
  sample.corpus = "ravdess";
  sample.emotion = emotion_it->second;
  sample.intensity = fields[3] == 2 ? Intensity::Strong : Intensity::Normal;
  sample.gender = fields[6] % 2 == 1 ? Gender::Male : Gender::Female;
  return sample;
}

}  // namespace detail

/// Walks a corpus and assigns labels. Every audio file either becomes a
/// LabeledSample or is counted under rejected_label. Output order is
/// lexicographic by path, so scans are deterministic.
inline ScanResult scan_corpus(const std::filesystem::path& root, CorpusLayout layout) {
  if (!std::filesystem::exists(root)) {
    throw InvalidArgument("scan_corpus: root '" + root.string() + "' does not exist");
  }
  ScanResult result;

  if (layout == CorpusLayout::RavdessStyle) {
    std::vector<std::filesystem::path> files;
    for (const auto& it : std::filesystem::recursive_directory_iterator(root)) {
      if (it.is_regular_file() && detail::ascii_lower(it.path().extension().string()) == ".wav") {
        files.push_back(it.path());
      }
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.string() < b.string(); });
    result.scanned = files.size();
    for (const auto& path : files) {
      if (auto sample = detail::parse_ravdess_name(path)) {
        result.samples.push_back(std::move(*sample));
      } else {
        ++result.rejected_label;
      }
    }
    return result;
  }

  // flat-manifest: root/manifest.csv with header path,corpus,language,gender,emotion,intensity
  const std::filesystem::path manifest = root / "manifest.csv";
  const auto rows = csv::read_file(manifest);
  if (rows.empty()) return result;
  std::vector<LabeledSample> samples;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++result.scanned;
    if (row.size() != 6) {
      ++result.rejected_label;
      continue;
    }
    try {
      LabeledSample sample;
      sample.path = root / row[0];
      sample.corpus = row[1];
      sample.language = row[2];
      sample.gender = parse_gender(row[3]);
      sample.emotion = parse_emotion(row[4]);
      sample.intensity = parse_intensity(row[5]);
      samples.push_back(std::move(sample));
    } catch (const InvalidArgument&) {
      ++result.rejected_label;
    }
  }
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.path.string() < b.path.string(); });
  result.samples = std::move(samples);
  return result;
}

/// Pure keep/reject predicate. Pitch is checked first: a file is rejected
/// for pitch when no voiced F0 is found inside [pitch_min, pitch_max] (the
/// estimator searches exactly that band) or the clip is too short to frame.
inline FilterDecision filter_sample(const AudioClip& clip, const FilterPolicy& policy) {
  policy.validate();
  FilterDecision decision;
  decision.rms_dbfs = rms_dbfs(clip).value;

  PitchEstimate pitch;
  bool pitch_ok = false;
  try {
    const double fmax = std::min(policy.pitch_max, clip.sample_rate / 2.0 - 1.0);
    pitch = estimate_pitch(clip, policy.pitch_min, fmax);
    if (pitch.voiced()) {
      decision.pitch_hz = pitch.median_f0;
      pitch_ok = *pitch.median_f0 >= policy.pitch_min && *pitch.median_f0 <= policy.pitch_max;
    }
  } catch (const InvalidArgument&) {
    pitch_ok = false;  // too short or band collapsed at this sample rate
  }
  if (!pitch_ok) {
    decision.reason = FilterDecision::Reason::Pitch;
    return decision;
  }

  if (decision.rms_dbfs < policy.loudness_min || decision.rms_dbfs > policy.loudness_max) {
    decision.reason = FilterDecision::Reason::Loudness;
    return decision;
  }

  decision.keep = true;
  return decision;
}

struct CurationReport {
  std::size_t scanned = 0;
  std::size_t kept = 0;
  std::size_t rejected_pitch = 0;
  std::size_t rejected_loudness = 0;
  std::size_t rejected_label = 0;
  std::map<std::string, std::size_t> kept_per_class;  // key: canonical code string
};

inline constexpr const char* kCurationManifestHeader =
    "path,corpus,language,gender,emotion,intensity,pitch_hz,rms_dbfs,decision,reason";

/// Creates out/{male,female}/{happy,angry,sad,disgust,neutral}/ (always, even
/// when nothing survives), copies kept files in, and writes manifest.csv
/// recording the decision for every input sample. Intensity rejections and
/// unreadable audio count under rejected_label.
inline CurationReport build_gender_dependent_layout(const std::vector<LabeledSample>& samples,
                                                    const std::filesystem::path& out_dir,
                                                    const FilterPolicy& policy) {
  policy.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw InvalidArgument("build_gender_dependent_layout: cannot create '" + out_dir.string() + "'");
  }
  for (Gender g : kGenders) {
    for (Emotion e : kEmotions) {
      std::filesystem::create_directories(out_dir / dir_name(g) / dir_name(e));
    }
  }

  CurationReport report;
  report.scanned = samples.size();
  std::ostringstream manifest;
  manifest << kCurationManifestHeader << "\n";
  std::set<std::string> used_names;

  auto fmt = [](double v, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
  };

  for (const LabeledSample& sample : samples) {
    std::vector<std::string> row = {sample.path.string(),       sample.corpus,
                                    sample.language,            to_string(sample.gender),
                                    to_string(sample.emotion),  to_string(sample.intensity)};

    if (policy.require_strong_intensity && sample.intensity != Intensity::Strong) {
      ++report.rejected_label;
      row.insert(row.end(), {"", "", "reject", "intensity"});
      manifest << csv::format_row(row);
      continue;
    }

    AudioClip clip;
    try {
      clip = read_wav(sample.path);
      if (clip.samples.empty()) throw WavError("empty audio");
    } catch (const Error&) {
      ++report.rejected_label;
      row.insert(row.end(), {"", "", "reject", "corrupt"});
      manifest << csv::format_row(row);
      continue;
    }

    const FilterDecision decision = filter_sample(clip, policy);
    const std::string pitch_text = decision.pitch_hz ? fmt(*decision.pitch_hz, 3) : "";
    const std::string rms_text = std::isfinite(decision.rms_dbfs) ? fmt(decision.rms_dbfs, 4) : "-inf";

    if (!decision.keep) {
      if (decision.reason == FilterDecision::Reason::Pitch) ++report.rejected_pitch;
      else ++report.rejected_loudness;
      row.insert(row.end(), {pitch_text, rms_text, "reject", to_string(decision.reason)});
      manifest << csv::format_row(row);
      continue;
    }

    const std::filesystem::path cell = out_dir / dir_name(sample.gender) / dir_name(sample.emotion);
    std::string name = sample.path.filename().string();
    const std::string cell_tag = dir_name(sample.gender) + "/" + dir_name(sample.emotion);
    int suffix = 2;
    while (used_names.count(cell_tag + "/" + name)) {
      const std::filesystem::path p(sample.path.filename());
      name = p.stem().string() + "_" + std::to_string(suffix++) + p.extension().string();
    }
    used_names.insert(cell_tag + "/" + name);
    std::filesystem::copy_file(sample.path, cell / name,
                               std::filesystem::copy_options::overwrite_existing);

    ++report.kept;
    ++report.kept_per_class[FeatureCode{sample.gender, sample.emotion}.str()];
    row.insert(row.end(), {pitch_text, rms_text, "keep", ""});
    manifest << csv::format_row(row);
  }

  std::ofstream out(out_dir / "manifest.csv", std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write manifest under '" + out_dir.string() + "'");
  out << manifest.str();
  return report;
}

struct ExportResult {
  std::size_t written = 0;
  std::size_t skipped = 0;
};

/// Writes one PNG per kept audio file, mirroring the gender-emotion
/// directory structure (each image lands beside its WAV). Reruns overwrite.
/// Unreadable audio files are skipped and counted.
inline ExportResult export_spectrograms(const std::filesystem::path& layout_dir,
                                        const StftConfig& config) {
  config.validate();
  ExportResult result;
  for (Gender g : kGenders) {
    for (Emotion e : kEmotions) {
      const std::filesystem::path cell = layout_dir / dir_name(g) / dir_name(e);
      if (!std::filesystem::is_directory(cell)) continue;
      std::vector<std::filesystem::path> files;
      for (const auto& it : std::filesystem::directory_iterator(cell)) {
        if (it.is_regular_file() && detail::ascii_lower(it.path().extension().string()) == ".wav") {
          files.push_back(it.path());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& wav : files) {
        try {
          const AudioClip clip = read_wav(wav);
          if (clip.samples.empty()) throw WavError("empty audio");
          const ImageBuffer image = spectrogram_to_image(mel_spectrogram(clip, config));
          std::filesystem::path png = wav;
          png.replace_extension(".png");
          write_png(png, image);
          ++result.written;
        } catch (const Error&) {
          ++result.skipped;
        }
      }
    }
  }
  return result;
}

}  // namespace pvm
