#pragma once

// Shared fixtures for the test suites: signal generators, rigged models,
// synthetic preset libraries, and a scratch-directory guard.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pvm/audio.hpp"
#include "pvm/gemo.hpp"
#include "pvm/preset_library.hpp"
#include "pvm/softmax.hpp"
#include "pvm/types.hpp"
#include "pvm/wav.hpp"

namespace pvmtest {

inline pvm::AudioClip make_sine(double freq_hz, double seconds, int rate = 22050,
                                double amplitude = 1.0) {
  pvm::AudioClip clip;
  clip.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] =
        amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate);
  }
  return clip;
}

inline pvm::AudioClip make_noise(double seconds, std::uint64_t seed, int rate = 22050,
                                 double amplitude = 0.5) {
  pvm::AudioClip clip;
  clip.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  clip.samples.resize(n);
  std::mt19937_64 rng(seed);
  for (auto& s : clip.samples) {
    const double u = static_cast<double>(rng()) / static_cast<double>(std::mt19937_64::max());
    s = amplitude * (2.0 * u - 1.0);
  }
  return clip;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("pvm_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Model that always predicts class `winner` regardless of input.
inline pvm::SoftmaxModel make_constant_model(const std::vector<std::string>& labels, int winner,
                                             int feature_dim) {
  pvm::SoftmaxModel model;
  model.class_labels = labels;
  model.feature_dim = feature_dim;
  model.weights.assign(labels.size() * static_cast<std::size_t>(feature_dim), 0.0);
  model.bias.assign(labels.size(), 0.0);
  model.bias[static_cast<std::size_t>(winner)] = 25.0;
  model.norm_mean.assign(static_cast<std::size_t>(feature_dim), 0.0);
  model.norm_std.assign(static_cast<std::size_t>(feature_dim), 1.0);
  return model;
}

/// Rigged classifier set that always yields `code`, with feature dimension
/// matching the default analysis config (so it accepts real audio).
inline pvm::GemoModelSet make_rigged_models(const pvm::FeatureCode& code, int feature_dim = 258) {
  pvm::GemoModelSet models;
  models.gender = make_constant_model(pvm::gender_label_names(),
                                      code.gender == pvm::Gender::Male ? 0 : 1, feature_dim);
  int emotion_index = 0;
  const auto names = pvm::emotion_label_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == pvm::to_string(code.emotion)) emotion_index = static_cast<int>(i);
  }
  models.male_emotion = make_constant_model(names, emotion_index, feature_dim);
  models.female_emotion = make_constant_model(names, emotion_index, feature_dim);
  return models;
}

inline pvm::PresetVoiceEntry make_entry(const std::string& id, const std::string& language,
                                        pvm::FeatureCode code, const std::string& audio_path = "",
                                        double quality = 3.0, bool revoked = false) {
  pvm::PresetVoiceEntry entry;
  entry.id = id;
  entry.language = language;
  entry.code = code;
  entry.audio_path = audio_path.empty() ? id + ".wav" : audio_path;
  entry.consent.speaker_id = "spk_" + id;
  entry.consent.consent_date = "2024-01-15";
  entry.consent.scope = "s2st research";
  entry.consent.revoked = revoked;
  entry.quality_score = quality;
  return entry;
}

/// Library covering all 10 cells for each requested language. When
/// `audio_dir` is given, a real one-second WAV is written per entry.
inline pvm::PresetLibrary make_full_library(const std::vector<std::string>& languages,
                                            const std::filesystem::path& audio_dir = {}) {
  pvm::PresetLibrary lib;
  for (const std::string& lang : languages) {
    for (pvm::Gender g : pvm::kGenders) {
      for (pvm::Emotion e : pvm::kEmotions) {
        const pvm::FeatureCode code{g, e};
        const std::string id = lang + "_" + pvm::detail::ascii_lower(code.str());
        std::string audio_path = id + ".wav";
        if (!audio_dir.empty()) {
          const auto full = audio_dir / audio_path;
          pvm::write_wav(full, make_sine(220.0, 0.05));
          audio_path = full.string();
        }
        lib.add_entry(make_entry(id, lang, code, audio_path));
      }
    }
  }
  return lib;
}

}  // namespace pvmtest
