#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pvm/dsp.hpp"
#include "pvm/errors.hpp"

namespace pvm {

/// Fixed-length spectral summary: per-band mean and population standard
/// deviation of log(1 + energy) over time, then the same two statistics over
/// all cells. Length is 2 * mel_bands + 2.
struct FeatureVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

inline std::size_t feature_length(const StftConfig& config) {
  return 2 * static_cast<std::size_t>(config.mel_bands) + 2;
}

inline FeatureVector extract_features(const MelSpectrogram& mel) {
  if (mel.empty()) throw InvalidArgument("extract_features: empty spectrogram");

  const std::size_t frames = mel.frames;
  const std::size_t bands = mel.bands;
  FeatureVector fv;
  fv.values.resize(2 * bands + 2);

  double overall_sum = 0.0;
  std::vector<double> band_mean(bands, 0.0);
  for (std::size_t b = 0; b < bands; ++b) {
    double sum = 0.0;
    for (std::size_t f = 0; f < frames; ++f) sum += std::log1p(mel.at(f, b));
    band_mean[b] = sum / static_cast<double>(frames);
    overall_sum += sum;
  }
  const double overall_mean = overall_sum / static_cast<double>(frames * bands);

  double overall_sq = 0.0;
  for (std::size_t b = 0; b < bands; ++b) {
    double sq = 0.0;
    for (std::size_t f = 0; f < frames; ++f) {
      const double d = std::log1p(mel.at(f, b)) - band_mean[b];
      sq += d * d;
      const double g = std::log1p(mel.at(f, b)) - overall_mean;
      overall_sq += g * g;
    }
    fv.values[b] = band_mean[b];
    fv.values[bands + b] = std::sqrt(sq / static_cast<double>(frames));
  }
  fv.values[2 * bands] = overall_mean;
  fv.values[2 * bands + 1] = std::sqrt(overall_sq / static_cast<double>(frames * bands));
  return fv;
}

}  // namespace pvm
