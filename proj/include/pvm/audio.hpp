#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pvm/errors.hpp"

namespace pvm {

/// Mono sample buffer. Amplitudes are nominally within [-1, 1]; analysis
/// operations require a non-empty, finite buffer.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source;  // optional provenance label

  double duration_s() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// RMS level relative to digital full scale. value is -inf for silence.
struct Decibels {
  double value = -std::numeric_limits<double>::infinity();

  bool silence() const { return std::isinf(value) && value < 0; }
};

namespace detail {

inline void require_analyzable(const AudioClip& clip, const char* op) {
  if (clip.samples.empty()) throw InvalidArgument(std::string(op) + ": clip is empty");
  if (clip.sample_rate <= 0) throw InvalidArgument(std::string(op) + ": sample rate must be positive");
}

}  // namespace detail

/// Linear-interpolation resampler. Duration is preserved to within one
/// sample period of the target rate.
inline AudioClip resample(const AudioClip& clip, int target_rate) {
  detail::require_analyzable(clip, "resample");
  if (target_rate <= 0) throw InvalidArgument("resample: target rate must be positive");
  if (target_rate == clip.sample_rate) {
    AudioClip out = clip;
    return out;
  }

  const std::size_t n_in = clip.samples.size();
  const double ratio = static_cast<double>(target_rate) / clip.sample_rate;
  const std::size_t n_out =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n_in * ratio)));

  AudioClip out;
  out.sample_rate = target_rate;
  out.source = clip.source;
  out.samples.resize(n_out);
  const double step = static_cast<double>(clip.sample_rate) / target_rate;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = i * step;
    std::size_t i0 = static_cast<std::size_t>(pos);
    if (i0 >= n_in - 1) {
      out.samples[i] = clip.samples[n_in - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(i0);
    out.samples[i] = clip.samples[i0] * (1.0 - frac) + clip.samples[i0 + 1] * frac;
  }
  return out;
}

/// Whole-file RMS loudness in dBFS; an all-zero clip yields the -inf sentinel.
inline Decibels rms_dbfs(const AudioClip& clip) {
  detail::require_analyzable(clip, "rms_dbfs");
  double sum_sq = 0.0;
  for (double s : clip.samples) sum_sq += s * s;
  const double mean_sq = sum_sq / static_cast<double>(clip.samples.size());
  if (mean_sq == 0.0) return Decibels{};
  return Decibels{10.0 * std::log10(mean_sq)};
}

/// Rescales a clip so its RMS loudness lands on `target_dbfs`.
/// Silent clips are returned unchanged (there is nothing to scale).
inline AudioClip with_rms_dbfs(const AudioClip& clip, double target_dbfs) {
  const Decibels current = rms_dbfs(clip);
  if (current.silence()) return clip;
  const double gain = std::pow(10.0, (target_dbfs - current.value) / 20.0);
  AudioClip out = clip;
  for (double& s : out.samples) s *= gain;
  return out;
}

}  // namespace pvm
