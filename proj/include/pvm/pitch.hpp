#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "pvm/audio.hpp"
#include "pvm/errors.hpp"

namespace pvm {

/// File-level fundamental frequency estimate: median F0 over voiced frames,
/// or unvoiced when fewer than 10% of frames carry a periodicity match.
struct PitchEstimate {
  std::optional<double> median_f0;
  double voiced_fraction = 0.0;

  bool voiced() const { return median_f0.has_value(); }
};

namespace detail {

/// YIN cumulative mean normalized difference for one frame; returns the
/// refined lag of the first dip under `threshold`, or nothing (unvoiced).
inline std::optional<double> yin_frame_lag(const double* x, int frame_len, int lag_min,
                                           int lag_max, double threshold) {
  std::vector<double> diff(static_cast<std::size_t>(lag_max) + 1, 0.0);
  for (int lag = 1; lag <= lag_max; ++lag) {
    double acc = 0.0;
    const int support = frame_len - lag;
    for (int j = 0; j < support; ++j) {
      const double d = x[j] - x[j + lag];
      acc += d * d;
    }
    diff[static_cast<std::size_t>(lag)] = acc;
  }

  std::vector<double> cmnd(diff.size(), 1.0);
  double running = 0.0;
  for (int lag = 1; lag <= lag_max; ++lag) {
    running += diff[static_cast<std::size_t>(lag)];
    cmnd[static_cast<std::size_t>(lag)] =
        running > 0.0 ? diff[static_cast<std::size_t>(lag)] * lag / running : 1.0;
  }

  int best = -1;
  for (int lag = lag_min; lag <= lag_max; ++lag) {
    if (cmnd[static_cast<std::size_t>(lag)] < threshold) {
      best = lag;
      while (best + 1 <= lag_max &&
             cmnd[static_cast<std::size_t>(best + 1)] < cmnd[static_cast<std::size_t>(best)]) {
        ++best;
      }
      break;
    }
  }
  if (best < 0) return std::nullopt;

  // parabolic refinement around the dip
  double refined = static_cast<double>(best);
  if (best > 1 && best < lag_max) {
    const double y0 = cmnd[static_cast<std::size_t>(best - 1)];
    const double y1 = cmnd[static_cast<std::size_t>(best)];
    const double y2 = cmnd[static_cast<std::size_t>(best + 1)];
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) > 1e-30) {
      const double delta = 0.5 * (y0 - y2) / denom;
      if (std::abs(delta) <= 1.0) refined += delta;
    }
  }
  return std::clamp(refined, static_cast<double>(lag_min), static_cast<double>(lag_max));
}

}  // namespace detail

/// Frame-wise YIN estimator (difference-function threshold 0.15, parabolic
/// refinement); the file F0 is the median over voiced frames.
inline PitchEstimate estimate_pitch(const AudioClip& clip, double fmin, double fmax,
                                    int frame_len = 2048, int hop = 512,
                                    double threshold = 0.15) {
  detail::require_analyzable(clip, "estimate_pitch");
  if (!(fmin > 0.0 && fmin < fmax)) throw InvalidArgument("estimate_pitch: need 0 < fmin < fmax");
  if (fmax > clip.sample_rate / 2.0) {
    throw InvalidArgument("estimate_pitch: fmax exceeds the Nyquist frequency");
  }
  const std::size_t n = clip.samples.size();
  if (n < static_cast<std::size_t>(frame_len + hop)) {
    throw InvalidArgument("estimate_pitch: clip shorter than two analysis frames");
  }

  const double rate = clip.sample_rate;
  const int lag_min = std::max(1, static_cast<int>(std::floor(rate / fmax)));
  const int lag_max = std::min(frame_len - 1, static_cast<int>(std::ceil(rate / fmin)));
  if (lag_min >= lag_max) throw InvalidArgument("estimate_pitch: search range collapses at this rate");

  const std::size_t frame_count = 1 + (n - static_cast<std::size_t>(frame_len)) / hop;
  std::vector<double> voiced_f0;
  voiced_f0.reserve(frame_count);
  for (std::size_t f = 0; f < frame_count; ++f) {
    const double* x = clip.samples.data() + f * hop;
    const auto lag = detail::yin_frame_lag(x, frame_len, lag_min, lag_max, threshold);
    if (lag) voiced_f0.push_back(rate / *lag);
  }

  PitchEstimate est;
  est.voiced_fraction = static_cast<double>(voiced_f0.size()) / static_cast<double>(frame_count);
  if (est.voiced_fraction < 0.1) return est;

  std::sort(voiced_f0.begin(), voiced_f0.end());
  const std::size_t mid = voiced_f0.size() / 2;
  double median = voiced_f0.size() % 2 == 1 ? voiced_f0[mid]
                                            : 0.5 * (voiced_f0[mid - 1] + voiced_f0[mid]);
  est.median_f0 = std::clamp(median, fmin, fmax);
  return est;
}

}  // namespace pvm
