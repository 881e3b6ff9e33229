#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "pvm/audio.hpp"
#include "pvm/errors.hpp"

namespace pvm {

enum class Window {
  Hann,
  Rect,  // analysis/testing only; production configs use Hann
};

/// Short-time analysis parameters. Clips are resampled to target_rate before
/// framing; frames are taken from a reflect-padded signal (fft_size/2 on
/// each side) so frame count is 1 + floor(len / hop) for len samples.
struct StftConfig {
  int fft_size = 2048;
  int hop = 512;
  Window window = Window::Hann;
  int mel_bands = 128;
  double fmin = 0.0;
  double fmax = 11025.0;
  int target_rate = 22050;

  void validate() const {
    if (fft_size < 2) throw InvalidArgument("StftConfig: fft_size must be >= 2");
    if (hop <= 0 || hop > fft_size) throw InvalidArgument("StftConfig: need 0 < hop <= fft_size");
    if (mel_bands < 1) throw InvalidArgument("StftConfig: mel_bands must be >= 1");
    if (target_rate <= 0) throw InvalidArgument("StftConfig: target_rate must be positive");
    if (!(fmin >= 0.0 && fmin < fmax && fmax <= target_rate / 2.0)) {
      throw InvalidArgument("StftConfig: need 0 <= fmin < fmax <= target_rate/2");
    }
  }
};

/// Time x mel-band matrix of nonnegative energies.
struct MelSpectrogram {
  std::vector<double> values;  // row-major [frames x mel_bands]
  std::size_t frames = 0;
  std::size_t bands = 0;
  StftConfig config;

  double at(std::size_t frame, std::size_t band) const { return values[frame * bands + band]; }
  bool empty() const { return values.empty(); }
};

namespace dsp {

/// Forward DFT. Radix-2 in-place when n is a power of two, direct
/// evaluation otherwise (kept for odd sizes in tests).
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x) {
  const std::size_t n = x.size();
  if (n <= 1) return x;

  if ((n & (n - 1)) != 0) {
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * j % n) / n;
        acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      out[k] = acc;
    }
    return out;
  }

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w{1.0, 0.0};
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = x[i + j];
        const std::complex<double> v = x[i + j + len / 2] * w;
        x[i + j] = u + v;
        x[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  return x;
}

inline std::vector<double> window_coefficients(Window w, int n) {
  std::vector<double> coeffs(static_cast<std::size_t>(n), 1.0);
  if (w == Window::Hann) {
    for (int k = 0; k < n; ++k) {
      coeffs[static_cast<std::size_t>(k)] =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / static_cast<double>(n));
    }
  }
  return coeffs;
}

inline std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (static_cast<std::ptrdiff_t>(n) - 1);
  std::ptrdiff_t j = ((i % period) + period) % period;
  if (j >= static_cast<std::ptrdiff_t>(n)) j = period - j;
  return static_cast<std::size_t>(j);
}

/// Slaney-style mel scale: linear below 1 kHz, logarithmic above.
inline double hz_to_mel(double hz) {
  constexpr double f_sp = 200.0 / 3.0;
  constexpr double min_log_hz = 1000.0;
  constexpr double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (hz < min_log_hz) return hz / f_sp;
  return min_log_mel + std::log(hz / min_log_hz) / logstep;
}

inline double mel_to_hz(double mel) {
  constexpr double f_sp = 200.0 / 3.0;
  constexpr double min_log_hz = 1000.0;
  constexpr double min_log_mel = min_log_hz / f_sp;
  const double logstep = std::log(6.4) / 27.0;
  if (mel < min_log_mel) return mel * f_sp;
  return min_log_hz * std::exp(logstep * (mel - min_log_mel));
}

/// Triangular, area-normalized filterbank over the one-sided spectrum.
/// Returns row-major [mel_bands x (fft_size/2 + 1)] weights.
inline std::vector<double> mel_filterbank(const StftConfig& config) {
  config.validate();
  const std::size_t n_bins = static_cast<std::size_t>(config.fft_size) / 2 + 1;
  const std::size_t n_mels = static_cast<std::size_t>(config.mel_bands);

  std::vector<double> mel_pts(n_mels + 2);
  const double mel_lo = hz_to_mel(config.fmin);
  const double mel_hi = hz_to_mel(config.fmax);
  for (std::size_t m = 0; m < mel_pts.size(); ++m) {
    mel_pts[m] = mel_lo + (mel_hi - mel_lo) * static_cast<double>(m) / (n_mels + 1);
  }
  std::vector<double> hz_pts(mel_pts.size());
  for (std::size_t m = 0; m < mel_pts.size(); ++m) hz_pts[m] = mel_to_hz(mel_pts[m]);

  std::vector<double> weights(n_mels * n_bins, 0.0);
  const double bin_hz = static_cast<double>(config.target_rate) / config.fft_size;
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lower = hz_pts[m];
    const double center = hz_pts[m + 1];
    const double upper = hz_pts[m + 2];
    const double norm = 2.0 / (upper - lower);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > lower && f < upper) {
        w = f <= center ? (f - lower) / (center - lower) : (upper - f) / (upper - center);
      }
      weights[m * n_bins + k] = w * norm;
    }
  }
  return weights;
}

}  // namespace dsp

/// Windowed analysis frames of the reflect-padded, resampled signal.
/// Frame f covers padded samples [f*hop, f*hop + fft_size).
inline std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                                     const StftConfig& config) {
  detail::require_analyzable(clip, "frame_signal");
  config.validate();
  const AudioClip at_rate =
      clip.sample_rate == config.target_rate ? clip : resample(clip, config.target_rate);

  const std::size_t n = at_rate.samples.size();
  const std::ptrdiff_t pad = config.fft_size / 2;
  const std::size_t padded = n + 2 * static_cast<std::size_t>(pad);
  const std::size_t frames =
      1 + (padded - static_cast<std::size_t>(config.fft_size)) / static_cast<std::size_t>(config.hop);

  const std::vector<double> window = dsp::window_coefficients(config.window, config.fft_size);
  std::vector<std::vector<double>> out(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    auto& frame = out[f];
    frame.resize(static_cast<std::size_t>(config.fft_size));
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(f) * config.hop - pad;
    for (int k = 0; k < config.fft_size; ++k) {
      const double s = at_rate.samples[dsp::reflect_index(start + k, n)];
      frame[static_cast<std::size_t>(k)] = s * window[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

/// Complex STFT: one full FFT spectrum per analysis frame.
struct StftFrames {
  std::vector<std::vector<std::complex<double>>> frames;
  StftConfig config;

  std::size_t frame_count() const { return frames.size(); }
};

inline StftFrames stft(const AudioClip& clip, const StftConfig& config) {
  StftFrames out;
  out.config = config;
  for (auto& frame : frame_signal(clip, config)) {
    std::vector<std::complex<double>> buf(frame.size());
    for (std::size_t k = 0; k < frame.size(); ++k) buf[k] = {frame[k], 0.0};
    out.frames.push_back(dsp::fft(std::move(buf)));
  }
  return out;
}

/// Power spectrogram projected through the mel filterbank.
inline MelSpectrogram mel_spectrogram(const AudioClip& clip, const StftConfig& config) {
  const StftFrames spectra = stft(clip, config);
  const std::vector<double> fb = dsp::mel_filterbank(config);
  const std::size_t n_bins = static_cast<std::size_t>(config.fft_size) / 2 + 1;
  const std::size_t n_mels = static_cast<std::size_t>(config.mel_bands);

  MelSpectrogram mel;
  mel.config = config;
  mel.frames = spectra.frame_count();
  mel.bands = n_mels;
  mel.values.resize(mel.frames * n_mels);

  std::vector<double> power(n_bins);
  for (std::size_t f = 0; f < mel.frames; ++f) {
    for (std::size_t k = 0; k < n_bins; ++k) power[k] = std::norm(spectra.frames[f][k]);
    for (std::size_t m = 0; m < n_mels; ++m) {
      double acc = 0.0;
      const double* row = fb.data() + m * n_bins;
      for (std::size_t k = 0; k < n_bins; ++k) acc += row[k] * power[k];
      mel.values[f * n_mels + m] = acc;
    }
  }
  return mel;
}

}  // namespace pvm
