#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pvm/audio.hpp"
#include "pvm/errors.hpp"

namespace pvm {

enum class WavFormat { Pcm16, Float32 };

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

/// Reads a RIFF/WAVE file. Supported encodings: PCM 16-bit and IEEE float
/// 32-bit. Multi-channel input is downmixed to mono by averaging.
inline AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw WavError("'" + path.string() + "' is not a RIFF/WAVE file");
  }

  std::uint16_t audio_format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  std::size_t data_off = 0, data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_len = detail::get_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_len > bytes.size()) throw WavError("'" + path.string() + "' is truncated");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw WavError("'" + path.string() + "' has a malformed fmt chunk");
      audio_format = detail::get_u16(bytes.data() + body);
      channels = detail::get_u16(bytes.data() + body + 2);
      sample_rate = detail::get_u32(bytes.data() + body + 4);
      bits = detail::get_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) throw WavError("'" + path.string() + "' lacks fmt/data chunks");
  if (channels == 0 || sample_rate == 0) throw WavError("'" + path.string() + "' has invalid format fields");

  const bool pcm16 = audio_format == 1 && bits == 16;
  const bool f32 = audio_format == 3 && bits == 32;
  if (!pcm16 && !f32) {
    throw WavError("'" + path.string() + "': unsupported encoding (format " +
                   std::to_string(audio_format) + ", " + std::to_string(bits) + " bit)");
  }

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = data_len / frame_bytes;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(sample_rate);
  clip.source = path.string();
  clip.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = bytes.data() + data_off + f * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        const std::int16_t v = static_cast<std::int16_t>(detail::get_u16(p));
        acc += v / 32768.0;
      } else {
        float v;
        std::uint32_t raw = detail::get_u32(p);
        std::memcpy(&v, &raw, 4);
        acc += v;
      }
    }
    clip.samples[f] = std::clamp(acc / channels, -1.0, 1.0);
  }
  return clip;
}

/// Writes a mono WAV file in the requested encoding.
inline void write_wav(const std::filesystem::path& path, const AudioClip& clip,
                      WavFormat format = WavFormat::Pcm16) {
  detail::require_analyzable(clip, "write_wav");
  const std::size_t n = clip.samples.size();
  const std::uint16_t bits = format == WavFormat::Pcm16 ? 16 : 32;
  const std::uint32_t data_len = static_cast<std::uint32_t>(n * bits / 8);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  detail::put_u32(out, 16);
  detail::put_u16(out, format == WavFormat::Pcm16 ? 1 : 3);
  detail::put_u16(out, 1);  // mono
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  detail::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * bits / 8);
  detail::put_u16(out, bits / 8);
  detail::put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_u32(out, data_len);

  if (format == WavFormat::Pcm16) {
    for (double s : clip.samples) {
      const long raw = std::lround(std::clamp(s, -1.0, 1.0) * 32768.0);
      const auto v = static_cast<std::int16_t>(std::clamp<long>(raw, -32768, 32767));
      detail::put_u16(out, static_cast<std::uint16_t>(v));
    }
  } else {
    for (double s : clip.samples) {
      const float v = static_cast<float>(s);
      std::uint32_t raw;
      std::memcpy(&raw, &v, 4);
      detail::put_u32(out, raw);
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw WavError("cannot write '" + path.string() + "'");
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw WavError("short write to '" + path.string() + "'");
}

}  // namespace pvm
