#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "pvm/image.hpp"

using namespace pvm;
using pvmtest::TempDir;

namespace {

MelSpectrogram make_mel(std::size_t frames, std::size_t bands, const std::vector<double>& values) {
  MelSpectrogram mel;
  mel.frames = frames;
  mel.bands = bands;
  mel.values = values;
  return mel;
}

}  // namespace

TEST_CASE("uniform spectrogram maps to a uniform image", "[image]") {
  const MelSpectrogram mel = make_mel(3, 4, std::vector<double>(12, 5.0));
  const ImageBuffer image = spectrogram_to_image(mel);
  REQUIRE(image.width == 3);
  REQUIRE(image.height == 4);
  for (std::uint8_t p : image.pixels) REQUIRE(p == image.pixels[0]);
}

TEST_CASE("min and max cells hit the 0 and 255 endpoints", "[image]") {
  const MelSpectrogram mel = make_mel(1, 2, {0.0, 9.0});
  const ImageBuffer image = spectrogram_to_image(mel);
  // band 1 renders on the top row, band 0 on the bottom
  REQUIRE(image.at(0, 0) == 255);
  REQUIRE(image.at(1, 0) == 0);
}

TEST_CASE("png encode/decode reproduces pixels exactly", "[image][property]") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 4; ++trial) {
    ImageBuffer image;
    image.width = 17 + trial * 13;
    image.height = 9 + trial * 5;
    image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
    for (auto& p : image.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);

    const ImageBuffer back = png_decode(png_encode(image));
    REQUIRE(back.width == image.width);
    REQUIRE(back.height == image.height);
    REQUIRE(back.pixels == image.pixels);
  }
}

TEST_CASE("spectrogram image survives a png round trip", "[image]") {
  const AudioClip clip = pvmtest::make_sine(440.0, 0.3);
  const ImageBuffer image = spectrogram_to_image(mel_spectrogram(clip, {}));

  TempDir dir("png");
  write_png(dir.path() / "spec.png", image);
  const ImageBuffer back = read_png(dir.path() / "spec.png");
  REQUIRE(back.pixels == image.pixels);
}

TEST_CASE("png decoder rejects non-png data", "[image]") {
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  REQUIRE_THROWS_AS(png_decode(junk), PngError);
}

TEST_CASE("empty spectrogram cannot be rendered", "[image]") {
  MelSpectrogram mel;
  REQUIRE_THROWS_AS(spectrogram_to_image(mel), InvalidArgument);
}
