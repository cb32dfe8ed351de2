#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "afse/error.hpp"
#include "afse/image_io.hpp"
#include "afse/raster.hpp"
#include "oracles/oracles.hpp"
#include "support/synth.hpp"

using namespace afse;

namespace {

Raster pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return Raster(1, 1, 3, {r, g, b}); }

}  // namespace

TEST(Grayscale, PrimaryAndExtremes) {
  EXPECT_EQ(to_grayscale(pixel(255, 255, 255)).at(0, 0), 255);
  EXPECT_EQ(to_grayscale(pixel(0, 0, 0)).at(0, 0), 0);
  EXPECT_EQ(to_grayscale(pixel(255, 0, 0)).at(0, 0), 76);
}

TEST(Grayscale, MatchesFloatingFormulaOnEveryChannelCombinationSample) {
  std::mt19937 rng(7);
  for (int i = 0; i < 20000; ++i) {
    const auto r = rng() & 0xFF, g = rng() & 0xFF, b = rng() & 0xFF;
    ASSERT_EQ(to_grayscale(pixel(r, g, b)).at(0, 0), oracle::gray_of(r, g, b)) << r << "," << g << "," << b;
  }
}

TEST(Grayscale, IdempotentOnSingleChannel) {
  const Raster g = to_grayscale(synth::noise(17, 9, 3, 3));
  EXPECT_EQ(g.channels(), 1);
  EXPECT_EQ(to_grayscale(g), g);
}

TEST(Hsv, HexconeValues) {
  Hsv red = rgb_to_hsv(255, 0, 0);
  EXPECT_DOUBLE_EQ(red.h, 0.0);
  EXPECT_DOUBLE_EQ(red.s, 1.0);
  EXPECT_DOUBLE_EQ(red.v, 1.0);

  Hsv gray = rgb_to_hsv(128, 128, 128);
  EXPECT_DOUBLE_EQ(gray.h, 0.0);
  EXPECT_DOUBLE_EQ(gray.s, 0.0);
  EXPECT_NEAR(gray.v, 0.502, 5e-4);

  Hsv cyan = rgb_to_hsv(0, 255, 255);
  EXPECT_DOUBLE_EQ(cyan.h, 180.0);
  EXPECT_DOUBLE_EQ(cyan.s, 1.0);
  EXPECT_DOUBLE_EQ(cyan.v, 1.0);
}

TEST(Hsv, RoundTripWithinOneLevel) {
  std::mt19937 rng(11);
  for (int i = 0; i < 5000; ++i) {
    const std::uint8_t r = rng() & 0xFF, g = rng() & 0xFF, b = rng() & 0xFF;
    double rr, gg, bb;
    hsv_to_rgb(rgb_to_hsv(r, g, b), rr, gg, bb);
    ASSERT_NEAR(rr, r / 255.0, 1.0 / 255.0);
    ASSERT_NEAR(gg, g / 255.0, 1.0 / 255.0);
    ASSERT_NEAR(bb, b / 255.0, 1.0 / 255.0);
  }
}

TEST(Hsv, HueStaysInRange) {
  for (const Hsv& px : to_hsv(synth::noise(32, 32, 3, 5))) {
    ASSERT_GE(px.h, 0.0);
    ASSERT_LT(px.h, 360.0);
    ASSERT_GE(px.s, 0.0);
    ASSERT_LE(px.s, 1.0);
  }
}

TEST(ImageIo, PngRoundTripWhite) {
  synth::TempDir dir;
  const Raster white = synth::constant(2, 2, 255, 3);
  save_image(white, dir / "w.png");
  const Raster back = load_image(dir / "w.png");
  EXPECT_EQ(back, white);
}

TEST(ImageIo, GrayPngStaysSingleChannel) {
  synth::TempDir dir;
  const Raster img = synth::noise(13, 7, 1, 2);
  save_image(img, dir / "g.png");
  EXPECT_EQ(load_image(dir / "g.png"), img);
}

TEST(ImageIo, JpegDecodesToRgb) {
  synth::TempDir dir;
  const Raster img = synth::constant(8, 8, 100, 3);
  save_image(img, dir / "c.jpg");
  const Raster back = load_image(dir / "c.jpg");
  ASSERT_EQ(back.channels(), 3);
  ASSERT_EQ(back.width(), 8);
  for (auto v : back.data()) EXPECT_NEAR(v, 100, 2);
}

TEST(ImageIo, MaskThresholdAt127) {
  synth::TempDir dir;
  Raster img(4, 1, 1, {0, 200, 0, 200});
  save_image(img, dir / "m.png");
  const Mask m = load_mask(dir / "m.png");
  EXPECT_FALSE(m.at(0, 0));
  EXPECT_TRUE(m.at(1, 0));
  EXPECT_FALSE(m.at(2, 0));
  EXPECT_TRUE(m.at(3, 0));

  Raster edge(2, 1, 1, {127, 128});
  EXPECT_FALSE(binarize(edge).at(0, 0));
  EXPECT_TRUE(binarize(edge).at(1, 0));
}

TEST(ImageIo, MaskSaveLoadIsFixedPoint) {
  synth::TempDir dir;
  std::mt19937 rng(3);
  const Mask m = synth::random_noise_mask(19, 11, 0.4, rng);
  save_mask(m, dir / "a.png");
  const Mask once = load_mask(dir / "a.png");
  save_mask(once, dir / "b.png");
  EXPECT_EQ(once, m);
  EXPECT_EQ(load_mask(dir / "b.png"), once);
}

TEST(ImageIo, TruncatedFileNamesThePath) {
  synth::TempDir dir;
  save_image(synth::noise(32, 32, 3, 1), dir / "full.png");
  auto bytes = read_file_bytes(dir / "full.png");
  bytes.resize(bytes.size() / 2);
  const auto cut = dir / "cut.png";
  std::ofstream(cut, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  try {
    load_image(cut);
    FAIL() << "expected a decode error";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("cut.png"), std::string::npos) << e.what();
  }
}

TEST(ImageIo, TruncatedJpegIsAnError) {
  synth::TempDir dir;
  save_image(synth::noise(32, 32, 3, 1), dir / "full.jpg");
  auto bytes = read_file_bytes(dir / "full.jpg");
  bytes.resize(bytes.size() / 2);
  EXPECT_THROW(decode_image(bytes, "half.jpg"), IoError);
}

TEST(ImageIo, UnknownFormatAndMissingFile) {
  const std::vector<std::uint8_t> junk = {'n', 'o', 'p', 'e'};
  EXPECT_THROW(decode_image(junk, "junk"), IoError);
  EXPECT_THROW(load_image("/nonexistent/x.png"), IoError);
}

TEST(ImageIo, SupportedExtensionsAreCaseInsensitive) {
  EXPECT_TRUE(is_supported_image("a.PNG"));
  EXPECT_TRUE(is_supported_image("a.jpeg"));
  EXPECT_TRUE(is_supported_image("a.JPG"));
  EXPECT_FALSE(is_supported_image("a.bmp"));
  EXPECT_FALSE(is_supported_image("png"));
}

TEST(ImageIo, DownscaleKeepsAspectAndNeverUpscales) {
  const Raster big = synth::constant(600, 300, 80, 3);
  const Raster small = downscale_to_fit(big, 256);
  EXPECT_EQ(small.width(), 256);
  EXPECT_EQ(small.height(), 128);
  for (auto v : small.data()) ASSERT_EQ(v, 80);
  const Raster tiny = synth::constant(10, 5, 1, 1);
  EXPECT_EQ(downscale_to_fit(tiny, 256), tiny);
}
