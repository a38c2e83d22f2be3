#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "corrupt_bench/codec.hpp"
#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernel.hpp"
#include "corrupt_bench/resample.hpp"
#include "corrupt_bench/rng.hpp"
#include "test_util.hpp"

using namespace corrupt_bench;
using namespace cbtest;

TEST(ImageBuf, RejectsImagesBelowMinimumSize) {
  EXPECT_THROW(ImageBuf(7, 8), Error);
  EXPECT_THROW(ImageBuf(8, 7), Error);
  EXPECT_NO_THROW(ImageBuf(8, 8));
}

TEST(ImageBuf, ClampsAndSanitizesSamples) {
  std::vector<float> s(8 * 8 * 3, 0.5f);
  s[0] = -2.0f;
  s[1] = 3.0f;
  s[2] = std::nanf("");
  const auto img = ImageBuf::from_samples(8, 8, s);
  EXPECT_EQ(img.samples()[0], 0.0f);
  EXPECT_EQ(img.samples()[1], 1.0f);
  EXPECT_EQ(img.samples()[2], 0.0f);
  EXPECT_EQ(img.samples()[3], 0.5f);
}

TEST(ImageBuf, Rgb8RoundTripIsExact) {
  std::vector<unsigned char> rgb(16 * 9 * 3);
  for (std::size_t i = 0; i < rgb.size(); ++i) rgb[i] = static_cast<unsigned char>((i * 37) % 256);
  const auto img = ImageBuf::from_rgb8(16, 9, rgb);
  EXPECT_EQ(img.to_rgb8(), rgb);
}

TEST(Grayscale, Rec601Coefficients) {
  EXPECT_NEAR(to_grayscale(gray_image(8, 8, 1.0f)).at(3, 3), 1.0, 1e-6);
  EXPECT_NEAR(to_grayscale(constant_image(8, 8, 1, 0, 0)).at(0, 0), 0.299, 1e-6);
  const auto img = random_image(8, 8, 7);
  const auto y = to_grayscale(img);
  for (int yy = 0; yy < 8; ++yy)
    for (int x = 0; x < 8; ++x)
      EXPECT_NEAR(y.at(x, yy), 0.299 * img.at(x, yy, 0) + 0.587 * img.at(x, yy, 1) + 0.114 * img.at(x, yy, 2), 1e-6);
}

TEST(ReflectIndex, MatchesIndependentMirror) {
  for (int n : {1, 2, 3, 8, 13})
    for (int i = -40; i < 40; ++i) {
      if (n == 1) {
        EXPECT_EQ(reflect_index(i, n), 0);
        continue;
      }
      EXPECT_EQ(reflect_index(i, n), mirror(i, n)) << "i=" << i << " n=" << n;
    }
}

TEST(Kernels, DiskOfHalfPixelIsIdentity) {
  const auto k = disk_kernel(0.5);
  EXPECT_EQ(k.radius(), 0);
  EXPECT_DOUBLE_EQ(k.at(0, 0), 1.0);
}

TEST(Kernels, GaussianCenterWeightMatchesFormula) {
  // Normalized 2-D Gaussian at the origin over a 7x7 support.
  double sum = 0.0;
  for (int y = -3; y <= 3; ++y)
    for (int x = -3; x <= 3; ++x) sum += std::exp(-(x * x + y * y) / 2.0);
  const auto k = gaussian_kernel(1.0);
  EXPECT_EQ(k.side(), 7);
  EXPECT_NEAR(k.at(0, 0), 1.0 / sum, 1e-12);
  EXPECT_NEAR(k.at(0, 0), 0.15924112569070245, 1e-12);
}

TEST(Kernels, HorizontalMotionIsFivePixelLine) {
  const auto k = motion_kernel(5, 0.0);
  EXPECT_EQ(k.radius(), 2);
  for (int y = -2; y <= 2; ++y)
    for (int x = -2; x <= 2; ++x) EXPECT_NEAR(k.at(x, y), y == 0 ? 0.2 : 0.0, 1e-12) << x << "," << y;
}

TEST(Kernels, VerticalMotionIsTransposed) {
  const auto k = motion_kernel(5, std::numbers::pi / 2);
  for (int y = -2; y <= 2; ++y)
    for (int x = -2; x <= 2; ++x) EXPECT_NEAR(k.at(x, y), x == 0 ? 0.2 : 0.0, 1e-12);
}

TEST(Kernels, NonpositiveParametersThrow) {
  EXPECT_THROW(disk_kernel(0.0), Error);
  EXPECT_THROW(gaussian_kernel(-1.0), Error);
  EXPECT_THROW(motion_kernel(0.0, 0.0), Error);
  EXPECT_THROW(Kernel2D(1, std::vector<double>(9, 0.2)), Error);
}

TEST(Kernels, AllSumToOne) {
  for (double r : {0.5, 1.0, 2.5, 7.0}) {
    const auto k = disk_kernel(r);
    const auto& w = k.weights();
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-9);
  }
  for (double a : {0.0, 0.3, 1.0, 2.5}) {
    const auto k = motion_kernel(9, a);
    const auto& w = k.weights();
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-9);
    for (double v : w) EXPECT_GE(v, 0.0);
  }
}

TEST(Convolve, IdentityKernelLeavesImage) {
  const auto img = random_image(12, 9, 1);
  EXPECT_EQ(convolve(img, Kernel2D::identity()), img);
}

TEST(Convolve, ConstantImagePreserved) {
  const auto img = constant_image(16, 16, 0.2f, 0.5f, 0.8f);
  const auto out = convolve(img, disk_kernel(3.0));
  EXPECT_LT(max_abs_diff(img, out), 1e-6);
}

TEST(Convolve, BoxOnRampMatchesBruteForce) {
  const auto img = ramp_image(8, 8);
  const auto k = Kernel2D(1, std::vector<double>(9, 1.0 / 9.0));
  const auto out = convolve(img, k);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) acc += img.at(mirror(x + dx, 8), mirror(y + dy, 8), c) / 9.0;
        EXPECT_NEAR(out.at(x, y, c), acc, 1e-6);
      }
}

TEST(Convolve, AsymmetricKernelMatchesBruteForce) {
  const auto img = random_image(11, 10, 3);
  std::vector<double> w(25);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(i % 7 + 1);
  const auto k = Kernel2D::normalized(2, w);
  const auto out = convolve(img, k);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 11; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int dy = -2; dy <= 2; ++dy)
          for (int dx = -2; dx <= 2; ++dx) acc += k.at(dx, dy) * img.at(mirror(x + dx, 11), mirror(y + dy, 10), c);
        EXPECT_NEAR(out.at(x, y, c), std::clamp(acc, 0.0, 1.0), 1e-6);
      }
}

TEST(Convolve, KernelLargerThanImageThrows) {
  const auto img = gray_image(8, 8, 0.5f);
  try {
    convolve(img, disk_kernel(4.0));
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("kernel exceeds image extent"), std::string::npos);
  }
}

TEST(Convolve, Linearity) {
  // Scaled into [0, 0.5] so a*x + b*y stays inside [0, 1] and no clamping applies.
  auto half = [](const ImageBuf& i) {
    std::vector<float> s(i.samples().begin(), i.samples().end());
    for (auto& v : s) v *= 0.5f;
    return ImageBuf::from_samples(i.width(), i.height(), s);
  };
  const auto a = half(random_image(16, 12, 10)), b = half(random_image(16, 12, 11));
  const double ca = 0.7, cb = 0.6;
  std::vector<float> mix(a.samples().size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = static_cast<float>(ca * a.samples()[i] + cb * b.samples()[i]);
  const auto k = gaussian_kernel(1.3);
  const auto lhs = convolve(ImageBuf::from_samples(16, 12, mix), k);
  const auto ra = convolve(a, k), rb = convolve(b, k);
  for (std::size_t i = 0; i < mix.size(); ++i)
    EXPECT_NEAR(lhs.samples()[i], ca * ra.samples()[i] + cb * rb.samples()[i], 1e-5);
}

TEST(Convolve, SeparableGaussianMatchesTwoDimensional) {
  const auto img = random_image(20, 17, 4);
  const auto sep = gaussian_blur(img, 1.5);
  const auto full = convolve(img, gaussian_kernel(1.5));
  EXPECT_LT(max_abs_diff(sep, full), 1e-5);
}

TEST(Range, RandomOpsStayInUnitInterval) {
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    const auto img = random_image(16, 16, seed);
    for (const auto& out : {convolve(img, motion_kernel(7, 0.4)), gaussian_blur(img, 2.0), resize(img, 11, 23),
                            resize_center_crop(img, 9), mirror_horizontal(img)})
      for (float v : out.samples()) ASSERT_TRUE(v >= 0.0f && v <= 1.0f);
  }
}

TEST(Rng, SameSeedSameSequence) {
  Rng64 a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs |= x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, MatchesStandardEngineCheckValue) {
  // std::mt19937_64 with the default seed 5489 yields this value at step 10000.
  Rng64 r(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = r.next_u64();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, SplitIsLabelDependentAndDrawIndependent) {
  Rng64 a(7), b(7);
  for (int i = 0; i < 5; ++i) b.next_u64();
  EXPECT_EQ(a.split("x").next_u64(), b.split("x").next_u64());
  EXPECT_NE(a.split("x").next_u64(), a.split("y").next_u64());
}

TEST(Rng, UniformIntCoversRangeWithoutBias) {
  Rng64 r(1);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.uniform_int(-3, 3);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 3);
    ++counts[static_cast<std::size_t>(v + 3)];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * std::sqrt(n / 7.0));
}

TEST(Rng, NormalMoments) {
  Rng64 r(2);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

TEST(Rng, PoissonMomentsSmallAndLargeMean) {
  for (double mean : {0.7, 4.0, 12.0, 150.0}) {
    Rng64 r(static_cast<std::uint64_t>(mean * 100));
    const int n = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(r.poisson(mean));
      s += k;
      s2 += k * k;
    }
    const double m = s / n, var = s2 / n - m * m;
    EXPECT_NEAR(m, mean, 4 * std::sqrt(mean / n)) << mean;
    EXPECT_NEAR(var / mean, 1.0, 0.03) << mean;
  }
}

TEST(Codec, PngRoundTripIsLossless) {
  const auto img = ImageBuf::from_rgb8(13, 9, random_image(13, 9, 5).to_rgb8());
  EXPECT_EQ(decode_image(encode_png(img)), img);
}

TEST(Codec, JpegQuality100OnMidGray) {
  const auto img = gray_image(32, 32, 0.5f);
  const auto out = decode_image(encode_jpeg(img, 100));
  EXPECT_EQ(out.width(), 32);
  EXPECT_EQ(out.height(), 32);
  EXPECT_LT(max_abs_diff(img, out), 2.0 / 255.0);
}

TEST(Codec, GarbageFailsToDecode) {
  const Bytes junk{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_THROW(decode_image(junk), Error);
  Bytes truncated = encode_png(gray_image(16, 16, 0.3f));
  truncated.resize(truncated.size() / 2);
  EXPECT_THROW(decode_image(truncated), Error);
}

TEST(Resample, SameSizeIsIdentityAndConstantsSurvive) {
  const auto img = random_image(10, 10, 9);
  EXPECT_EQ(resize(img, 10, 10), img);
  const auto c = constant_image(30, 20, 0.1f, 0.4f, 0.7f);
  EXPECT_LT(max_abs_diff(resize(c, 13, 41), constant_image(13, 41, 0.1f, 0.4f, 0.7f)), 1e-6);
  const auto cc = resize_center_crop(c, 16);
  EXPECT_EQ(cc.width(), 16);
  EXPECT_EQ(cc.height(), 16);
}

TEST(Crop, MirrorIsInvolutionAndCropIndexes) {
  const auto img = random_image(12, 10, 8);
  EXPECT_EQ(mirror_horizontal(mirror_horizontal(img)), img);
  const auto c = crop(img, 2, 1, 8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) EXPECT_EQ(c.at(x, y, 1), img.at(x + 2, y + 1, 1));
  EXPECT_THROW(crop(img, 5, 0, 8, 8), Error);
}
