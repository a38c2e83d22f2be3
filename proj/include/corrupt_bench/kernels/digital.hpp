#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "corrupt_bench/codec.hpp"
#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernel.hpp"
#include "corrupt_bench/resample.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

enum class PhotometricMode { Brightness, Contrast, Saturate };

/// brightness: img + a, a in (-1, 1)
/// contrast:   (img - mean) a + mean, mean over all samples, a > 0
/// saturate:   Y + a (rgb - Y) with Rec.601 Y, a >= 0
inline ImageBuf photometric(const ImageBuf& img, PhotometricMode mode, double a) {
  std::vector<float> s(img.samples().begin(), img.samples().end());
  switch (mode) {
    case PhotometricMode::Brightness:
      if (!(a > -1.0 && a < 1.0)) throw Error("brightness amount must be in (-1, 1)");
      for (float& v : s) v = static_cast<float>(v + a);
      break;
    case PhotometricMode::Contrast: {
      if (!(a >= 0.0)) throw Error("contrast factor must be nonnegative");
      double mean = 0.0;
      for (float v : s) mean += v;
      mean /= static_cast<double>(s.size());
      for (float& v : s) v = static_cast<float>((v - mean) * a + mean);
      break;
    }
    case PhotometricMode::Saturate:
      if (!(a >= 0.0)) throw Error("saturation amount must be nonnegative");
      for (std::size_t i = 0; i < s.size(); i += 3) {
        const double y = luma(s[i], s[i + 1], s[i + 2]);
        for (int c = 0; c < 3; ++c) s[i + c] = static_cast<float>(y + a * (s[i + c] - y));
      }
      break;
  }
  return ImageBuf::from_samples(img.width(), img.height(), std::move(s));
}

inline ImageBuf brightness(const ImageBuf& img, double a) { return photometric(img, PhotometricMode::Brightness, a); }
inline ImageBuf contrast(const ImageBuf& img, double a) { return photometric(img, PhotometricMode::Contrast, a); }
inline ImageBuf saturate(const ImageBuf& img, double a) { return photometric(img, PhotometricMode::Saturate, a); }

/// Displacement field for elastic(): uniform [-1, 1] draws (all dx row-major,
/// then all dy), each Gaussian-smoothed with `smoothing`, scaled by
/// `displacement`.
inline std::pair<Plane, Plane> elastic_displacement(int width, int height, double displacement,
                                                    double smoothing, std::uint64_t seed) {
  if (!(displacement >= 0.0) || !(smoothing > 0.0))
    throw Error("elastic needs displacement >= 0 and smoothing > 0");
  Rng64 rng(seed);
  Plane dx(width, height), dy(width, height);
  for (float& v : dx.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (float& v : dy.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  dx = gaussian_blur(dx, smoothing);
  dy = gaussian_blur(dy, smoothing);
  for (float& v : dx.data) v = static_cast<float>(v * displacement);
  for (float& v : dy.data) v = static_cast<float>(v * displacement);
  return {std::move(dx), std::move(dy)};
}

inline ImageBuf elastic(const ImageBuf& img, double displacement, double smoothing, std::uint64_t seed) {
  if (displacement == 0.0) return img;
  const auto [dx, dy] = elastic_displacement(img.width(), img.height(), displacement, smoothing, seed);
  return warp_bilinear(img, dx, dy);
}

/// Box-average f x f blocks (edge blocks average what they cover), then
/// paint each block with its mean.
inline ImageBuf pixelate(const ImageBuf& img, int factor) {
  if (factor < 1) throw Error("pixelate factor must be >= 1");
  const int w = img.width(), h = img.height();
  if (w / factor < 1 || h / factor < 1) throw Error("pixelate factor leaves less than 1 px");
  if (factor == 1) return img;
  std::vector<float> s(img.samples().size());
  for (int by = 0; by < h; by += factor) {
    for (int bx = 0; bx < w; bx += factor) {
      const int ex = std::min(w, bx + factor), ey = std::min(h, by + factor);
      double acc[3] = {0, 0, 0};
      for (int y = by; y < ey; ++y)
        for (int x = bx; x < ex; ++x)
          for (int c = 0; c < 3; ++c) acc[c] += img.at(x, y, c);
      const double n = static_cast<double>(ex - bx) * (ey - by);
      for (int y = by; y < ey; ++y)
        for (int x = bx; x < ex; ++x)
          for (int c = 0; c < 3; ++c)
            s[(static_cast<std::size_t>(y) * w + x) * 3 + c] = static_cast<float>(acc[c] / n);
    }
  }
  return ImageBuf::from_samples(w, h, std::move(s));
}

/// Round trip through the JPEG codec at the given quality (4:2:0).
inline ImageBuf jpeg_recompress(const ImageBuf& img, int quality) {
  return decode_image(encode_jpeg(img, quality));
}

}  // namespace corrupt_bench
