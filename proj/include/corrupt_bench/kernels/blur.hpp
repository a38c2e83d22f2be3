#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernel.hpp"
#include "corrupt_bench/resample.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

inline ImageBuf defocus_blur(const ImageBuf& img, double radius) { return convolve(img, disk_kernel(radius)); }

inline ImageBuf motion_blur(const ImageBuf& img, double length, double angle_rad) {
  return convolve(img, motion_kernel(length, angle_rad));
}

/// Swap stage of the glass blur. For each of `iterations` rounds, visits
/// interior pixels from bottom-right to top-left (rows outer) and swaps the
/// whole pixel with the one at a uniform offset in [-max_shift, max_shift]
/// (dx drawn first, then dy). Interior means at least max_shift away from
/// every edge. The result is a permutation of the input pixels.
inline ImageBuf shuffle_local_pixels(const ImageBuf& img, int max_shift, int iterations,
                                     std::uint64_t seed) {
  if (max_shift < 0 || iterations < 0) throw Error("glass blur shift and iterations must be >= 0");
  const int w = img.width(), h = img.height();
  std::vector<float> s(img.samples().begin(), img.samples().end());
  if (max_shift == 0) return img;
  Rng64 rng(seed);
  for (int it = 0; it < iterations; ++it) {
    for (int y = h - 1 - max_shift; y >= max_shift; --y) {
      for (int x = w - 1 - max_shift; x >= max_shift; --x) {
        const auto dx = static_cast<int>(rng.uniform_int(-max_shift, max_shift));
        const auto dy = static_cast<int>(rng.uniform_int(-max_shift, max_shift));
        const std::size_t a = (static_cast<std::size_t>(y) * w + x) * 3;
        const std::size_t b = (static_cast<std::size_t>(y + dy) * w + (x + dx)) * 3;
        for (int c = 0; c < 3; ++c) std::swap(s[a + c], s[b + c]);
      }
    }
  }
  return ImageBuf::from_samples(w, h, std::move(s));
}

/// Gaussian blur, local pixel shuffling, Gaussian blur.
inline ImageBuf glass_blur(const ImageBuf& img, double sigma, int max_shift, int iterations,
                           std::uint64_t seed) {
  const ImageBuf first = gaussian_blur(img, sigma);
  return gaussian_blur(shuffle_local_pixels(first, max_shift, iterations, seed), sigma);
}

/// 1, 1 + step, 1 + 2 step, ... up to and including max_zoom.
inline std::vector<double> zoom_ladder(double max_zoom, double step) {
  if (!(step > 0.0) || !(max_zoom >= 1.0)) throw Error("zoom ladder needs step > 0 and max_zoom >= 1");
  std::vector<double> z;
  for (int i = 0;; ++i) {
    const double v = 1.0 + i * step;
    if (v > max_zoom + 1e-9) break;
    z.push_back(v);
  }
  return z;
}

/// Central crop of extent 1/zoom, bilinearly rescaled back to full size.
/// Output pixel x samples input coordinate w/2 + (x + 0.5 - w/2)/zoom - 0.5.
inline std::vector<float> zoom_crop_raw(const ImageBuf& img, double zoom) {
  const int w = img.width(), h = img.height();
  std::vector<float> out(img.samples().size());
  for (int y = 0; y < h; ++y) {
    const double fy = h / 2.0 + (y + 0.5 - h / 2.0) / zoom - 0.5;
    for (int x = 0; x < w; ++x) {
      const double fx = w / 2.0 + (x + 0.5 - w / 2.0) / zoom - 0.5;
      for (int c = 0; c < 3; ++c)
        out[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
            static_cast<float>(sample_bilinear(img.samples(), w, h, 3, c, fx, fy));
    }
  }
  return out;
}

/// Mean of zoom_crop over the factors; requires 1 = z_1 < z_2 < ... and a
/// final crop of at least 8 px.
inline ImageBuf zoom_blur(const ImageBuf& img, std::span<const double> factors) {
  if (factors.empty() || factors.front() != 1.0) throw Error("zoom factors must start at 1");
  for (std::size_t i = 1; i < factors.size(); ++i)
    if (!(factors[i] > factors[i - 1])) throw Error("zoom factors must be strictly increasing");
  const double zmax = factors.back();
  if (img.width() / zmax < ImageBuf::kMinExtent || img.height() / zmax < ImageBuf::kMinExtent)
    throw Error("zoom factor too large: crop below 8 px");
  std::vector<double> acc(img.samples().size(), 0.0);
  for (double z : factors) {
    if (z == 1.0) {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += img.samples()[i];
      continue;
    }
    const auto layer = zoom_crop_raw(img, z);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += layer[i];
  }
  std::vector<float> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / factors.size());
  return ImageBuf::from_samples(img.width(), img.height(), std::move(out));
}

}  // namespace corrupt_bench
