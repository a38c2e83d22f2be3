#pragma once

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernel.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

/// Raw diamond-square grid of side 2^levels + 1.
///
/// Random draws, all uniform in [0, 1), are consumed in this order:
///   1. corners (0,0), (n-1,0), (0,n-1), (n-1,n-1);
///   2. per pass, with half = step/2 and scale = roughness^pass:
///      diamond step: centers (x, y) = (half + i step, half + j step),
///        rows outer; value = mean of the 4 diagonal corners + scale (u - 0.5)
///      square step: rows y = 0, half, 2 half, ...; x starts at half on even
///        rows (y / half even) and 0 on odd rows, advancing by step; value =
///        mean of the in-bounds axis neighbours at distance half + scale (u - 0.5)
///   until step reaches 1.
inline Plane diamond_square(int levels, double roughness, Rng64& rng) {
  if (levels < 1 || levels > 14) throw Error("diamond-square levels out of range");
  const int n = (1 << levels) + 1;
  Plane g(n, n);
  g.at(0, 0) = static_cast<float>(rng.uniform());
  g.at(n - 1, 0) = static_cast<float>(rng.uniform());
  g.at(0, n - 1) = static_cast<float>(rng.uniform());
  g.at(n - 1, n - 1) = static_cast<float>(rng.uniform());
  double scale = 1.0;
  for (int step = n - 1; step > 1; step /= 2, scale *= roughness) {
    const int half = step / 2;
    for (int y = half; y < n; y += step)
      for (int x = half; x < n; x += step) {
        const double avg = (static_cast<double>(g.at(x - half, y - half)) + g.at(x + half, y - half) +
                            g.at(x - half, y + half) + g.at(x + half, y + half)) /
                           4.0;
        g.at(x, y) = static_cast<float>(avg + scale * (rng.uniform() - 0.5));
      }
    for (int y = 0; y < n; y += half)
      for (int x = (y / half) % 2 == 0 ? half : 0; x < n; x += step) {
        double sum = 0.0;
        int cnt = 0;
        if (x - half >= 0) sum += g.at(x - half, y), ++cnt;
        if (x + half < n) sum += g.at(x + half, y), ++cnt;
        if (y - half >= 0) sum += g.at(x, y - half), ++cnt;
        if (y + half < n) sum += g.at(x, y + half), ++cnt;
        g.at(x, y) = static_cast<float>(sum / cnt + scale * (rng.uniform() - 0.5));
      }
  }
  return g;
}

/// Diamond-square on the smallest (2^k + 1)^2 grid covering w x h,
/// min-max normalized over the full grid, then cropped to the top-left w x h.
inline Plane plasma_fractal(int width, int height, double roughness, std::uint64_t seed) {
  int levels = 1;
  while ((1 << levels) + 1 < std::max(width, height)) ++levels;
  Rng64 rng(seed);
  const Plane g = diamond_square(levels, roughness, rng);
  const auto [lo, hi] = std::minmax_element(g.data.begin(), g.data.end());
  const double mn = *lo, range = static_cast<double>(*hi) - mn;
  Plane out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      out.at(x, y) = range > 0.0 ? static_cast<float>((g.at(x, y) - mn) / range) : 0.0f;
  return out;
}

/// out = clamp((img + weight * fractal * max_luma) / (1 + weight)).
inline ImageBuf fog(const ImageBuf& img, double weight, double roughness, std::uint64_t seed) {
  if (!(weight > 0.0 && weight < 1.0)) throw Error("fog weight must be in (0, 1)");
  const Plane f = plasma_fractal(img.width(), img.height(), roughness, seed);
  const Plane y = to_grayscale(img);
  const double max_luma = *std::max_element(y.data.begin(), y.data.end());
  std::vector<float> s(img.samples().begin(), img.samples().end());
  for (std::size_t i = 0; i < f.data.size(); ++i)
    for (int c = 0; c < 3; ++c)
      s[3 * i + c] = static_cast<float>((s[3 * i + c] + weight * f.data[i] * max_luma) / (1.0 + weight));
  return ImageBuf::from_samples(img.width(), img.height(), std::move(s));
}

struct SnowParams {
  double density = 0.0;      // fraction of coarse cells that seed a flake
  double flake_size = 1.0;   // coarse cell size in pixels
  double motion_length = 1;  // streak length
  double angle_deg = 0.0;
  double blend = 0.5;        // weight of the brightened grayscale base
  double gain = 1.0;         // streak brightness multiplier
};

/// Flakes: a Bernoulli(density) field on a grid of flake_size cells
/// (row-major draws), upsampled nearest, motion-blurred along angle_deg,
/// scaled by gain and capped at 1. Base: (1 - blend) img +
/// blend max(img, 1.5 Y + 0.5). Output: clamp(base + flakes).
inline ImageBuf snow(const ImageBuf& img, const SnowParams& p, std::uint64_t seed) {
  if (!(p.blend > 0.0 && p.blend <= 1.0)) throw Error("snow blend must be in (0, 1]");
  if (p.density < 0.0 || p.density > 1.0 || !(p.flake_size >= 1.0))
    throw Error("snow density must be in [0, 1] and flake size >= 1");
  const int w = img.width(), h = img.height();
  const int cw = static_cast<int>(std::ceil(w / p.flake_size));
  const int ch = static_cast<int>(std::ceil(h / p.flake_size));
  Rng64 rng(seed);
  std::vector<float> coarse(static_cast<std::size_t>(cw) * ch);
  for (float& v : coarse) v = rng.uniform() < p.density ? 1.0f : 0.0f;
  Plane flakes(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int cx = std::min(cw - 1, static_cast<int>(x / p.flake_size));
      const int cy = std::min(ch - 1, static_cast<int>(y / p.flake_size));
      flakes.at(x, y) = coarse[static_cast<std::size_t>(cy) * cw + cx];
    }
  const auto k = motion_kernel(p.motion_length, p.angle_deg * std::numbers::pi / 180.0);
  const auto streaks = detail::convolve_raw(flakes.data, w, h, 1, k);

  const Plane y = to_grayscale(img);
  std::vector<float> s(img.samples().begin(), img.samples().end());
  for (std::size_t i = 0; i < y.data.size(); ++i) {
    const double bright = 1.5 * y.data[i] + 0.5;
    const double flake = std::min(1.0, streaks[i] * p.gain);
    for (int c = 0; c < 3; ++c) {
      const double v = s[3 * i + c];
      const double base = (1.0 - p.blend) * v + p.blend * std::max(v, bright);
      s[3 * i + c] = static_cast<float>(base + flake);
    }
  }
  return ImageBuf::from_samples(w, h, std::move(s));
}

/// out = clamp((1 - blend/2) img + blend crop(texture)); the crop origin is
/// uniform over all placements (x drawn first).
inline ImageBuf frost(const ImageBuf& img, const ImageBuf& texture, double blend, std::uint64_t seed) {
  if (!(blend > 0.0 && blend <= 1.0)) throw Error("frost blend must be in (0, 1]");
  if (texture.width() < img.width() || texture.height() < img.height()) throw Error("texture too small");
  Rng64 rng(seed);
  const auto x0 = static_cast<int>(rng.uniform_int(0, texture.width() - img.width()));
  const auto y0 = static_cast<int>(rng.uniform_int(0, texture.height() - img.height()));
  const double alpha = 1.0 - blend / 2.0;
  std::vector<float> s(img.samples().begin(), img.samples().end());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) {
        auto& v = s[(static_cast<std::size_t>(y) * img.width() + x) * 3 + c];
        v = static_cast<float>(alpha * v + blend * texture.at(x0 + x, y0 + y, c));
      }
  return ImageBuf::from_samples(img.width(), img.height(), std::move(s));
}

/// Binary blob mask: i.i.d. N(0,1) noise smoothed by a Gaussian of
/// blob_sigma, thresholded at the (1 - coverage) quantile of the smoothed
/// field's marginal distribution.
inline Plane spatter_mask(int width, int height, double coverage, double blob_sigma, Rng64& rng) {
  if (!(coverage > 0.0 && coverage < 1.0)) throw Error("spatter coverage must be in (0, 1)");
  Plane noise(width, height);
  for (float& v : noise.data) v = static_cast<float>(rng.normal());
  const Plane field = gaussian_blur(noise, blob_sigma);
  // Variance of the smoothed field is the sum of squared 2-D weights,
  // (sum t^2)^2 for a separable kernel.
  double field_sd = 0.0;
  for (double t : gaussian_taps(blob_sigma)) field_sd += t * t;
  const double threshold =
      field_sd * boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - coverage);
  Plane mask(width, height);
  for (std::size_t i = 0; i < mask.data.size(); ++i) mask.data[i] = field.data[i] > threshold ? 1.0f : 0.0f;
  return mask;
}

struct SpatterParams {
  double coverage = 0.1;
  double blob_sigma = 3.0;
  bool mud = false;
  double opacity = 0.6;
};

/// Blends droplets (rain: a blurred, blue-white tinted copy of the image) or
/// mud (flat brown) through a softened spatter_mask.
inline ImageBuf spatter(const ImageBuf& img, const SpatterParams& p, std::uint64_t seed) {
  if (!(p.opacity > 0.0 && p.opacity <= 1.0)) throw Error("spatter opacity must be in (0, 1]");
  const int w = img.width(), h = img.height();
  Rng64 rng(seed);
  const Plane mask = gaussian_blur(spatter_mask(w, h, p.coverage, p.blob_sigma, rng), 1.0);
  static constexpr double kMud[3] = {0.25, 0.16, 0.08};
  static constexpr double kRainTint[3] = {0.75, 0.82, 0.92};
  const auto blurred = p.mud ? std::vector<float>{} : detail::gaussian_raw(img.samples(), w, h, 3, 2.0);
  std::vector<float> s(img.samples().begin(), img.samples().end());
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    const double m = std::clamp(static_cast<double>(mask.data[i]), 0.0, 1.0) * p.opacity;
    for (int c = 0; c < 3; ++c) {
      const double cover = p.mud ? kMud[c] : 0.55 * blurred[3 * i + c] + 0.45 * kRainTint[c];
      s[3 * i + c] = static_cast<float>((1.0 - m) * s[3 * i + c] + m * cover);
    }
  }
  return ImageBuf::from_samples(w, h, std::move(s));
}

}  // namespace corrupt_bench
