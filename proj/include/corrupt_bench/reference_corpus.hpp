#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "corrupt_bench/codec.hpp"
#include "corrupt_bench/hash.hpp"
#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernels/weather.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/resample.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

inline constexpr int kReferenceCorpusSize = 100;

namespace detail {

struct Rgb {
  double r, g, b;
};

inline Rgb random_color(Rng64& rng) {
  // HSV with moderate-to-high saturation so chroma-sensitive kernels see color.
  const double hue = rng.uniform(0.0, 6.0), sat = rng.uniform(0.35, 0.9), val = rng.uniform(0.25, 0.95);
  const double c = val * sat, x = c * (1.0 - std::fabs(std::fmod(hue, 2.0) - 1.0)), m = val - c;
  Rgb out{};
  switch (static_cast<int>(hue)) {
    case 0: out = {c, x, 0}; break;
    case 1: out = {x, c, 0}; break;
    case 2: out = {0, c, x}; break;
    case 3: out = {0, x, c}; break;
    case 4: out = {x, 0, c}; break;
    default: out = {c, 0, x}; break;
  }
  return {out.r + m, out.g + m, out.b + m};
}

inline double smoothstep_edge(double signed_dist) { return std::clamp(0.5 - signed_dist, 0.0, 1.0); }

}  // namespace detail

/// Deterministic synthetic photograph number `index`: a two-colour gradient
/// under low-frequency fractal shading, overlaid with antialiased ellipses,
/// rotated rectangles and one sinusoidal texture patch, quantized to 8 bit.
inline ImageBuf reference_image(int index, int size = 224) {
  Rng64 rng(Rng64::mix(0x5eedc0deULL + static_cast<std::uint64_t>(index)));
  const auto top = detail::random_color(rng), bottom = detail::random_color(rng);
  const double grad_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Plane shade = plasma_fractal(size, size, 0.6, rng.next_u64());
  std::vector<double> img(static_cast<std::size_t>(size) * size * 3);
  auto put = [&](int x, int y, const detail::Rgb& c, double a) {
    double* p = &img[(static_cast<std::size_t>(y) * size + x) * 3];
    p[0] = (1 - a) * p[0] + a * c.r;
    p[1] = (1 - a) * p[1] + a * c.g;
    p[2] = (1 - a) * p[2] + a * c.b;
  };
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double t = std::clamp(
          0.5 + ((x - size / 2.0) * std::cos(grad_angle) + (y - size / 2.0) * std::sin(grad_angle)) / size, 0.0, 1.0);
      const double s = 0.75 + 0.5 * shade.at(x, y);
      double* p = &img[(static_cast<std::size_t>(y) * size + x) * 3];
      p[0] = s * ((1 - t) * top.r + t * bottom.r);
      p[1] = s * ((1 - t) * top.g + t * bottom.g);
      p[2] = s * ((1 - t) * top.b + t * bottom.b);
    }

  const int shapes = 6 + static_cast<int>(rng.uniform_int(0, 8));
  for (int k = 0; k < shapes; ++k) {
    const auto color = detail::random_color(rng);
    const double cx = rng.uniform(0, size), cy = rng.uniform(0, size);
    const double rx = rng.uniform(0.04, 0.25) * size, ry = rng.uniform(0.04, 0.25) * size;
    const double rot = rng.uniform(0.0, std::numbers::pi);
    const bool ellipse = rng.uniform() < 0.55;
    const double shading = rng.uniform(0.0, 0.35);
    const double cr = std::cos(rot), sr = std::sin(rot);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        const double u = dx * cr + dy * sr, v = -dx * sr + dy * cr;
        double dist;
        if (ellipse) {
          const double q = std::sqrt((u / rx) * (u / rx) + (v / ry) * (v / ry));
          dist = (q - 1.0) * std::min(rx, ry);
        } else {
          dist = std::max(std::fabs(u) - rx, std::fabs(v) - ry);
        }
        const double a = detail::smoothstep_edge(dist);
        if (a <= 0.0) continue;
        const double lit = 1.0 - shading * std::clamp((u / rx + v / ry) * 0.5 + 0.5, 0.0, 1.0);
        put(x, y, {color.r * lit, color.g * lit, color.b * lit}, a);
      }
  }

  // Texture patch: oriented sinusoidal grating inside a soft disk.
  const auto tc = detail::random_color(rng);
  const double px = rng.uniform(0.2, 0.8) * size, py = rng.uniform(0.2, 0.8) * size;
  const double pr = rng.uniform(0.12, 0.22) * size, period = rng.uniform(5.0, 14.0);
  const double pa = rng.uniform(0.0, std::numbers::pi);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double dx = x + 0.5 - px, dy = y + 0.5 - py;
      const double a = detail::smoothstep_edge(std::sqrt(dx * dx + dy * dy) - pr);
      if (a <= 0.0) continue;
      const double wave = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * (dx * std::cos(pa) + dy * std::sin(pa)) / period);
      put(x, y, {tc.r * (0.4 + 0.6 * wave), tc.g * (0.4 + 0.6 * wave), tc.b * (0.4 + 0.6 * wave)}, a * 0.85);
    }

  std::vector<unsigned char> rgb(img.size());
  for (std::size_t i = 0; i < img.size(); ++i)
    rgb[i] = static_cast<unsigned char>(std::lround(std::clamp(img[i], 0.0, 1.0) * 255.0));
  return ImageBuf::from_rgb8(size, size, rgb);
}

/// The shipped calibration corpus: reference_image(0 .. count-1).
inline std::vector<ImageBuf> reference_corpus(int count = kReferenceCorpusSize, int size = 224,
                                              unsigned jobs = default_jobs()) {
  std::vector<std::optional<ImageBuf>> slots(static_cast<std::size_t>(count));
  parallel_for(slots.size(), jobs, [&](std::size_t i) { slots[i] = reference_image(static_cast<int>(i), size); });
  std::vector<ImageBuf> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Decodes every image in `dir` (sorted by relative path), resized and
/// center-cropped to `size`.
inline std::vector<ImageBuf> load_corpus(const std::filesystem::path& dir, int size = 224) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && has_image_extension(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<ImageBuf> out;
  for (const auto& f : files) out.push_back(resize_center_crop(read_image(f), size));
  return out;
}

/// SHA-256 over the ordered per-image pixel hashes.
inline std::string corpus_fingerprint(const std::vector<ImageBuf>& corpus) {
  Sha256 h;
  for (const auto& img : corpus) h.update(pixel_hash(img));
  return to_hex(h.finish());
}

}  // namespace corrupt_bench
