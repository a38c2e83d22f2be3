#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace corrupt_bench {

/// Raised for every contract violation inside the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-channel float raster with no range constraint. Used for
/// luminance, displacement fields, masks and fractals.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  Plane() = default;
  Plane(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw Error("plane dimensions must be positive");
  }

  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// H x W x 3 RGB image with interleaved float samples in [0, 1].
///
/// Instances are immutable values. Every factory clamps its input, so any
/// ImageBuf observed by a caller satisfies the range invariant. Images
/// smaller than 8x8 are rejected.
class ImageBuf {
 public:
  static constexpr int kChannels = 3;
  static constexpr int kMinExtent = 8;

  ImageBuf(int width, int height, float fill = 0.0f)
      : ImageBuf(width, height,
                 std::vector<float>(checked_size(width, height), fill)) {}

  /// Takes ownership of row-major interleaved RGB samples. Values are
  /// clamped to [0, 1]; NaN becomes 0.
  static ImageBuf from_samples(int width, int height, std::vector<float> samples) {
    return ImageBuf(width, height, std::move(samples));
  }

  /// Decodes 8-bit interleaved RGB by x / 255.
  static ImageBuf from_rgb8(int width, int height, std::span<const unsigned char> rgb) {
    if (rgb.size() != checked_size(width, height)) throw Error("rgb8 buffer size mismatch");
    std::vector<float> s(rgb.size());
    for (std::size_t i = 0; i < rgb.size(); ++i) s[i] = static_cast<float>(rgb[i]) / 255.0f;
    return ImageBuf(width, height, std::move(s));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  std::span<const float> samples() const { return samples_; }

  float at(int x, int y, int c) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  /// Encodes by round(255 x).
  std::vector<unsigned char> to_rgb8() const {
    std::vector<unsigned char> out(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i)
      out[i] = static_cast<unsigned char>(std::lround(samples_[i] * 255.0f));
    return out;
  }

  bool operator==(const ImageBuf&) const = default;

 private:
  ImageBuf(int width, int height, std::vector<float> samples)
      : width_(width), height_(height), samples_(std::move(samples)) {
    if (samples_.size() != checked_size(width, height))
      throw Error("sample count does not match image dimensions");
    for (float& v : samples_) v = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
  }

  static std::size_t checked_size(int width, int height) {
    if (width < kMinExtent || height < kMinExtent)
      throw Error("image below minimum size 8x8 (got " + std::to_string(width) + "x" +
                  std::to_string(height) + ")");
    return static_cast<std::size_t>(width) * height * kChannels;
  }

  int width_;
  int height_;
  std::vector<float> samples_;
};

inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline double luma(double r, double g, double b) { return kLumaR * r + kLumaG * g + kLumaB * b; }

/// Rec.601 luminance.
inline Plane to_grayscale(const ImageBuf& img) {
  Plane out(img.width(), img.height());
  auto s = img.samples();
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = static_cast<float>(luma(s[3 * i], s[3 * i + 1], s[3 * i + 2]));
  return out;
}

/// Channel plane extraction / reassembly used by per-channel kernels.
inline Plane channel_plane(const ImageBuf& img, int c) {
  Plane p(img.width(), img.height());
  auto s = img.samples();
  for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] = s[3 * i + c];
  return p;
}

inline ImageBuf merge_planes(const Plane& r, const Plane& g, const Plane& b) {
  std::vector<float> s(r.data.size() * 3);
  for (std::size_t i = 0; i < r.data.size(); ++i) {
    s[3 * i] = r.data[i];
    s[3 * i + 1] = g.data[i];
    s[3 * i + 2] = b.data[i];
  }
  return ImageBuf::from_samples(r.width, r.height, std::move(s));
}

inline ImageBuf crop(const ImageBuf& img, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > img.width() || y0 + h > img.height())
    throw Error("crop rectangle outside image");
  std::vector<float> s(static_cast<std::size_t>(w) * h * 3);
  auto src = img.samples();
  for (int y = 0; y < h; ++y) {
    auto row = src.subspan((static_cast<std::size_t>(y0 + y) * img.width() + x0) * 3,
                           static_cast<std::size_t>(w) * 3);
    std::copy(row.begin(), row.end(), s.begin() + static_cast<std::ptrdiff_t>(y) * w * 3);
  }
  return ImageBuf::from_samples(w, h, std::move(s));
}

inline ImageBuf mirror_horizontal(const ImageBuf& img) {
  const int w = img.width(), h = img.height();
  std::vector<float> s(img.samples().size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        s[(static_cast<std::size_t>(y) * w + x) * 3 + c] = img.at(w - 1 - x, y, c);
  return ImageBuf::from_samples(w, h, std::move(s));
}

inline double mean_squared_error(const ImageBuf& a, const ImageBuf& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw Error("dimension mismatch");
  double acc = 0.0;
  auto sa = a.samples(), sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = static_cast<double>(sa[i]) - sb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(sa.size());
}

}  // namespace corrupt_bench
