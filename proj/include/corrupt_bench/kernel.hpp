#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

/// Reflect-101 border index (..., 2, 1, | 0, 1, ..., n-1, | n-2, ...).
/// Folds repeatedly, so any integer maps into [0, n).
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Square convolution kernel of side 2*radius+1 whose weights sum to 1.
class Kernel2D {
 public:
  Kernel2D(int radius, std::vector<double> weights) : radius_(radius), weights_(std::move(weights)) {
    const auto side = static_cast<std::size_t>(2 * radius + 1);
    if (radius < 0 || weights_.size() != side * side) throw Error("kernel weight count mismatch");
    const double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (std::fabs(sum - 1.0) > 1e-6) throw Error("kernel is not normalized");
  }

  /// Normalizes arbitrary nonnegative weights.
  static Kernel2D normalized(int radius, std::vector<double> weights) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0)) throw Error("kernel weights sum to zero");
    for (double& w : weights) w /= sum;
    return Kernel2D(radius, std::move(weights));
  }

  static Kernel2D identity() { return Kernel2D(0, {1.0}); }

  int radius() const { return radius_; }
  int side() const { return 2 * radius_ + 1; }
  double at(int dx, int dy) const {
    return weights_[static_cast<std::size_t>(dy + radius_) * side() + (dx + radius_)];
  }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int radius_;
  std::vector<double> weights_;
};

/// Filled disk indicator, x^2 + y^2 <= r^2, on a support of floor(r).
inline Kernel2D disk_kernel(double radius) {
  if (!(radius > 0.0)) throw Error("disk radius must be positive");
  const int r = static_cast<int>(std::floor(radius));
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) w.push_back(x * x + y * y <= radius * radius ? 1.0 : 0.0);
  return Kernel2D::normalized(r, std::move(w));
}

/// 1-D Gaussian truncated at ceil(3 sigma), normalized.
inline std::vector<double> gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) throw Error("gaussian sigma must be positive");
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    taps[static_cast<std::size_t>(i + r)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += taps[static_cast<std::size_t>(i + r)];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

inline Kernel2D gaussian_kernel(double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int r = static_cast<int>(taps.size() / 2);
  std::vector<double> w;
  w.reserve(taps.size() * taps.size());
  for (double ty : taps)
    for (double tx : taps) w.push_back(ty * tx);
  return Kernel2D::normalized(r, std::move(w));
}

/// Antialiased line segment of the given length through the origin.
/// Each cell is weighted by max(0, 1 - distance to the segment). The angle
/// is counterclockwise from +x with y pointing up on screen. The support is
/// trimmed to the smallest square holding every nonzero weight.
inline Kernel2D motion_kernel(double length, double angle) {
  if (!(length > 0.0)) throw Error("motion length must be positive");
  const double half = (length - 1.0) / 2.0;
  const double ux = std::cos(angle), uy = -std::sin(angle);
  const int r = static_cast<int>(std::ceil(std::max(half, 0.0))) + 1;
  auto weight = [&](int x, int y) {
    const double t = std::clamp(x * ux + y * uy, -std::max(half, 0.0), std::max(half, 0.0));
    const double dx = x - t * ux, dy = y - t * uy;
    return std::max(0.0, 1.0 - std::sqrt(dx * dx + dy * dy));
  };
  int used = 0;
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x)
      if (weight(x, y) > 0.0) used = std::max({used, std::abs(x), std::abs(y)});
  std::vector<double> w;
  for (int y = -used; y <= used; ++y)
    for (int x = -used; x <= used; ++x) w.push_back(weight(x, y));
  return Kernel2D::normalized(used, std::move(w));
}

namespace detail {

inline void check_kernel_fits(int radius, int width, int height) {
  if (2 * radius + 1 > std::min(width, height)) throw Error("kernel exceeds image extent");
}

/// Direct 2-D correlation with reflect padding over `channels` interleaved
/// channels. Zero taps are skipped.
inline std::vector<float> convolve_raw(std::span<const float> src, int w, int h, int channels,
                                       const Kernel2D& k) {
  struct Tap {
    int dx, dy;
    double w;
  };
  std::vector<Tap> taps;
  for (int dy = -k.radius(); dy <= k.radius(); ++dy)
    for (int dx = -k.radius(); dx <= k.radius(); ++dx)
      if (k.at(dx, dy) != 0.0) taps.push_back({dx, dy, k.at(dx, dy)});

  std::vector<float> out(src.size());
  std::vector<double> acc(static_cast<std::size_t>(channels));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (const Tap& t : taps) {
        const int sx = reflect_index(x + t.dx, w);
        const int sy = reflect_index(y + t.dy, h);
        const std::size_t base = (static_cast<std::size_t>(sy) * w + sx) * channels;
        for (int c = 0; c < channels; ++c) acc[c] += t.w * src[base + c];
      }
      const std::size_t o = (static_cast<std::size_t>(y) * w + x) * channels;
      for (int c = 0; c < channels; ++c) out[o + c] = static_cast<float>(acc[c]);
    }
  }
  return out;
}

/// Separable pass along x (axis 0) or y (axis 1) with reflect padding.
inline std::vector<float> convolve_axis(std::span<const float> src, int w, int h, int channels,
                                        const std::vector<double>& taps, int axis) {
  const int r = static_cast<int>(taps.size() / 2);
  std::vector<float> out(src.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          const int sx = axis == 0 ? reflect_index(x + i, w) : x;
          const int sy = axis == 1 ? reflect_index(y + i, h) : y;
          acc += taps[static_cast<std::size_t>(i + r)] *
                 src[(static_cast<std::size_t>(sy) * w + sx) * channels + c];
        }
        out[(static_cast<std::size_t>(y) * w + x) * channels + c] = static_cast<float>(acc);
      }
    }
  }
  return out;
}

inline std::vector<float> gaussian_raw(std::span<const float> src, int w, int h, int channels,
                                       double sigma) {
  const auto taps = gaussian_taps(sigma);
  const auto tmp = convolve_axis(src, w, h, channels, taps, 0);
  return convolve_axis(tmp, w, h, channels, taps, 1);
}

}  // namespace detail

/// Per-channel 2-D convolution with reflect padding, clamped to [0, 1].
inline ImageBuf convolve(const ImageBuf& img, const Kernel2D& k) {
  detail::check_kernel_fits(k.radius(), img.width(), img.height());
  return ImageBuf::from_samples(img.width(), img.height(),
                                detail::convolve_raw(img.samples(), img.width(), img.height(), 3, k));
}

/// Unclamped plane convolution; same border rule.
inline Plane convolve(const Plane& p, const Kernel2D& k) {
  detail::check_kernel_fits(k.radius(), p.width, p.height);
  Plane out(p.width, p.height);
  out.data = detail::convolve_raw(p.data, p.width, p.height, 1, k);
  return out;
}

/// Separable equivalent of convolve(img, gaussian_kernel(sigma)).
inline ImageBuf gaussian_blur(const ImageBuf& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  detail::check_kernel_fits(r, img.width(), img.height());
  return ImageBuf::from_samples(img.width(), img.height(),
                                detail::gaussian_raw(img.samples(), img.width(), img.height(), 3, sigma));
}

/// Gaussian smoothing for scratch planes. The border folds repeatedly, so
/// the kernel may be wider than the plane.
inline Plane gaussian_blur(const Plane& p, double sigma) {
  Plane out(p.width, p.height);
  out.data = detail::gaussian_raw(p.data, p.width, p.height, 1, sigma);
  return out;
}

}  // namespace corrupt_bench
