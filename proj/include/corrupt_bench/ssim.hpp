#pragma once

#include <cmath>
#include <vector>

#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

namespace detail {

/// 11-tap Gaussian, sigma 1.5, normalized.
inline std::vector<double> ssim_window() {
  std::vector<double> t(11);
  double sum = 0.0;
  for (int i = 0; i < 11; ++i) {
    const double d = i - 5;
    t[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += t[static_cast<std::size_t>(i)];
  }
  for (double& v : t) v /= sum;
  return t;
}

/// Separable 'valid' filtering: output is (w - 10) x (h - 10).
inline std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                        const std::vector<double>& taps) {
  const int ow = w - 10, oh = h - 10;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < 11; ++i) acc += taps[static_cast<std::size_t>(i)] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < 11; ++i) acc += taps[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

}  // namespace detail

/// Mean structural similarity of the Rec.601 luminance planes.
/// 11x11 Gaussian window (sigma 1.5) evaluated at every position where it
/// fits inside the image; C1 = 0.01^2, C2 = 0.03^2 for unit range.
inline double ssim(const ImageBuf& a, const ImageBuf& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw Error("ssim: dimension mismatch");
  const int w = a.width(), h = a.height();
  if (w < 11 || h < 11) throw Error("ssim: image smaller than the 11x11 window");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const Plane ya = to_grayscale(a), yb = to_grayscale(b);
  const auto n = ya.data.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ya.data[i];
    y[i] = yb.data[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto taps = detail::ssim_window();
  const auto mx = detail::filter_valid(x, w, h, taps), my = detail::filter_valid(y, w, h, taps);
  const auto sxx = detail::filter_valid(xx, w, h, taps), syy = detail::filter_valid(yy, w, h, taps);
  const auto sxy = detail::filter_valid(xy, w, h, taps);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i], vy = syy[i] - my[i] * my[i], cov = sxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

}  // namespace corrupt_bench
