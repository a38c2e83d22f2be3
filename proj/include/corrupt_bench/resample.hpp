#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernel.hpp"

namespace corrupt_bench {

/// Bilinear sample of channel c at continuous pixel-index coordinates
/// (fx, fy); integer coordinates hit pixel centers. Taps outside the image
/// are folded with reflect_index.
inline double sample_bilinear(std::span<const float> s, int w, int h, int channels, int c,
                              double fx, double fy) {
  const double x0f = std::floor(fx), y0f = std::floor(fy);
  const double tx = fx - x0f, ty = fy - y0f;
  const int x0 = static_cast<int>(x0f), y0 = static_cast<int>(y0f);
  const int xa = reflect_index(x0, w), xb = reflect_index(x0 + 1, w);
  const int ya = reflect_index(y0, h), yb = reflect_index(y0 + 1, h);
  auto px = [&](int x, int y) {
    return static_cast<double>(s[(static_cast<std::size_t>(y) * w + x) * channels + c]);
  };
  const double top = px(xa, ya) * (1.0 - tx) + px(xb, ya) * tx;
  const double bot = px(xa, yb) * (1.0 - tx) + px(xb, yb) * tx;
  return top * (1.0 - ty) + bot * ty;
}

/// Gathers img at (x + dx, y + dy) for every pixel.
inline ImageBuf warp_bilinear(const ImageBuf& img, const Plane& dx, const Plane& dy) {
  const int w = img.width(), h = img.height();
  if (dx.width != w || dx.height != h || dy.width != w || dy.height != h)
    throw Error("displacement field size mismatch");
  std::vector<float> out(img.samples().size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        out[(static_cast<std::size_t>(y) * w + x) * 3 + c] = static_cast<float>(
            sample_bilinear(img.samples(), w, h, 3, c, x + dx.at(x, y), y + dy.at(x, y)));
  return ImageBuf::from_samples(w, h, std::move(out));
}

namespace detail {

/// Triangle-filter resampling along one axis. When downscaling the filter
/// support widens by the scale factor, which gives area-style antialiasing.
inline std::vector<float> resample_axis(std::span<const float> src, int w, int h, int channels,
                                        int out_len, int axis) {
  const int in_len = axis == 0 ? w : h;
  const double scale = static_cast<double>(in_len) / out_len;
  const double support = std::max(1.0, scale);
  const int ow = axis == 0 ? out_len : w, oh = axis == 0 ? h : out_len;
  std::vector<float> out(static_cast<std::size_t>(ow) * oh * channels);

  for (int o = 0; o < out_len; ++o) {
    const double center = (o + 0.5) * scale;
    const int lo = std::max(0, static_cast<int>(std::floor(center - support)));
    const int hi = std::min(in_len - 1, static_cast<int>(std::ceil(center + support)));
    std::vector<double> wts;
    double wsum = 0.0;
    for (int i = lo; i <= hi; ++i) {
      const double wt = std::max(0.0, 1.0 - std::fabs((i + 0.5 - center) / support));
      wts.push_back(wt);
      wsum += wt;
    }
    for (double& wt : wts) wt /= wsum;
    const int other = axis == 0 ? h : w;
    for (int j = 0; j < other; ++j) {
      for (int c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (int i = lo; i <= hi; ++i) {
          const int sx = axis == 0 ? i : j, sy = axis == 0 ? j : i;
          acc += wts[static_cast<std::size_t>(i - lo)] *
                 src[(static_cast<std::size_t>(sy) * w + sx) * channels + c];
        }
        const int dx = axis == 0 ? o : j, dy = axis == 0 ? j : o;
        out[(static_cast<std::size_t>(dy) * ow + dx) * channels + c] = static_cast<float>(acc);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Separable antialiased bilinear resize.
inline ImageBuf resize(const ImageBuf& img, int out_w, int out_h) {
  if (out_w == img.width() && out_h == img.height()) return img;
  auto tmp = detail::resample_axis(img.samples(), img.width(), img.height(), 3, out_w, 0);
  auto out = detail::resample_axis(tmp, out_w, img.height(), 3, out_h, 1);
  return ImageBuf::from_samples(out_w, out_h, std::move(out));
}

/// Scales the short side to `size`, then takes the centered size x size crop.
inline ImageBuf resize_center_crop(const ImageBuf& img, int size) {
  const int w = img.width(), h = img.height();
  const double s = static_cast<double>(size) / std::min(w, h);
  const int rw = std::max(size, static_cast<int>(std::lround(w * s)));
  const int rh = std::max(size, static_cast<int>(std::lround(h * s)));
  const ImageBuf scaled = resize(img, rw, rh);
  return crop(scaled, (rw - size) / 2, (rh - size) / 2, size, size);
}

}  // namespace corrupt_bench
