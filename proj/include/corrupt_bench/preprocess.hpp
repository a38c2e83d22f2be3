#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernel.hpp"

namespace corrupt_bench {

struct ClaheParams {
  int tiles_x = 8;
  int tiles_y = 8;
  double clip_limit = 2.0;  // multiple of the uniform bin height; infinity disables clipping
  int bins = 256;

  void validate() const {
    if (tiles_x < 2 || tiles_y < 2) throw Error("CLAHE needs at least 2x2 tiles");
    if (!(clip_limit >= 1.0)) throw Error("CLAHE clip limit must be >= 1");
    if (bins < 2) throw Error("CLAHE needs at least 2 bins");
  }
};

/// Per-tile luminance transfer function. Identity tiles map Y to itself.
struct TileMapping {
  bool identity = false;
  std::vector<double> lut;

  double operator()(double y, int bins) const {
    if (identity) return y;
    return lut[static_cast<std::size_t>(std::clamp(static_cast<int>(y * bins), 0, bins - 1))];
  }
};

namespace detail {

inline int luminance_bin(double y, int bins) { return std::clamp(static_cast<int>(y * bins), 0, bins - 1); }

/// Clipped, redistributed, normalized CDF of the luminance values in one
/// tile. Tiles whose luminance occupies a single bin get the identity.
inline TileMapping tile_mapping(const Plane& y, int x0, int x1, int y0, int y1, const ClaheParams& p) {
  std::vector<double> hist(static_cast<std::size_t>(p.bins), 0.0);
  int lo = p.bins, hi = -1;
  for (int yy = y0; yy < y1; ++yy)
    for (int xx = x0; xx < x1; ++xx) {
      const int b = luminance_bin(y.at(xx, yy), p.bins);
      hist[static_cast<std::size_t>(b)] += 1.0;
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
  if (lo == hi) return {true, {}};
  const double n = static_cast<double>(x1 - x0) * (y1 - y0);
  if (std::isfinite(p.clip_limit)) {
    const double clip = std::max(1.0, p.clip_limit * n / p.bins);
    double excess = 0.0;
    for (auto& h : hist)
      if (h > clip) {
        excess += h - clip;
        h = clip;
      }
    const double share = excess / p.bins;
    for (auto& h : hist) h += share;
  }
  TileMapping m{false, std::vector<double>(hist.size())};
  double cdf = 0.0;
  for (std::size_t b = 0; b < hist.size(); ++b) {
    cdf += hist[b];
    m.lut[b] = std::min(1.0, cdf / n);
  }
  return m;
}

}  // namespace detail

/// Contrast-limited adaptive histogram equalization of the luminance
/// channel. Mappings are interpolated bilinearly between tile centres; the
/// luminance change is added back to each RGB channel.
inline ImageBuf clahe(const ImageBuf& img, const ClaheParams& p = {}) {
  p.validate();
  const int w = img.width(), h = img.height();
  if (w < p.tiles_x || h < p.tiles_y) throw Error("image smaller than CLAHE tile grid");
  const Plane y = to_grayscale(img);
  auto edge_x = [&](int i) { return static_cast<int>(static_cast<long long>(i) * w / p.tiles_x); };
  auto edge_y = [&](int j) { return static_cast<int>(static_cast<long long>(j) * h / p.tiles_y); };

  std::vector<TileMapping> maps;
  std::vector<double> cx(static_cast<std::size_t>(p.tiles_x)), cy(static_cast<std::size_t>(p.tiles_y));
  for (int i = 0; i < p.tiles_x; ++i) cx[static_cast<std::size_t>(i)] = (edge_x(i) + edge_x(i + 1)) / 2.0;
  for (int j = 0; j < p.tiles_y; ++j) cy[static_cast<std::size_t>(j)] = (edge_y(j) + edge_y(j + 1)) / 2.0;
  for (int j = 0; j < p.tiles_y; ++j)
    for (int i = 0; i < p.tiles_x; ++i)
      maps.push_back(detail::tile_mapping(y, edge_x(i), edge_x(i + 1), edge_y(j), edge_y(j + 1), p));
  auto tile = [&](int i, int j) -> const TileMapping& {
    return maps[static_cast<std::size_t>(j) * p.tiles_x + i];
  };

  // Neighbouring tile pair and blend weight along one axis.
  auto locate = [](const std::vector<double>& centres, double pos, int& i0, int& i1, double& t) {
    const int n = static_cast<int>(centres.size());
    if (pos <= centres.front()) {
      i0 = i1 = 0;
      t = 0.0;
    } else if (pos >= centres.back()) {
      i0 = i1 = n - 1;
      t = 0.0;
    } else {
      i1 = 1;
      while (centres[static_cast<std::size_t>(i1)] < pos) ++i1;
      i0 = i1 - 1;
      t = (pos - centres[static_cast<std::size_t>(i0)]) /
          (centres[static_cast<std::size_t>(i1)] - centres[static_cast<std::size_t>(i0)]);
    }
  };

  std::vector<float> out(img.samples().begin(), img.samples().end());
  for (int yy = 0; yy < h; ++yy) {
    int j0, j1;
    double ty;
    locate(cy, yy + 0.5, j0, j1, ty);
    for (int xx = 0; xx < w; ++xx) {
      int i0, i1;
      double tx;
      locate(cx, xx + 0.5, i0, i1, tx);
      const double v = y.at(xx, yy);
      const double top = (1 - tx) * tile(i0, j0)(v, p.bins) + tx * tile(i1, j0)(v, p.bins);
      const double bottom = (1 - tx) * tile(i0, j1)(v, p.bins) + tx * tile(i1, j1)(v, p.bins);
      const double delta = (1 - ty) * top + ty * bottom - v;
      for (int c = 0; c < 3; ++c) {
        auto& s = out[(static_cast<std::size_t>(yy) * w + xx) * 3 + c];
        s = static_cast<float>(s + delta);
      }
    }
  }
  return ImageBuf::from_samples(w, h, std::move(out));
}

/// Standard deviation of white noise in the luma of an RGB image with
/// independent per-channel noise of unit variance.
inline const double kLumaNoiseGain = std::sqrt(kLumaR * kLumaR + kLumaG * kLumaG + kLumaB * kLumaB);

/// Additive Gaussian noise level from the finest diagonal Haar detail band
/// of luminance: median(|HH|) / 0.6745, rescaled to per-channel sigma.
inline double estimate_noise_sigma(const ImageBuf& img) {
  if (img.width() < 16 || img.height() < 16) throw Error("noise estimation needs at least 16x16");
  const Plane y = to_grayscale(img);
  std::vector<double> hh;
  hh.reserve(static_cast<std::size_t>(y.width / 2) * (y.height / 2));
  for (int by = 0; by + 1 < y.height; by += 2)
    for (int bx = 0; bx + 1 < y.width; bx += 2)
      hh.push_back(std::fabs(y.at(bx, by) - y.at(bx + 1, by) - y.at(bx, by + 1) + y.at(bx + 1, by + 1)) / 2.0);
  auto mid = hh.begin() + static_cast<std::ptrdiff_t>(hh.size() / 2);
  std::nth_element(hh.begin(), mid, hh.end());
  double med = *mid;
  if (hh.size() % 2 == 0) med = (med + *std::max_element(hh.begin(), mid)) / 2.0;
  return med / 0.6745 / kLumaNoiseGain;
}

struct NlMeansParams {
  int patch_radius = 2;
  int search_radius = 7;
  double h_factor = 0.45;  // filtering strength h = h_factor * sigma

  void validate() const {
    if (patch_radius < 1) throw Error("NL-means patch radius must be >= 1");
    if (search_radius < patch_radius) throw Error("NL-means search radius must be >= patch radius");
    if (!(h_factor > 0.0)) throw Error("NL-means strength factor must be positive");
  }
};

/// Non-local means with noise level sigma. Patch distance d^2 is the mean
/// squared difference over the patch and channels; weights are
/// exp(-max(d^2 - 2 sigma^2, 0) / h^2) normalized over the search window.
inline ImageBuf nl_means(const ImageBuf& img, double sigma, const NlMeansParams& p = {}) {
  p.validate();
  if (!(sigma > 0.0)) return img;
  const int w = img.width(), h = img.height();
  const auto src = img.samples();
  const double h2 = (p.h_factor * sigma) * (p.h_factor * sigma);
  const double bias = 2.0 * sigma * sigma;
  const int pr = p.patch_radius;
  const double patch_area = static_cast<double>((2 * pr + 1) * (2 * pr + 1));
  auto px = [&](int x, int y, int c) {
    return static_cast<double>(src[(static_cast<std::size_t>(reflect_index(y, h)) * w + reflect_index(x, w)) * 3 + c]);
  };

  // Padded so that patch sums near the border see reflected samples.
  const int pw = w + 2 * pr, ph = h + 2 * pr;
  std::vector<double> diff(static_cast<std::size_t>(pw) * ph);
  std::vector<double> integral(static_cast<std::size_t>(pw + 1) * (ph + 1));
  std::vector<double> acc(src.size(), 0.0), wsum(static_cast<std::size_t>(w) * h, 0.0);

  for (int oy = -p.search_radius; oy <= p.search_radius; ++oy)
    for (int ox = -p.search_radius; ox <= p.search_radius; ++ox) {
      for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x) {
          double d = 0.0;
          for (int c = 0; c < 3; ++c) {
            const double e = px(x - pr, y - pr, c) - px(x - pr + ox, y - pr + oy, c);
            d += e * e;
          }
          diff[static_cast<std::size_t>(y) * pw + x] = d / 3.0;
        }
      for (int y = 0; y < ph; ++y) {
        double row = 0.0;
        for (int x = 0; x < pw; ++x) {
          row += diff[static_cast<std::size_t>(y) * pw + x];
          integral[static_cast<std::size_t>(y + 1) * (pw + 1) + x + 1] =
              integral[static_cast<std::size_t>(y) * (pw + 1) + x + 1] + row;
        }
      }
      auto box = [&](int x0, int y0, int x1, int y1) {  // inclusive-exclusive in padded coordinates
        return integral[static_cast<std::size_t>(y1) * (pw + 1) + x1] - integral[static_cast<std::size_t>(y0) * (pw + 1) + x1] -
               integral[static_cast<std::size_t>(y1) * (pw + 1) + x0] + integral[static_cast<std::size_t>(y0) * (pw + 1) + x0];
      };
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double d2 = box(x, y, x + 2 * pr + 1, y + 2 * pr + 1) / patch_area;
          const double wt = std::exp(-std::max(d2 - bias, 0.0) / h2);
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          wsum[i] += wt;
          for (int c = 0; c < 3; ++c) acc[i * 3 + c] += wt * px(x + ox, y + oy, c);
        }
    }

  std::vector<float> out(src.size());
  for (std::size_t i = 0; i < wsum.size(); ++i)
    for (int c = 0; c < 3; ++c) out[i * 3 + c] = static_cast<float>(acc[i * 3 + c] / wsum[i]);
  return ImageBuf::from_samples(w, h, std::move(out));
}

inline constexpr double kDenoiseGate = 0.01;

/// NL-means at the estimated noise level, or the input itself when the
/// estimate is below the gate.
inline ImageBuf denoise_gated(const ImageBuf& img, const NlMeansParams& p = {}, double gate = kDenoiseGate) {
  p.validate();
  const double sigma = estimate_noise_sigma(img);
  if (sigma < gate) return img;
  return nl_means(img, sigma, p);
}

}  // namespace corrupt_bench
