#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "test_util.hpp"

// Reference implementations written against the documented contracts,
// sharing no code with the library.
namespace cbtest {

inline double u53(std::mt19937_64& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

/// Bilinear gather with reflect-101 borders.
inline double bilinear(const ImageBuf& img, int c, double fx, double fy) {
  const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
  const double tx = fx - x0, ty = fy - y0;
  auto p = [&](int x, int y) { return static_cast<double>(img.at(mirror(x, img.width()), mirror(y, img.height()), c)); };
  return (1 - ty) * ((1 - tx) * p(x0, y0) + tx * p(x0 + 1, y0)) + ty * ((1 - tx) * p(x0, y0 + 1) + tx * p(x0 + 1, y0 + 1));
}

/// Expected samples, interleaved RGB, row-major.
using Samples = std::vector<double>;

inline std::size_t sample_index(const ImageBuf& img, int x, int y, int c) {
  return (static_cast<std::size_t>(y) * img.width() + x) * 3 + c;
}

inline double max_deviation(const ImageBuf& out, const Samples& expected) {
  double m = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) m = std::max(m, std::fabs(out.samples()[i] - expected[i]));
  return m;
}

/// Average of centered crops of extent size/f stretched back to full size.
inline Samples zoom_oracle(const ImageBuf& img, const std::vector<double>& factors) {
  const int w = img.width(), h = img.height();
  Samples out(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (double f : factors) {
          const double cw = w / f, ch = h / f;
          const double fx = (w - cw) / 2.0 + (x + 0.5) * cw / w - 0.5;
          const double fy = (h - ch) / 2.0 + (y + 0.5) * ch / h - 0.5;
          acc += bilinear(img, c, fx, fy);
        }
        out[sample_index(img, x, y, c)] = acc / static_cast<double>(factors.size());
      }
  return out;
}

/// Mean over each factor x factor block, edge blocks truncated.
inline Samples pixelate_oracle(const ImageBuf& img, int f) {
  const int w = img.width(), h = img.height();
  Samples out(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const int bx = x / f * f, by = y / f * f;
        double acc = 0;
        int n = 0;
        for (int yy = by; yy < std::min(h, by + f); ++yy)
          for (int xx = bx; xx < std::min(w, bx + f); ++xx, ++n) acc += img.at(xx, yy, c);
        out[sample_index(img, x, y, c)] = acc / n;
      }
  return out;
}

/// Field: uniform [-1, 1] draws (all dx, then all dy) rounded to float,
/// blurred with a 3-sigma truncated Gaussian under reflect borders, scaled
/// by the displacement, then a bilinear gather at (x + dx, y + dy).
inline Samples elastic_oracle(const ImageBuf& img, double disp, double smooth, std::uint64_t seed) {
  const int w = img.width(), h = img.height();
  const auto n = static_cast<std::size_t>(w) * h;
  std::mt19937_64 e(seed);
  std::vector<double> rx(n), ry(n);
  for (auto& v : rx) v = static_cast<float>(-1.0 + 2.0 * u53(e));
  for (auto& v : ry) v = static_cast<float>(-1.0 + 2.0 * u53(e));
  const int r = static_cast<int>(std::ceil(3 * smooth));
  std::vector<double> taps;
  double tsum = 0;
  for (int i = -r; i <= r; ++i) {
    taps.push_back(std::exp(-i * i / (2 * smooth * smooth)));
    tsum += taps.back();
  }
  for (auto& t : taps) t /= tsum;
  auto blur = [&](const std::vector<double>& f) {
    std::vector<double> out(n);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double acc = 0;
        for (int j = -r; j <= r; ++j)
          for (int i = -r; i <= r; ++i)
            acc += taps[static_cast<std::size_t>(i + r)] * taps[static_cast<std::size_t>(j + r)] *
                   f[static_cast<std::size_t>(mirror(y + j, h) * w + mirror(x + i, w))];
        out[static_cast<std::size_t>(y * w + x)] = acc * disp;
      }
    return out;
  };
  const auto dx = blur(rx), dy = blur(ry);
  Samples out(n * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const auto i = static_cast<std::size_t>(y * w + x);
        out[sample_index(img, x, y, c)] = bilinear(img, c, x + dx[i], y + dy[i]);
      }
  return out;
}

/// 5x5 diamond-square with every point listed in the documented draw order.
inline std::array<float, 25> diamond_square_5x5(std::uint64_t seed, double roughness) {
  std::mt19937_64 e(seed);
  std::array<float, 25> g{};
  auto at = [&](int x, int y) -> float& { return g[static_cast<std::size_t>(y * 5 + x)]; };
  at(0, 0) = static_cast<float>(u53(e));
  at(4, 0) = static_cast<float>(u53(e));
  at(0, 4) = static_cast<float>(u53(e));
  at(4, 4) = static_cast<float>(u53(e));
  auto diamond = [&](int x, int y, int d, double scale) {
    const double avg = (static_cast<double>(at(x - d, y - d)) + at(x + d, y - d) + at(x - d, y + d) + at(x + d, y + d)) / 4.0;
    at(x, y) = static_cast<float>(avg + scale * (u53(e) - 0.5));
  };
  auto square = [&](int x, int y, int d, double scale) {
    double sum = 0;
    int n = 0;
    const int nx[4] = {x - d, x + d, x, x}, ny[4] = {y, y, y - d, y + d};
    for (int i = 0; i < 4; ++i)
      if (nx[i] >= 0 && nx[i] < 5 && ny[i] >= 0 && ny[i] < 5) {
        sum += at(nx[i], ny[i]);
        ++n;
      }
    at(x, y) = static_cast<float>(sum / n + scale * (u53(e) - 0.5));
  };
  diamond(2, 2, 2, 1.0);
  for (auto [x, y] : std::vector<std::pair<int, int>>{{2, 0}, {0, 2}, {4, 2}, {2, 4}}) square(x, y, 2, 1.0);
  for (auto [x, y] : std::vector<std::pair<int, int>>{{1, 1}, {3, 1}, {1, 3}, {3, 3}}) diamond(x, y, 1, roughness);
  for (auto [x, y] : std::vector<std::pair<int, int>>{{1, 0}, {3, 0}, {0, 1}, {2, 1}, {4, 1}, {1, 2}, {3, 2},
                                                      {0, 3}, {2, 3}, {4, 3}, {1, 4}, {3, 4}})
    square(x, y, 1, roughness);
  return g;
}

}  // namespace cbtest
