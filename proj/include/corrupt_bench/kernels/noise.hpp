#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "corrupt_bench/image.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

/// out = clamp(img + N(0, sigma^2)), one draw per sample in storage order.
inline ImageBuf add_gaussian_noise(const ImageBuf& img, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw Error("gaussian noise sigma must be positive");
  Rng64 rng(seed);
  std::vector<float> s(img.samples().begin(), img.samples().end());
  for (float& v : s) v = static_cast<float>(v + sigma * rng.normal());
  return ImageBuf::from_samples(img.width(), img.height(), std::move(s));
}

/// out = clamp(Poisson(img * photons) / photons).
inline ImageBuf add_shot_noise(const ImageBuf& img, double photons, std::uint64_t seed) {
  if (!(photons > 0.0)) throw Error("shot noise photon scale must be positive");
  Rng64 rng(seed);
  std::vector<float> s(img.samples().begin(), img.samples().end());
  for (float& v : s) v = static_cast<float>(static_cast<double>(rng.poisson(v * photons)) / photons);
  return ImageBuf::from_samples(img.width(), img.height(), std::move(s));
}

/// Replaces round(fraction * samples) samples, chosen without replacement
/// by a partial Fisher-Yates shuffle, with 0 or 1 (fair coin per sample).
/// Channels are hit independently.
inline ImageBuf add_impulse_noise(const ImageBuf& img, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("impulse fraction must be in [0, 1]");
  Rng64 rng(seed);
  std::vector<float> s(img.samples().begin(), img.samples().end());
  const auto n = s.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                            static_cast<std::int64_t>(n - 1)));
    std::swap(idx[i], idx[j]);
    s[idx[i]] = rng.uniform() < 0.5 ? 0.0f : 1.0f;
  }
  return ImageBuf::from_samples(img.width(), img.height(), std::move(s));
}

/// out = clamp(img + img * N(0, sigma^2)). Noise scales with intensity.
inline ImageBuf add_speckle_noise(const ImageBuf& img, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw Error("speckle sigma must be positive");
  Rng64 rng(seed);
  std::vector<float> s(img.samples().begin(), img.samples().end());
  for (float& v : s) v = static_cast<float>(v + v * sigma * rng.normal());
  return ImageBuf::from_samples(img.width(), img.height(), std::move(s));
}

}  // namespace corrupt_bench
