#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "corrupt_bench/codec.hpp"
#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernel.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

inline constexpr int kProceduralFrostCount = 6;
inline constexpr int kProceduralFrostSize = 512;

namespace detail {

struct CrystalArm {
  double x, y, angle, length, intensity;
  int depth;
};

inline void deposit(Plane& p, double x, double y, double v) {
  const int w = p.width, h = p.height;
  const int xi = reflect_index(static_cast<int>(std::floor(x)), w);
  const int yi = reflect_index(static_cast<int>(std::floor(y)), h);
  p.at(xi, yi) = std::max(p.at(xi, yi), static_cast<float>(v));
}

}  // namespace detail

/// Ice-crystal texture grown from seeded nuclei. Each nucleus sends out six
/// arms at 60 degree spacing; arms wander slightly and spawn side branches
/// at +/-60 degrees. The deposit map is blurred into a thin core plus a wide
/// halo and tinted blue-white.
inline ImageBuf procedural_frost_texture(int index, int width, int height) {
  if (index < 0 || index >= kProceduralFrostCount) throw Error("procedural frost index out of range");
  Rng64 rng(Rng64::mix(0xf205'7e47'0000ULL + static_cast<std::uint64_t>(index)));
  Plane canvas(width, height);
  const double density = 1.0 + 0.35 * index;
  const int nuclei = std::max(4, static_cast<int>(density * width * height / (96.0 * 96.0)));
  const double reach = 28.0 + 6.0 * (index % 3);

  std::vector<detail::CrystalArm> stack;
  for (int n = 0; n < nuclei; ++n) {
    const double x = rng.uniform(0.0, width), y = rng.uniform(0.0, height);
    const double base = rng.uniform(0.0, std::numbers::pi / 3.0);
    for (int a = 0; a < 6; ++a)
      stack.push_back({x, y, base + a * std::numbers::pi / 3.0, reach * rng.uniform(0.6, 1.4), 1.0, 2});
  }
  while (!stack.empty()) {
    auto arm = stack.back();
    stack.pop_back();
    for (int step = 0; step < static_cast<int>(arm.length); ++step) {
      arm.x += std::cos(arm.angle);
      arm.y += std::sin(arm.angle);
      arm.angle += 0.06 * rng.normal();
      detail::deposit(canvas, arm.x, arm.y, arm.intensity * (1.0 - 0.5 * step / arm.length));
      if (arm.depth > 0 && step > 3 && rng.uniform() < 0.12) {
        const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
        stack.push_back({arm.x, arm.y, arm.angle + side * std::numbers::pi / 3.0,
                         (arm.length - step) * 0.55, arm.intensity * 0.8, arm.depth - 1});
      }
    }
  }

  const Plane core = gaussian_blur(canvas, 0.7);
  const Plane halo = gaussian_blur(canvas, 3.0);
  const Plane haze = gaussian_blur(canvas, 12.0);
  std::vector<float> s(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < canvas.data.size(); ++i) {
    const double v = std::clamp(1.8 * core.data[i] + 2.5 * halo.data[i] + 6.0 * haze.data[i], 0.0, 1.0);
    const double g = std::pow(v, 0.7);
    s[3 * i] = static_cast<float>(0.04 + 0.80 * g);
    s[3 * i + 1] = static_cast<float>(0.05 + 0.88 * g);
    s[3 * i + 2] = static_cast<float>(0.07 + 0.93 * g);
  }
  return ImageBuf::from_samples(width, height, std::move(s));
}

struct FrostTexture {
  std::string id;
  ImageBuf image;
};

/// Texture pool used by the frost corruption.
class FrostLibrary {
 public:
  /// The six procedural textures at max(512, needed) per side.
  static FrostLibrary procedural(int min_width = kProceduralFrostSize, int min_height = kProceduralFrostSize) {
    FrostLibrary lib;
    lib.source_ = "procedural";
    const int w = std::max(min_width, kProceduralFrostSize), h = std::max(min_height, kProceduralFrostSize);
    for (int i = 0; i < kProceduralFrostCount; ++i)
      lib.textures_.push_back({"procedural:" + std::to_string(i), procedural_frost_texture(i, w, h)});
    return lib;
  }

  /// Every PNG/JPEG directly inside `dir`, ordered by file name.
  static FrostLibrary from_directory(const std::filesystem::path& dir) {
    FrostLibrary lib;
    lib.source_ = dir.string();
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && has_image_extension(e.path())) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) lib.textures_.push_back({"file:" + f.filename().string(), read_image(f)});
    if (lib.textures_.empty()) throw Error("no frost textures in " + dir.string());
    return lib;
  }

  /// Shared 512 px procedural library.
  static const FrostLibrary& builtin() {
    static const FrostLibrary lib = procedural();
    return lib;
  }

  const std::string& source() const { return source_; }
  bool is_procedural() const { return source_ == "procedural"; }
  std::size_t size() const { return textures_.size(); }
  const FrostTexture& at(std::size_t i) const { return textures_.at(i); }

  std::size_t pick_index(std::uint64_t seed) const {
    return static_cast<std::size_t>(Rng64(seed).split("frost-texture").next_u64() % textures_.size());
  }

 private:
  std::string source_;
  std::vector<FrostTexture> textures_;
};

}  // namespace corrupt_bench
