#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include "corrupt_bench/corruption_kind.hpp"
#include "corrupt_bench/frost_textures.hpp"
#include "corrupt_bench/image.hpp"
#include "corrupt_bench/kernels/blur.hpp"
#include "corrupt_bench/kernels/digital.hpp"
#include "corrupt_bench/kernels/noise.hpp"
#include "corrupt_bench/kernels/weather.hpp"
#include "corrupt_bench/severity_table.hpp"

namespace corrupt_bench {

struct CorruptionOutput {
  ImageBuf image;
  /// Set for Frost: the id of the texture that was blended in.
  std::optional<std::string> frost_texture;
};

/// Applies one kernel with an explicit parameter set. `frost_lib` defaults to
/// the built-in procedural library; procedural textures are regenerated at
/// a larger size when the image exceeds 512 px.
inline CorruptionOutput corrupt_with_params(const ImageBuf& img, CorruptionKind kind,
                                            const SeverityTable& table, int severity,
                                            std::uint64_t seed, const FrostLibrary* frost_lib = nullptr) {
  auto p = [&](std::string_view name) { return table.param(kind, severity, name); };
  auto as_int = [](double v) { return static_cast<int>(std::lround(v)); };
  using enum CorruptionKind;
  switch (kind) {
    case GaussianNoise: return {add_gaussian_noise(img, p("sigma"), seed), {}};
    case ShotNoise: return {add_shot_noise(img, p("photons"), seed), {}};
    case ImpulseNoise: return {add_impulse_noise(img, p("fraction"), seed), {}};
    case SpeckleNoise: return {add_speckle_noise(img, p("sigma"), seed), {}};
    case DefocusBlur: return {defocus_blur(img, p("radius")), {}};
    case GaussianBlur: return {gaussian_blur(img, p("sigma")), {}};
    case GlassBlur:
      return {glass_blur(img, p("sigma"), as_int(p("max_shift")), as_int(p("iterations")), seed), {}};
    case MotionBlur:
      return {motion_blur(img, p("length"), p("angle_deg") * std::numbers::pi / 180.0), {}};
    case ZoomBlur: {
      const auto ladder = zoom_ladder(p("max_zoom"), p("step"));
      return {zoom_blur(img, ladder), {}};
    }
    case Snow: {
      SnowParams sp{p("density"), p("flake_size"), p("motion_length"), p("angle_deg"), p("blend"), p("gain")};
      return {snow(img, sp, seed), {}};
    }
    case Frost: {
      const FrostLibrary& lib = frost_lib ? *frost_lib : FrostLibrary::builtin();
      const std::size_t idx = lib.pick_index(seed);
      const FrostTexture& tex = lib.at(idx);
      if (lib.is_procedural() &&
          (tex.image.width() < img.width() || tex.image.height() < img.height())) {
        const auto big = procedural_frost_texture(static_cast<int>(idx), std::max(img.width(), kProceduralFrostSize),
                                                  std::max(img.height(), kProceduralFrostSize));
        return {frost(img, big, p("blend"), seed), tex.id};
      }
      return {frost(img, tex.image, p("blend"), seed), tex.id};
    }
    case Fog: return {fog(img, p("weight"), p("roughness"), seed), {}};
    case Spatter: {
      SpatterParams sp{p("coverage"), p("blob_sigma"), p("mud") >= 0.5, p("opacity")};
      return {spatter(img, sp, seed), {}};
    }
    case Brightness: return {brightness(img, p("amount")), {}};
    case Contrast: return {contrast(img, p("factor")), {}};
    case Saturate: return {saturate(img, p("amount")), {}};
    case Elastic: return {elastic(img, p("displacement"), p("smoothing"), seed), {}};
    case Pixelate: return {pixelate(img, as_int(p("factor"))), {}};
    case Jpeg: return {jpeg_recompress(img, as_int(p("quality"))), {}};
  }
  throw Error("unknown corruption kind");
}

/// Corrupts `img` with the table's parameters for (kind, severity).
/// Severity 0 returns the input unchanged. Deterministic in
/// (img, kind, severity, seed); deterministic kinds ignore the seed.
inline CorruptionOutput apply_corruption_traced(const ImageBuf& img, CorruptionKind kind, int severity,
                                                std::uint64_t seed, const SeverityTable& table,
                                                const FrostLibrary* frost_lib = nullptr) {
  if (severity < 0 || severity > kSeverityCount)
    throw Error("severity must be in 0..5, got " + std::to_string(severity));
  if (static_cast<std::size_t>(kind) >= kKinds.size()) throw Error("unknown corruption kind");
  if (severity == 0) return {img, {}};
  return corrupt_with_params(img, kind, table, severity, seed, frost_lib);
}

inline ImageBuf apply_corruption(const ImageBuf& img, CorruptionKind kind, int severity, std::uint64_t seed,
                                 const SeverityTable& table, const FrostLibrary* frost_lib = nullptr) {
  return apply_corruption_traced(img, kind, severity, seed, table, frost_lib).image;
}

}  // namespace corrupt_bench
