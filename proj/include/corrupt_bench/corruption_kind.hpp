#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

enum class CorruptionKind : std::uint8_t {
  GaussianNoise,
  ShotNoise,
  ImpulseNoise,
  DefocusBlur,
  GlassBlur,
  MotionBlur,
  ZoomBlur,
  Snow,
  Frost,
  Fog,
  Brightness,
  Contrast,
  Elastic,
  Pixelate,
  Jpeg,
  SpeckleNoise,
  GaussianBlur,
  Spatter,
  Saturate,
};

enum class Category : std::uint8_t { Noise, Blur, Weather, Digital };
enum class BenchmarkSet : std::uint8_t { Core, Extra };

struct KindInfo {
  CorruptionKind kind;
  std::string_view name;
  Category category;
  BenchmarkSet set;
  /// False when the kernel ignores its seed.
  bool stochastic;
};

inline constexpr int kKindCount = 19;
inline constexpr int kCoreKindCount = 15;
inline constexpr int kSeverityCount = 5;

// Ordered as the benchmark's reporting columns, core kinds first.
inline constexpr std::array<KindInfo, kKindCount> kKinds{{
    {CorruptionKind::GaussianNoise, "gaussian_noise", Category::Noise, BenchmarkSet::Core, true},
    {CorruptionKind::ShotNoise, "shot_noise", Category::Noise, BenchmarkSet::Core, true},
    {CorruptionKind::ImpulseNoise, "impulse_noise", Category::Noise, BenchmarkSet::Core, true},
    {CorruptionKind::DefocusBlur, "defocus_blur", Category::Blur, BenchmarkSet::Core, false},
    {CorruptionKind::GlassBlur, "glass_blur", Category::Blur, BenchmarkSet::Core, true},
    {CorruptionKind::MotionBlur, "motion_blur", Category::Blur, BenchmarkSet::Core, false},
    {CorruptionKind::ZoomBlur, "zoom_blur", Category::Blur, BenchmarkSet::Core, false},
    {CorruptionKind::Snow, "snow", Category::Weather, BenchmarkSet::Core, true},
    {CorruptionKind::Frost, "frost", Category::Weather, BenchmarkSet::Core, true},
    {CorruptionKind::Fog, "fog", Category::Weather, BenchmarkSet::Core, true},
    {CorruptionKind::Brightness, "brightness", Category::Weather, BenchmarkSet::Core, false},
    {CorruptionKind::Contrast, "contrast", Category::Digital, BenchmarkSet::Core, false},
    {CorruptionKind::Elastic, "elastic_transform", Category::Digital, BenchmarkSet::Core, true},
    {CorruptionKind::Pixelate, "pixelate", Category::Digital, BenchmarkSet::Core, false},
    {CorruptionKind::Jpeg, "jpeg_compression", Category::Digital, BenchmarkSet::Core, false},
    {CorruptionKind::SpeckleNoise, "speckle_noise", Category::Noise, BenchmarkSet::Extra, true},
    {CorruptionKind::GaussianBlur, "gaussian_blur", Category::Blur, BenchmarkSet::Extra, false},
    {CorruptionKind::Spatter, "spatter", Category::Weather, BenchmarkSet::Extra, true},
    {CorruptionKind::Saturate, "saturate", Category::Digital, BenchmarkSet::Extra, false},
}};

inline constexpr const KindInfo& info(CorruptionKind k) { return kKinds[static_cast<std::size_t>(k)]; }
inline constexpr std::string_view name_of(CorruptionKind k) { return info(k).name; }
inline constexpr bool is_core(CorruptionKind k) { return info(k).set == BenchmarkSet::Core; }
inline constexpr std::size_t index_of(CorruptionKind k) { return static_cast<std::size_t>(k); }

inline std::optional<CorruptionKind> kind_from_name(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  return std::nullopt;
}

inline CorruptionKind parse_kind(std::string_view name) {
  if (auto k = kind_from_name(name)) return *k;
  throw Error("unknown corruption kind '" + std::string(name) + "'");
}

inline std::string_view category_name(Category c) {
  switch (c) {
    case Category::Noise: return "noise";
    case Category::Blur: return "blur";
    case Category::Weather: return "weather";
    case Category::Digital: return "digital";
  }
  return "?";
}

inline std::vector<CorruptionKind> core_kinds() {
  std::vector<CorruptionKind> v;
  for (const auto& k : kKinds)
    if (k.set == BenchmarkSet::Core) v.push_back(k.kind);
  return v;
}

inline std::vector<CorruptionKind> extra_kinds() {
  std::vector<CorruptionKind> v;
  for (const auto& k : kKinds)
    if (k.set == BenchmarkSet::Extra) v.push_back(k.kind);
  return v;
}

inline std::vector<CorruptionKind> all_kinds() {
  std::vector<CorruptionKind> v;
  for (const auto& k : kKinds) v.push_back(k.kind);
  return v;
}

/// "core", "extra", "all", or a comma-separated list of kind names.
inline std::vector<CorruptionKind> parse_kind_set(std::string_view spec) {
  if (spec == "core") return core_kinds();
  if (spec == "extra") return extra_kinds();
  if (spec == "all") return all_kinds();
  std::vector<CorruptionKind> v;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const auto part = spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos);
    if (!part.empty()) v.push_back(parse_kind(part));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (v.empty()) throw Error("empty corruption list");
  return v;
}

}  // namespace corrupt_bench
