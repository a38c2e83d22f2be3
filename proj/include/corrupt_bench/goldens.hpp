#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrupt_bench/corrupt.hpp"
#include "corrupt_bench/hash.hpp"
#include "corrupt_bench/manifest.hpp"
#include "corrupt_bench/reference_corpus.hpp"
#include "corrupt_bench/severity_table.hpp"

namespace corrupt_bench {

inline constexpr int kGoldenImageCount = 3;
inline constexpr int kGoldenImageSize = 64;
inline constexpr int kGoldenProbeCount = 256;
inline constexpr std::uint64_t kGoldenSalt = 0x601de11a6e000001ULL;

enum class ToleranceMode { Bitwise, PerSample, DistortionBand };

inline std::string_view tolerance_name(ToleranceMode m) {
  switch (m) {
    case ToleranceMode::Bitwise: return "bitwise";
    case ToleranceMode::PerSample: return "per-sample-1e-6";
    case ToleranceMode::DistortionBand: return "distortion-band";
  }
  return "?";
}

inline ToleranceMode parse_tolerance(std::string_view s) {
  for (auto m : {ToleranceMode::Bitwise, ToleranceMode::PerSample, ToleranceMode::DistortionBand})
    if (s == tolerance_name(m)) return m;
  throw Error("unknown tolerance mode '" + std::string(s) + "'");
}

/// JPEG-dependent kernels may differ across codec builds, so they are
/// pinned by distortion only. Kernels built from integer index arithmetic
/// and exact float operations are pinned bitwise.
inline ToleranceMode tolerance_for(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::Jpeg: return ToleranceMode::DistortionBand;
    case CorruptionKind::ImpulseNoise:
    case CorruptionKind::Pixelate:
    case CorruptionKind::Brightness: return ToleranceMode::Bitwise;
    default: return ToleranceMode::PerSample;
  }
}

struct GoldenEntry {
  CorruptionKind kind;
  int severity;
  int image;
  std::string input_hash;
  std::uint64_t seed;
  ToleranceMode mode;
  std::string output_hash;                // float bit pattern hash
  std::vector<double> probes;             // samples at golden_probe_indices()
  std::array<double, 3> channel_means{};
  double mse = 0.0;                       // to the input
};

inline std::vector<ImageBuf> golden_images() {
  std::vector<ImageBuf> out;
  for (int i = 0; i < kGoldenImageCount; ++i) out.push_back(reference_image(i, kGoldenImageSize));
  return out;
}

inline std::vector<std::size_t> golden_probe_indices(std::size_t sample_count) {
  Rng64 rng(0x9e0be5ULL);
  std::vector<std::size_t> idx;
  for (int i = 0; i < kGoldenProbeCount; ++i)
    idx.push_back(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(sample_count) - 1)));
  return idx;
}

inline std::array<double, 3> channel_means(const ImageBuf& img) {
  std::array<double, 3> m{};
  const auto s = img.samples();
  for (std::size_t i = 0; i < s.size(); ++i) m[i % 3] += s[i];
  for (auto& v : m) v /= static_cast<double>(img.pixel_count());
  return m;
}

inline GoldenEntry make_golden(const ImageBuf& input, int image_index, CorruptionKind kind, int severity,
                               const SeverityTable& table) {
  const auto seed = derive_seed(kGoldenSalt, "golden/" + std::to_string(image_index), kind, severity);
  const ImageBuf out = apply_corruption(input, kind, severity, seed, table);
  GoldenEntry g{kind, severity, image_index, pixel_hash(input), seed, tolerance_for(kind), sample_bits_hash(out),
                {}, channel_means(out), mean_squared_error(input, out)};
  const auto s = out.samples();
  for (auto i : golden_probe_indices(s.size())) g.probes.push_back(s[i]);
  return g;
}

struct GoldenSet {
  std::string table_version;
  std::vector<GoldenEntry> entries;

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& g : entries)
      arr.push_back({{"kernel", std::string(name_of(g.kind)) + "/" + std::to_string(g.severity)},
                     {"image", g.image},
                     {"input_hash", g.input_hash},
                     {"seed", hex_u64(g.seed)},
                     {"mode", tolerance_name(g.mode)},
                     {"output_hash", g.output_hash},
                     {"probes", g.probes},
                     {"channel_means", g.channel_means},
                     {"mse", g.mse}});
    return {{"format", "corrupt-bench-goldens/1"},
            {"severity_table", table_version},
            {"image_size", kGoldenImageSize},
            {"entries", arr}};
  }

  static GoldenSet from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "corrupt-bench-goldens/1") throw Error("not a goldens file");
    GoldenSet s{j.at("severity_table").get<std::string>(), {}};
    for (const auto& e : j.at("entries")) {
      const auto kernel = e.at("kernel").get<std::string>();
      const auto slash = kernel.find('/');
      if (slash == std::string::npos) throw Error("bad golden kernel id " + kernel);
      GoldenEntry g{parse_kind(kernel.substr(0, slash)),
                    std::stoi(kernel.substr(slash + 1)),
                    e.at("image").get<int>(),
                    e.at("input_hash").get<std::string>(),
                    parse_hex_u64(e.at("seed").get<std::string>()),
                    parse_tolerance(e.at("mode").get<std::string>()),
                    e.at("output_hash").get<std::string>(),
                    e.at("probes").get<std::vector<double>>(),
                    e.at("channel_means").get<std::array<double, 3>>(),
                    e.at("mse").get<double>()};
      s.entries.push_back(std::move(g));
    }
    return s;
  }

  static GoldenSet load(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
  }
};

/// Every kind in the table at every severity on the golden images.
inline GoldenSet build_goldens(const SeverityTable& table) {
  GoldenSet s{table.version(), {}};
  const auto images = golden_images();
  for (const auto& k : kKinds) {
    if (!table.has(k.kind)) continue;
    for (int sev = 1; sev <= kSeverityCount; ++sev)
      for (int i = 0; i < kGoldenImageCount; ++i)
        s.entries.push_back(make_golden(images[static_cast<std::size_t>(i)], i, k.kind, sev, table));
  }
  return s;
}

inline constexpr double kGoldenSampleTolerance = 1e-6;
inline constexpr double kGoldenBandRelative = 0.10;

/// Returns a description of the mismatch, or an empty string.
inline std::string check_golden(const GoldenEntry& g, const ImageBuf& input, const SeverityTable& table) {
  if (pixel_hash(input) != g.input_hash) return "input image changed";
  const auto seed = derive_seed(kGoldenSalt, "golden/" + std::to_string(g.image), g.kind, g.severity);
  if (seed != g.seed) return "seed rule changed";
  const ImageBuf out = apply_corruption(input, g.kind, g.severity, seed, table);
  switch (g.mode) {
    case ToleranceMode::Bitwise:
      return sample_bits_hash(out) == g.output_hash ? "" : "output bits differ";
    case ToleranceMode::PerSample: {
      const auto s = out.samples();
      const auto idx = golden_probe_indices(s.size());
      if (idx.size() != g.probes.size()) return "probe count differs";
      for (std::size_t i = 0; i < idx.size(); ++i)
        if (std::fabs(s[idx[i]] - g.probes[i]) > kGoldenSampleTolerance)
          return "sample " + std::to_string(idx[i]) + " off by " + std::to_string(std::fabs(s[idx[i]] - g.probes[i]));
      const auto m = channel_means(out);
      for (int c = 0; c < 3; ++c)
        if (std::fabs(m[static_cast<std::size_t>(c)] - g.channel_means[static_cast<std::size_t>(c)]) >
            kGoldenSampleTolerance)
          return "channel mean " + std::to_string(c) + " differs";
      return "";
    }
    case ToleranceMode::DistortionBand: {
      const double mse = mean_squared_error(input, out);
      return std::fabs(mse - g.mse) <= kGoldenBandRelative * g.mse ? "" : "distortion outside band";
    }
  }
  return "unknown mode";
}

struct GoldenFailure {
  std::string kernel;
  int image;
  std::string reason;
};

inline std::vector<GoldenFailure> check_goldens(const GoldenSet& set, const SeverityTable& table) {
  if (set.table_version != table.version())
    throw Error("goldens were built for table " + set.table_version + ", got " + table.version());
  const auto images = golden_images();
  std::vector<GoldenFailure> out;
  for (const auto& g : set.entries) {
    if (g.image < 0 || g.image >= kGoldenImageCount) throw Error("golden image index out of range");
    auto why = check_golden(g, images[static_cast<std::size_t>(g.image)], table);
    if (!why.empty())
      out.push_back({std::string(name_of(g.kind)) + "/" + std::to_string(g.severity), g.image, std::move(why)});
  }
  return out;
}

}  // namespace corrupt_bench
