#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "corrupt_bench/codec.hpp"
#include "corrupt_bench/corrupt.hpp"
#include "corrupt_bench/frost_textures.hpp"
#include "corrupt_bench/hash.hpp"
#include "corrupt_bench/manifest.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/resample.hpp"
#include "corrupt_bench/severity_table.hpp"

namespace corrupt_bench {

struct GenerateRequest {
  std::vector<CorruptionKind> kinds = core_kinds();
  std::vector<int> severities{1, 2, 3, 4, 5};
  std::uint64_t salt = 0;
  GenerationOptions options;
  bool resume = false;
  unsigned jobs = default_jobs();
  const FrostLibrary* frost = nullptr;  // nullptr: built-in procedural textures
};

namespace detail {

inline std::string generic_relative(const std::filesystem::path& p, const std::filesystem::path& root) {
  return std::filesystem::relative(p, root).generic_string();
}

/// Output path for one (source, kind, severity) cell, '/' separated.
inline std::string output_relative_path(const SourceRecord& src, CorruptionKind kind, int severity,
                                        const GenerationOptions& opt) {
  const std::filesystem::path p(src.path);
  const bool png = opt.lossless && kind != CorruptionKind::Jpeg;
  return std::string(name_of(kind)) + "/" + std::to_string(severity) + "/" + src.label + "/" +
         p.stem().string() + (png ? ".png" : ".jpg");
}

inline ImageBuf prepare_source(const Bytes& bytes, const GenerationOptions& opt) {
  ImageBuf img = decode_image(bytes);
  return opt.resize > 0 ? resize_center_crop(img, opt.resize) : img;
}

/// Encoded bytes of a corrupted image. The Jpeg kind is written as its own
/// compression at the table quality; others use the dataset encoding.
inline Bytes encode_output(const ImageBuf& prepared, CorruptionKind kind, int severity, std::uint64_t seed,
                           const SeverityTable& table, const FrostLibrary* frost, const GenerationOptions& opt,
                           std::optional<std::string>* frost_id = nullptr) {
  if (kind == CorruptionKind::Jpeg) {
    const int q = static_cast<int>(std::lround(table.param(kind, severity, "quality")));
    return encode_jpeg(prepared, q);
  }
  auto out = apply_corruption_traced(prepared, kind, severity, seed, table, frost);
  if (frost_id) *frost_id = out.frost_texture;
  return opt.lossless ? encode_png(out.image) : encode_jpeg(out.image, opt.jpeg_quality);
}

inline std::optional<std::string> frost_id_for(CorruptionKind kind, std::uint64_t seed, const FrostLibrary* frost) {
  if (kind != CorruptionKind::Frost) return std::nullopt;
  const FrostLibrary& lib = frost ? *frost : FrostLibrary::builtin();
  return lib.at(lib.pick_index(seed)).id;
}

}  // namespace detail

/// Writes out/<kind>/<severity>/<class>/<stem>.<ext> for every source image
/// under src/<class>/ and every requested cell, then writes out/manifest.json
/// atomically. Undecodable sources are listed in the manifest error list.
/// With resume, files that already exist are left untouched.
inline DatasetManifest generate_dataset(const std::filesystem::path& src_dir, const std::filesystem::path& out_dir,
                                        const SeverityTable& table, const GenerateRequest& req) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(src_dir)) throw Error("source directory " + src_dir.string() + " does not exist");
  if (req.kinds.empty()) throw Error("no corruption kinds requested");
  for (int s : req.severities)
    if (s < 1 || s > kSeverityCount) throw Error("severity must be in 1..5, got " + std::to_string(s));
  for (auto k : req.kinds)
    if (!table.has(k)) throw Error("severity table has no entry for " + std::string(name_of(k)));
  if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !req.resume)
    throw Error("output directory " + out_dir.string() + " is not empty (use --resume to continue)");
  fs::create_directories(out_dir);

  DatasetManifest m;
  m.severity_table = table.version();
  m.salt = req.salt;
  m.options = req.options;
  m.options.frost_source = req.frost ? req.frost->source() : FrostLibrary::builtin().source();
  m.corruptions = req.kinds;
  m.severities = req.severities;
  std::sort(m.severities.begin(), m.severities.end());
  m.severities.erase(std::unique(m.severities.begin(), m.severities.end()), m.severities.end());

  std::vector<SourceRecord> sources;
  for (const auto& cls : fs::directory_iterator(src_dir)) {
    if (!cls.is_directory()) continue;
    m.labels.push_back(cls.path().filename().string());
    for (const auto& f : fs::directory_iterator(cls.path()))
      if (f.is_regular_file() && has_image_extension(f.path()))
        sources.push_back({detail::generic_relative(f.path(), src_dir), "", cls.path().filename().string()});
  }
  std::sort(sources.begin(), sources.end(), [](const auto& a, const auto& b) { return a.path < b.path; });

  struct Work {
    std::vector<ManifestEntry> entries;
    std::optional<SourceError> error;
  };
  std::vector<Work> results(sources.size());

  // Two sources with the same stem in one class would collide on output.
  for (std::size_t i = 1; i < sources.size(); ++i) {
    const fs::path a(sources[i - 1].path), b(sources[i].path);
    if (a.parent_path() == b.parent_path() && a.stem() == b.stem())
      results[i].error = SourceError{sources[i].path, "output name collides with " + sources[i - 1].path};
  }

  parallel_for(sources.size(), req.jobs, [&](std::size_t i) {
    auto& src = sources[i];
    auto& work = results[i];
    if (work.error) return;
    Bytes bytes;
    try {
      bytes = read_file(src_dir / src.path);
    } catch (const std::exception& e) {
      work.error = SourceError{src.path, e.what()};
      return;
    }
    src.sha256 = to_hex(sha256(bytes));
    std::optional<ImageBuf> prepared;
    for (auto kind : m.corruptions)
      for (int sev : m.severities) {
        ManifestEntry e{detail::output_relative_path(src, kind, sev, m.options), src.path, kind, sev,
                        derive_seed(m.salt, src.path, kind, sev), {}};
        e.frost_texture = detail::frost_id_for(kind, e.seed, req.frost);
        const fs::path target = out_dir / e.path;
        if (!(req.resume && fs::exists(target))) {
          try {
            if (!prepared) prepared = detail::prepare_source(bytes, m.options);
            const auto encoded = detail::encode_output(*prepared, kind, sev, e.seed, table, req.frost, m.options);
            write_file_atomic(target, encoded);
          } catch (const std::exception& ex) {
            work.error = SourceError{src.path, ex.what()};
            work.entries.clear();
            return;
          }
        }
        work.entries.push_back(std::move(e));
      }
  });

  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (results[i].error) {
      m.errors.push_back(*results[i].error);
      continue;
    }
    m.sources.push_back(sources[i]);
    for (auto& e : results[i].entries) m.entries.push_back(std::move(e));
  }
  m.canonicalize();
  m.save(out_dir / "manifest.json");
  return m;
}

/// Rebuilds the encoded bytes of one manifest entry from its source file
/// alone. Throws if the source content no longer matches the recorded hash.
inline Bytes regenerate_entry(const DatasetManifest& m, const ManifestEntry& e, const std::filesystem::path& src_dir,
                              const SeverityTable& table, const FrostLibrary* frost = nullptr) {
  if (table.version() != m.severity_table)
    throw Error("manifest uses severity table " + m.severity_table + ", got " + table.version());
  const SourceRecord* src = m.find_source(e.source);
  if (!src) throw Error("entry source " + e.source + " not in manifest");
  const Bytes bytes = read_file(src_dir / src->path);
  if (to_hex(sha256(bytes)) != src->sha256) throw Error("source " + src->path + " changed since generation");
  if (derive_seed(m.salt, src->path, e.kind, e.severity) != e.seed) throw Error("entry seed does not match rule");
  return detail::encode_output(detail::prepare_source(bytes, m.options), e.kind, e.severity, e.seed, table, frost,
                               m.options);
}

/// Ten-crop evaluation views in fixed order: top-left, top-right,
/// bottom-left, bottom-right, center, then the horizontal mirror of each.
inline std::vector<ImageBuf> ten_crop(const ImageBuf& img, int crop_size) {
  const int w = img.width(), h = img.height();
  if (crop_size > std::min(w, h)) throw Error("crop size exceeds image");
  if (crop_size < ImageBuf::kMinExtent) throw Error("crop size below minimum image size");
  const int c = crop_size;
  std::vector<ImageBuf> out{crop(img, 0, 0, c, c), crop(img, w - c, 0, c, c), crop(img, 0, h - c, c, c),
                            crop(img, w - c, h - c, c, c), crop(img, (w - c) / 2, (h - c) / 2, c, c)};
  for (int i = 0; i < 5; ++i) out.push_back(mirror_horizontal(out[static_cast<std::size_t>(i)]));
  return out;
}

inline std::vector<double> average_distributions(const std::vector<std::vector<double>>& dists) {
  if (dists.empty()) throw Error("no distributions to average");
  const std::size_t n = dists.front().size();
  std::vector<double> out(n, 0.0);
  for (const auto& d : dists) {
    if (d.size() != n) throw Error("distribution length mismatch");
    const double sum = std::accumulate(d.begin(), d.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-6) throw Error("distribution does not sum to 1");
    for (std::size_t i = 0; i < n; ++i) out[i] += d[i];
  }
  for (auto& v : out) v /= static_cast<double>(dists.size());
  return out;
}

}  // namespace corrupt_bench
