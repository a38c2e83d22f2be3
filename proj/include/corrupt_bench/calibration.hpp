#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "corrupt_bench/corrupt.hpp"
#include "corrupt_bench/hash.hpp"
#include "corrupt_bench/parallel.hpp"
#include "corrupt_bench/reference_corpus.hpp"
#include "corrupt_bench/severity_table.hpp"
#include "corrupt_bench/ssim.hpp"

namespace corrupt_bench {

inline constexpr int kMinCalibrationCorpus = 50;
inline constexpr std::uint64_t kCalibrationSalt = 0xca11b4a7e0000001ULL;

using SeverityCurve = std::array<double, kSeverityCount>;

/// Half-open interval [lo, hi) of mean (1 - SSIM).
struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v < hi; }
};

/// Target distortion intervals per (kind, severity), tied to one table
/// version and one corpus fingerprint.
struct CalibrationBands {
  std::string version;
  std::string corpus_fingerprint;
  std::map<CorruptionKind, std::array<Band, kSeverityCount>> bands;

  /// Bands centered on measured means: edges at midpoints between adjacent
  /// severities, outer edges mirrored (lower edge floored at 0).
  static CalibrationBands from_curves(std::string version, std::string fingerprint,
                                      const std::map<CorruptionKind, SeverityCurve>& curves) {
    CalibrationBands b{std::move(version), std::move(fingerprint), {}};
    for (const auto& [kind, m] : curves) {
      std::array<Band, kSeverityCount> row{};
      for (int s = 0; s < kSeverityCount; ++s) {
        const double lo = s == 0 ? std::max(0.0, m[0] - (m[1] - m[0]) / 2.0) : (m[s - 1] + m[s]) / 2.0;
        const double hi = s == kSeverityCount - 1 ? m[s] + (m[s] - m[s - 1]) / 2.0 : (m[s] + m[s + 1]) / 2.0;
        row[static_cast<std::size_t>(s)] = {lo, hi};
      }
      b.bands[kind] = row;
    }
    return b;
  }

  /// Each kind's intervals must be nonempty, disjoint and increasing.
  std::vector<std::string> invariant_violations() const {
    std::vector<std::string> out;
    for (const auto& [kind, row] : bands)
      for (int s = 0; s < kSeverityCount; ++s) {
        const auto& b = row[static_cast<std::size_t>(s)];
        if (!(b.lo < b.hi)) out.push_back(std::string(name_of(kind)) + " band " + std::to_string(s + 1) + " empty");
        if (s > 0 && b.lo < row[static_cast<std::size_t>(s - 1)].hi)
          out.push_back(std::string(name_of(kind)) + " bands " + std::to_string(s) + "/" + std::to_string(s + 1) +
                        " overlap");
      }
    return out;
  }

  std::string serialize() const {
    std::ostringstream out;
    out.precision(10);
    out << "version = " << version << "\n";
    out << "corpus_fingerprint = " << corpus_fingerprint << "\n";
    for (const auto& [kind, row] : bands) {
      out << name_of(kind) << " =";
      for (const auto& b : row) out << " " << b.lo << " " << b.hi;
      out << "\n";
    }
    return out.str();
  }

  static CalibrationBands parse(std::string_view text) {
    CalibrationBands b;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::istringstream key_in(line.substr(0, eq)), val_in(line.substr(eq + 1));
      std::string key;
      key_in >> key;
      if (key == "version") {
        val_in >> b.version;
      } else if (key == "corpus_fingerprint") {
        val_in >> b.corpus_fingerprint;
      } else {
        std::array<Band, kSeverityCount> row{};
        for (auto& band : row)
          if (!(val_in >> band.lo >> band.hi)) throw Error("bands: expected 10 numbers for " + key);
        b.bands[parse_kind(key)] = row;
      }
    }
    if (b.version.empty()) throw Error("bands file has no version");
    return b;
  }

  static CalibrationBands load(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
};

/// Mean over the corpus of 1 - SSIM(clean, corrupted), per severity.
/// Image i uses seed derive_seed(kCalibrationSalt, "corpus/<i>", kind, s).
inline std::map<CorruptionKind, SeverityCurve> measure_distortion(const SeverityTable& table,
                                                                  const std::vector<ImageBuf>& corpus,
                                                                  const std::vector<CorruptionKind>& kinds,
                                                                  unsigned jobs = default_jobs()) {
  const std::size_t cells = kinds.size() * kSeverityCount;
  std::vector<double> per(corpus.size() * cells, 0.0);
  parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    const std::string id = "corpus/" + std::to_string(i);
    for (std::size_t k = 0; k < kinds.size(); ++k)
      for (int s = 1; s <= kSeverityCount; ++s) {
        const auto seed = derive_seed(kCalibrationSalt, id, kinds[k], s);
        const auto out = apply_corruption(corpus[i], kinds[k], s, seed, table);
        per[i * cells + k * kSeverityCount + static_cast<std::size_t>(s - 1)] = 1.0 - ssim(corpus[i], out);
      }
  });
  std::map<CorruptionKind, SeverityCurve> curves;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    SeverityCurve c{};
    for (int s = 0; s < kSeverityCount; ++s) {
      double acc = 0.0;
      for (std::size_t i = 0; i < corpus.size(); ++i) acc += per[i * cells + k * kSeverityCount + static_cast<std::size_t>(s)];
      c[static_cast<std::size_t>(s)] = acc / static_cast<double>(corpus.size());
    }
    curves[kinds[k]] = c;
  }
  return curves;
}

struct CalibrationReport {
  std::string table_version;
  std::map<CorruptionKind, SeverityCurve> curves;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

/// Checks that mean (1 - SSIM) rises strictly with severity for every kind
/// in the table and, when bands are given, lands inside each band.
inline CalibrationReport check_calibration(const SeverityTable& table, const std::vector<ImageBuf>& corpus,
                                           const CalibrationBands* bands = nullptr,
                                           unsigned jobs = default_jobs()) {
  if (corpus.empty()) throw Error("calibration corpus is empty");
  if (corpus.size() < kMinCalibrationCorpus)
    throw Error("calibration corpus needs at least 50 images, got " + std::to_string(corpus.size()));
  if (bands) {
    const auto fp = corpus_fingerprint(corpus);
    if (fp != bands->corpus_fingerprint)
      throw Error("corpus fingerprint mismatch: bands expect " + bands->corpus_fingerprint + ", corpus is " + fp);
    if (bands->version != table.version())
      throw Error("bands version " + bands->version + " does not match table " + table.version());
  }
  std::vector<CorruptionKind> kinds;
  for (const auto& k : kKinds)
    if (table.has(k.kind)) kinds.push_back(k.kind);

  CalibrationReport r{table.version(), measure_distortion(table, corpus, kinds, jobs), {}};
  for (const auto& v : table.monotonicity_violations()) r.failures.push_back("parameter trend: " + v);
  for (const auto& [kind, m] : r.curves) {
    for (int s = 1; s < kSeverityCount; ++s)
      if (!(m[static_cast<std::size_t>(s)] > m[static_cast<std::size_t>(s - 1)]))
        r.failures.push_back(std::string(name_of(kind)) + ": distortion not increasing from severity " +
                             std::to_string(s) + " to " + std::to_string(s + 1));
    if (!bands) continue;
    auto it = bands->bands.find(kind);
    if (it == bands->bands.end()) {
      r.failures.push_back(std::string(name_of(kind)) + ": no calibration band");
      continue;
    }
    for (int s = 0; s < kSeverityCount; ++s)
      if (!it->second[static_cast<std::size_t>(s)].contains(m[static_cast<std::size_t>(s)]))
        r.failures.push_back(std::string(name_of(kind)) + ": severity " + std::to_string(s + 1) +
                             " outside band");
  }
  return r;
}

}  // namespace corrupt_bench
