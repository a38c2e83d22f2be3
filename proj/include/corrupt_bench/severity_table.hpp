#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "corrupt_bench/codec.hpp"
#include "corrupt_bench/corruption_kind.hpp"

namespace corrupt_bench {

/// How a parameter must move as severity rises.
enum class Trend : int { Rising = 1, Falling = -1, Free = 0 };

struct ParamSpec {
  std::string_view name;
  Trend trend;
};

/// Parameter names each kernel reads from the table.
inline std::vector<ParamSpec> param_schema(CorruptionKind k) {
  using enum CorruptionKind;
  switch (k) {
    case GaussianNoise: return {{"sigma", Trend::Rising}};
    case ShotNoise: return {{"photons", Trend::Falling}};
    case ImpulseNoise: return {{"fraction", Trend::Rising}};
    case DefocusBlur: return {{"radius", Trend::Rising}};
    case GlassBlur:
      return {{"sigma", Trend::Rising}, {"max_shift", Trend::Rising}, {"iterations", Trend::Rising}};
    case MotionBlur: return {{"length", Trend::Rising}, {"angle_deg", Trend::Free}};
    case ZoomBlur: return {{"max_zoom", Trend::Rising}, {"step", Trend::Free}};
    case Snow:
      return {{"density", Trend::Rising},     {"flake_size", Trend::Rising},
              {"motion_length", Trend::Rising}, {"angle_deg", Trend::Free},
              {"blend", Trend::Rising},       {"gain", Trend::Free}};
    case Frost: return {{"blend", Trend::Rising}};
    case Fog: return {{"weight", Trend::Rising}, {"roughness", Trend::Rising}};
    case Brightness: return {{"amount", Trend::Rising}};
    case Contrast: return {{"factor", Trend::Falling}};
    case Elastic: return {{"displacement", Trend::Rising}, {"smoothing", Trend::Falling}};
    case Pixelate: return {{"factor", Trend::Rising}};
    case Jpeg: return {{"quality", Trend::Falling}};
    case SpeckleNoise: return {{"sigma", Trend::Rising}};
    case GaussianBlur: return {{"sigma", Trend::Rising}};
    case Spatter:
      return {{"coverage", Trend::Rising},
              {"blob_sigma", Trend::Free},
              {"mud", Trend::Rising},
              {"opacity", Trend::Rising}};
    case Saturate: return {{"amount", Trend::Rising}};
  }
  return {};
}

using ParamMap = std::map<std::string, double, std::less<>>;

/// Versioned per-(kind, severity) parameter sets.
///
/// Text form, one row per (kind, parameter) with the five severity values:
///
///     version = v1
///     calibration_size = 224
///     gaussian_noise.sigma = 0.08 0.12 0.18 0.26 0.38
///
/// '#' starts a comment. Kinds may be absent; a kernel asked for a missing
/// kind fails at apply time.
class SeverityTable {
 public:
  SeverityTable() = default;
  explicit SeverityTable(std::string version) : version_(std::move(version)) {}

  const std::string& version() const { return version_; }
  int calibration_size() const { return calibration_size_; }

  bool has(CorruptionKind k) const {
    for (const auto& p : params_[index_of(k)])
      if (!p.empty()) return true;
    return false;
  }

  const ParamMap& params(CorruptionKind k, int severity) const {
    check_severity(severity);
    return params_[index_of(k)][static_cast<std::size_t>(severity - 1)];
  }

  double param(CorruptionKind k, int severity, std::string_view name) const {
    const auto& m = params(k, severity);
    auto it = m.find(name);
    if (it == m.end())
      throw Error("severity table " + version_ + " lacks " + std::string(name_of(k)) + "." +
                  std::string(name) + " at severity " + std::to_string(severity));
    return it->second;
  }

  /// Builder access; published tables are treated as read-only.
  void set(CorruptionKind k, int severity, std::string_view name, double value) {
    check_severity(severity);
    params_[index_of(k)][static_cast<std::size_t>(severity - 1)][std::string(name)] = value;
  }

  /// Parameters that move against their declared trend between adjacent
  /// severities, formatted as "kind.param s->s+1".
  std::vector<std::string> monotonicity_violations() const {
    std::vector<std::string> out;
    for (const auto& ki : kKinds) {
      if (!has(ki.kind)) continue;
      for (const auto& ps : param_schema(ki.kind)) {
        if (ps.trend == Trend::Free) continue;
        for (int s = 1; s < kSeverityCount; ++s) {
          const double a = param(ki.kind, s, ps.name), b = param(ki.kind, s + 1, ps.name);
          const double d = (b - a) * static_cast<int>(ps.trend);
          if (d < 0.0)
            out.push_back(std::string(ki.name) + "." + std::string(ps.name) + " " + std::to_string(s) +
                          "->" + std::to_string(s + 1));
        }
      }
    }
    return out;
  }

  /// Every schema parameter present for every kind in the table.
  std::vector<std::string> missing_parameters() const {
    std::vector<std::string> out;
    for (const auto& ki : kKinds) {
      if (!has(ki.kind)) continue;
      for (const auto& ps : param_schema(ki.kind))
        for (int s = 1; s <= kSeverityCount; ++s)
          if (!params(ki.kind, s).contains(ps.name))
            out.push_back(std::string(ki.name) + "." + std::string(ps.name) + "@" + std::to_string(s));
    }
    return out;
  }

  static SeverityTable parse(std::string_view text) {
    SeverityTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
      throw Error("severity table line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) fail("expected key = value");
        continue;
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key == "version") {
        t.version_ = value;
        continue;
      }
      if (key == "calibration_size") {
        t.calibration_size_ = std::stoi(value);
        continue;
      }
      const auto dot = key.find('.');
      if (dot == std::string::npos) fail("unknown key '" + key + "'");
      const auto kind = kind_from_name(key.substr(0, dot));
      if (!kind) fail("unknown corruption kind '" + key.substr(0, dot) + "'");
      const std::string pname = key.substr(dot + 1);
      bool known = false;
      for (const auto& ps : param_schema(*kind)) known = known || ps.name == pname;
      if (!known) fail("unknown parameter '" + key + "'");
      std::istringstream vs(value);
      std::vector<double> vals;
      std::string tok;
      while (vs >> tok) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) fail("bad number '" + tok + "'");
        vals.push_back(v);
      }
      if (vals.size() != kSeverityCount) fail("expected 5 values for " + key);
      for (int s = 1; s <= kSeverityCount; ++s) t.set(*kind, s, pname, vals[static_cast<std::size_t>(s - 1)]);
    }
    if (t.version_.empty()) throw Error("severity table has no version");
    if (auto missing = t.missing_parameters(); !missing.empty())
      throw Error("severity table " + t.version_ + " is missing " + missing.front());
    return t;
  }

  static SeverityTable load(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }

  std::string serialize() const {
    std::ostringstream out;
    out.precision(17);
    out << "version = " << version_ << "\n";
    out << "calibration_size = " << calibration_size_ << "\n";
    for (const auto& ki : kKinds) {
      if (!has(ki.kind)) continue;
      for (const auto& ps : param_schema(ki.kind)) {
        out << ki.name << "." << ps.name << " =";
        for (int s = 1; s <= kSeverityCount; ++s) out << " " << param(ki.kind, s, ps.name);
        out << "\n";
      }
    }
    return out.str();
  }

  bool operator==(const SeverityTable&) const = default;

 private:
  static void check_severity(int s) {
    if (s < 1 || s > kSeverityCount) throw Error("severity must be in 1..5, got " + std::to_string(s));
  }
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::string version_;
  int calibration_size_ = 224;
  std::array<std::array<ParamMap, kSeverityCount>, kKindCount> params_{};
};

/// Directory holding the shipped data files. Resolution order: the
/// CORRUPT_BENCH_DATA environment variable, then the compile-time default.
inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("CORRUPT_BENCH_DATA")) return env;
#ifdef CORRUPT_BENCH_DATA_DIR
  return CORRUPT_BENCH_DATA_DIR;
#else
  return "data";
#endif
}

/// Accepts a shipped version name ("v1") or a path to a table file.
inline SeverityTable load_severity_table(std::string_view name_or_path) {
  const std::filesystem::path p{std::string(name_or_path)};
  if (std::filesystem::exists(p) && std::filesystem::is_regular_file(p)) return SeverityTable::load(p);
  const auto shipped = data_dir() / ("severity_" + std::string(name_or_path) + ".txt");
  if (std::filesystem::exists(shipped)) return SeverityTable::load(shipped);
  throw Error("no severity table '" + std::string(name_or_path) + "'");
}

}  // namespace corrupt_bench
