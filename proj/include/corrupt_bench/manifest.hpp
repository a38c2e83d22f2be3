#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrupt_bench/codec.hpp"
#include "corrupt_bench/corruption_kind.hpp"
#include "corrupt_bench/hash.hpp"

namespace corrupt_bench {

inline constexpr std::string_view kManifestFormat = "corrupt-bench-manifest/1";

inline std::string hex_u64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

inline std::uint64_t parse_hex_u64(std::string_view s) {
  if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
  if (s.empty() || s.size() > 16) throw Error("bad hex value '" + std::string(s) + "'");
  std::uint64_t v = 0;
  for (char c : s) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else throw Error("bad hex value '" + std::string(s) + "'");
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return v;
}

struct SourceRecord {
  std::string path;    // relative to the source root, '/' separated
  std::string sha256;  // of the file bytes
  std::string label;   // class directory name
  bool operator==(const SourceRecord&) const = default;
};

struct ManifestEntry {
  std::string path;    // relative to the output root
  std::string source;  // SourceRecord::path
  CorruptionKind kind;
  int severity;
  std::uint64_t seed;
  std::optional<std::string> frost_texture;
  bool operator==(const ManifestEntry&) const = default;
};

struct SourceError {
  std::string path;
  std::string message;
  bool operator==(const SourceError&) const = default;
};

struct GenerationOptions {
  int resize = 224;  // 0 keeps source dimensions
  bool lossless = false;
  int jpeg_quality = 85;
  std::string frost_source = "procedural";
  bool operator==(const GenerationOptions&) const = default;
};

/// Reproducibility record of a generated dataset. The protocol flag
/// test_only is always true: these images are for evaluation only.
struct DatasetManifest {
  std::string severity_table;
  std::uint64_t salt = 0;
  GenerationOptions options;
  std::vector<CorruptionKind> corruptions;
  std::vector<int> severities;
  std::vector<std::string> labels;
  std::vector<SourceRecord> sources;
  std::vector<ManifestEntry> entries;
  std::vector<SourceError> errors;

  static constexpr bool test_only = true;

  /// Sorts every list by path so that traversal order never shows.
  void canonicalize() {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::sort(sources.begin(), sources.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    std::sort(errors.begin(), errors.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  }

  const SourceRecord* find_source(std::string_view path) const {
    auto it = std::lower_bound(sources.begin(), sources.end(), path,
                               [](const SourceRecord& s, std::string_view p) { return s.path < p; });
    return it != sources.end() && it->path == path ? &*it : nullptr;
  }

  const ManifestEntry* find_entry(std::string_view path) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), path,
                               [](const ManifestEntry& e, std::string_view p) { return e.path < p; });
    return it != entries.end() && it->path == path ? &*it : nullptr;
  }

  bool operator==(const DatasetManifest&) const = default;

  nlohmann::json to_json() const {
    using nlohmann::json;
    json j;
    j["format"] = kManifestFormat;
    j["test_only"] = true;
    j["severity_table"] = severity_table;
    j["seed_rule"] = kSeedRule;
    j["salt"] = hex_u64(salt);
    j["options"] = {{"resize", options.resize},
                    {"encoding", options.lossless ? "png" : "jpeg"},
                    {"jpeg_quality", options.jpeg_quality},
                    {"frost_source", options.frost_source}};
    json kinds = json::array();
    for (auto k : corruptions) kinds.push_back(name_of(k));
    j["corruptions"] = kinds;
    j["severities"] = severities;
    j["labels"] = labels;
    json src = json::array();
    for (const auto& s : sources) src.push_back({{"path", s.path}, {"sha256", s.sha256}, {"label", s.label}});
    j["sources"] = src;
    json ent = json::array();
    for (const auto& e : entries) {
      json row{{"path", e.path},
               {"source", e.source},
               {"kind", name_of(e.kind)},
               {"severity", e.severity},
               {"seed", hex_u64(e.seed)}};
      if (e.frost_texture) row["frost_texture"] = *e.frost_texture;
      ent.push_back(row);
    }
    j["entries"] = ent;
    json err = json::array();
    for (const auto& e : errors) err.push_back({{"path", e.path}, {"message", e.message}});
    j["errors"] = err;
    return j;
  }

  static DatasetManifest from_json(const nlohmann::json& j) {
    if (j.value("format", "") != kManifestFormat) throw Error("not a corrupt-bench manifest");
    if (!j.contains("test_only") || j["test_only"] != true) throw Error("manifest must carry test_only = true");
    if (j.value("seed_rule", "") != kSeedRule) throw Error("manifest uses an unknown seed rule");
    DatasetManifest m;
    m.severity_table = j.at("severity_table").get<std::string>();
    m.salt = parse_hex_u64(j.at("salt").get<std::string>());
    const auto& o = j.at("options");
    m.options.resize = o.at("resize").get<int>();
    m.options.lossless = o.at("encoding").get<std::string>() == "png";
    m.options.jpeg_quality = o.at("jpeg_quality").get<int>();
    m.options.frost_source = o.at("frost_source").get<std::string>();
    for (const auto& k : j.at("corruptions")) m.corruptions.push_back(parse_kind(k.get<std::string>()));
    m.severities = j.at("severities").get<std::vector<int>>();
    m.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& s : j.at("sources"))
      m.sources.push_back({s.at("path"), s.at("sha256"), s.at("label")});
    for (const auto& e : j.at("entries")) {
      ManifestEntry me{e.at("path"), e.at("source"), parse_kind(e.at("kind").get<std::string>()),
                       e.at("severity").get<int>(), parse_hex_u64(e.at("seed").get<std::string>()), {}};
      if (e.contains("frost_texture")) me.frost_texture = e["frost_texture"].get<std::string>();
      m.entries.push_back(std::move(me));
    }
    for (const auto& e : j.at("errors")) m.errors.push_back({e.at("path"), e.at("message")});
    m.canonicalize();
    return m;
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }

  static DatasetManifest load(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
      return from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
    } catch (const nlohmann::json::exception& e) {
      throw Error("manifest " + path.string() + ": " + e.what());
    }
  }

  void save(const std::filesystem::path& path) const {
    const auto text = dump();
    write_file_atomic(path, std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
  }
};

}  // namespace corrupt_bench
