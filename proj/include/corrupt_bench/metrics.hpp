#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrupt_bench/corruption_kind.hpp"
#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

/// Top-1 error rates of one network: clean, and per (kind, severity).
struct ErrorProfile {
  std::string network_name;
  std::optional<double> clean_error;
  std::map<CorruptionKind, std::array<std::optional<double>, kSeverityCount>> cells;

  void set(CorruptionKind k, int severity, double error) {
    if (severity < 1 || severity > kSeverityCount) throw Error("severity must be in 1..5");
    if (!(error >= 0.0 && error <= 1.0)) throw Error("error rate must be in [0, 1]");
    cells[k][static_cast<std::size_t>(severity - 1)] = error;
  }

  void set_row(CorruptionKind k, const std::array<double, kSeverityCount>& errors) {
    for (int s = 1; s <= kSeverityCount; ++s) set(k, s, errors[static_cast<std::size_t>(s - 1)]);
  }

  bool complete(CorruptionKind k) const {
    auto it = cells.find(k);
    if (it == cells.end()) return false;
    for (const auto& c : it->second)
      if (!c) return false;
    return true;
  }

  /// Sum over the five severities; throws naming the first empty cell.
  double severity_sum(CorruptionKind k) const {
    auto it = cells.find(k);
    double sum = 0.0;
    for (int s = 1; s <= kSeverityCount; ++s) {
      if (it == cells.end() || !it->second[static_cast<std::size_t>(s - 1)])
        throw Error("missing error rate for " + std::string(name_of(k)) + " severity " + std::to_string(s));
      sum += *it->second[static_cast<std::size_t>(s - 1)];
    }
    return sum;
  }
};

/// AlexNet normalization: the mean top-1 error over the five severities of
/// each corruption, and the clean error. Stored as fractions.
struct BaselineTable {
  std::string version;
  double clean_error;
  std::array<double, kKindCount> mean_error;

  /// Denominator of CE: five times the per-kind mean.
  double severity_sum(CorruptionKind k) const { return kSeverityCount * mean_error[index_of(k)]; }

  static const BaselineTable& alexnet() {
    static const BaselineTable table{
        "alexnet-v1",
        0.435,
        {0.886, 0.894, 0.923, 0.820, 0.826, 0.786, 0.798, 0.867, 0.827, 0.819, 0.565, 0.853, 0.646, 0.718, 0.607,
         0.845, 0.787, 0.718, 0.658}};
    return table;
  }
};

/// CE in percent: 100 * sum_s E_s / sum_s E_s(AlexNet).
inline double corruption_error(const ErrorProfile& p, CorruptionKind k,
                               const BaselineTable& b = BaselineTable::alexnet()) {
  return 100.0 * p.severity_sum(k) / b.severity_sum(k);
}

/// Relative CE in percent: 100 * sum_s (E_s - E_clean) / sum_s (E_s(AlexNet) - E_clean(AlexNet)).
/// The clean error is subtracted once per severity, so a network whose
/// corrupted errors all equal its clean error scores 0.
inline double relative_corruption_error(const ErrorProfile& p, CorruptionKind k,
                                        const BaselineTable& b = BaselineTable::alexnet()) {
  if (!p.clean_error) throw Error("relative CE needs a clean error rate");
  const double denom = b.severity_sum(k) - kSeverityCount * b.clean_error;
  if (!(denom > 0.0)) throw Error("relative CE baseline denominator is not positive");
  return 100.0 * (p.severity_sum(k) - kSeverityCount * *p.clean_error) / denom;
}

namespace detail {

inline double mean_over_core(const std::map<CorruptionKind, double>& values, std::string_view what) {
  for (const auto& [k, v] : values)
    if (!is_core(k)) throw Error("extra kinds not in " + std::string(what) + " (got " + std::string(name_of(k)) + ")");
  if (values.size() != kCoreKindCount)
    throw Error(std::string(what) + " needs all 15 core corruptions, got " + std::to_string(values.size()));
  double sum = 0.0;
  for (const auto& [k, v] : values) sum += v;
  return sum / kCoreKindCount;
}

}  // namespace detail

/// Arithmetic mean of the 15 core CE values; extra kinds are rejected.
inline double mean_ce(const std::map<CorruptionKind, double>& ce) { return detail::mean_over_core(ce, "mCE"); }

inline double relative_mce(const std::map<CorruptionKind, double>& rel_ce) {
  return detail::mean_over_core(rel_ce, "Relative mCE");
}

struct RobustnessReport {
  std::string network_name;
  std::string severity_table_version;
  std::string baseline_version;
  std::optional<double> clean_error;
  std::map<CorruptionKind, double> ce;
  std::map<CorruptionKind, double> relative_ce;
  std::optional<double> mce;
  std::optional<double> relative_mce;
  std::size_t clean_images = 0;
  std::size_t corrupted_images = 0;

  nlohmann::json to_json() const;
};

/// CE for every kind with all five severities present (extras included),
/// and the core means when all 15 core kinds are present.
inline RobustnessReport build_report(const ErrorProfile& p, std::string table_version,
                                     const BaselineTable& b = BaselineTable::alexnet()) {
  RobustnessReport r;
  r.network_name = p.network_name;
  r.severity_table_version = std::move(table_version);
  r.baseline_version = b.version;
  r.clean_error = p.clean_error;
  std::map<CorruptionKind, double> core_ce, core_rel;
  for (const auto& [k, row] : p.cells) {
    if (!p.complete(k)) continue;
    r.ce[k] = corruption_error(p, k, b);
    if (p.clean_error) r.relative_ce[k] = relative_corruption_error(p, k, b);
    if (is_core(k)) {
      core_ce[k] = r.ce[k];
      if (p.clean_error) core_rel[k] = r.relative_ce[k];
    }
  }
  if (core_ce.size() == kCoreKindCount) r.mce = mean_ce(core_ce);
  if (core_rel.size() == kCoreKindCount) r.relative_mce = relative_mce(core_rel);
  return r;
}

/// Display rounding to 0.1; reports keep full precision.
inline double round_display(double v) { return std::round(v * 10.0) / 10.0; }

inline nlohmann::json RobustnessReport::to_json() const {
  nlohmann::json j;
  j["format"] = "corrupt-bench-report/1";
  j["network"] = network_name;
  j["severity_table"] = severity_table_version;
  j["baseline"] = baseline_version;
  j["clean_error"] = clean_error ? nlohmann::json(*clean_error) : nlohmann::json(nullptr);
  j["mce"] = mce ? nlohmann::json(*mce) : nlohmann::json(nullptr);
  j["relative_mce"] = relative_mce ? nlohmann::json(*relative_mce) : nlohmann::json(nullptr);
  j["counts"] = {{"clean", clean_images}, {"corrupted", corrupted_images}};
  nlohmann::json per = nlohmann::json::array();
  for (const auto& ki : kKinds) {
    auto it = ce.find(ki.kind);
    if (it == ce.end()) continue;
    nlohmann::json row{{"kind", ki.name},
                       {"category", category_name(ki.category)},
                       {"set", ki.set == BenchmarkSet::Core ? "core" : "extra"},
                       {"ce", it->second}};
    auto rit = relative_ce.find(ki.kind);
    row["relative_ce"] = rit == relative_ce.end() ? nlohmann::json(nullptr) : nlohmann::json(rit->second);
    per.push_back(row);
  }
  j["corruptions"] = per;
  return j;
}

}  // namespace corrupt_bench
