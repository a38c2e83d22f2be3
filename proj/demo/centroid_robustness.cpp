// Runs the whole evaluation loop with a toy classifier: nearest class-mean
// color over reference images. Prints CE per kind and mCE, with and without
// CLAHE applied before classification.
//   centroid_robustness [images-per-class]

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "corrupt_bench/corrupt_bench.hpp"

using namespace corrupt_bench;
namespace fs = std::filesystem;

namespace {

using Centroids = std::map<std::string, std::array<double, 3>>;

std::string nearest(const ImageBuf& img, const Centroids& cs) {
  const auto m = channel_means(img);
  std::string best;
  double best_d = 1e300;
  for (const auto& [label, c] : cs) {
    double d = 0;
    for (std::size_t i = 0; i < 3; ++i) d += (m[i] - c[i]) * (m[i] - c[i]);
    if (d < best_d) best_d = d, best = label;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int per_class = argc > 1 ? std::atoi(argv[1]) : 4;
  const fs::path root = fs::temp_directory_path() / "corrupt-bench-centroid-demo";
  fs::remove_all(root);
  try {
    // Three classes: warm, cool and gray tinted reference images.
    const std::array<std::pair<const char*, std::array<float, 3>>, 3> classes{
        {{"warm", {1.0f, 0.7f, 0.5f}}, {"cool", {0.5f, 0.7f, 1.0f}}, {"gray", {0.8f, 0.8f, 0.8f}}}};
    int idx = 0;
    for (const auto& [name, tint] : classes)
      for (int i = 0; i < per_class; ++i, ++idx) {
        auto s = reference_image(idx, 96).samples();
        std::vector<float> v(s.begin(), s.end());
        for (std::size_t k = 0; k < v.size(); ++k) v[k] *= tint[k % 3];
        write_file(root / "src" / name / ("img_" + std::to_string(i) + ".png"),
                   encode_png(ImageBuf::from_samples(96, 96, std::move(v))));
      }

    GenerateRequest req;
    req.salt = 2019;
    req.options.resize = 64;
    req.options.lossless = true;
    const auto m = generate_dataset(root / "src", root / "ds", load_severity_table("v1"), req);
    std::printf("generated %zu corrupted images\n", m.entries.size());

    for (bool use_clahe : {false, true}) {
      auto prep = [&](const ImageBuf& img) { return use_clahe ? clahe(img) : img; };
      Centroids cs;
      std::map<std::string, int> n;
      std::map<std::string, ImageBuf> clean;
      for (const auto& s : m.sources) {
        const auto img = prep(resize_center_crop(read_image(root / "src" / s.path), 64));
        const auto mm = channel_means(img);
        for (std::size_t i = 0; i < 3; ++i) cs[s.label][i] += mm[i];
        ++n[s.label];
        clean.emplace(s.path, img);
      }
      for (auto& [label, c] : cs)
        for (auto& v : c) v /= n[label];
      PredictionLog log;
      for (const auto& s : m.sources) log.push_back({s.path, nearest(clean.at(s.path), cs), s.label, "clean"});
      for (const auto& e : m.entries)
        log.push_back({e.path, nearest(prep(read_image(root / "ds" / e.path)), cs), m.find_source(e.source)->label,
                       std::string(name_of(e.kind)) + "/" + std::to_string(e.severity)});
      const auto report = build_report(build_error_profile(log, m, "centroid"), m.severity_table);
      std::printf("\n%s\n", use_clahe ? "with CLAHE" : "plain");
      std::printf("clean error %.3f\n", *report.clean_error);
      for (const auto& [k, ce] : report.ce) std::printf("  %-18s CE %6.1f\n", std::string(name_of(k)).c_str(), round_display(ce));
      if (report.mce) std::printf("mCE %.1f\n", round_display(*report.mce));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    fs::remove_all(root);
    return 1;
  }
  fs::remove_all(root);
  return 0;
}
