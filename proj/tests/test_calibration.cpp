#include <gtest/gtest.h>

#include <cmath>

#include "corrupt_bench/calibration.hpp"
#include "corrupt_bench/goldens.hpp"
#include "test_util.hpp"

using namespace corrupt_bench;
using namespace cbtest;

namespace {

/// v1 rows for the given kinds only.
SeverityTable subset_of_v1(const std::vector<CorruptionKind>& kinds) {
  const auto v1 = load_severity_table("v1");
  SeverityTable t("v1");
  for (auto k : kinds)
    for (int s = 1; s <= kSeverityCount; ++s)
      for (const auto& [name, value] : v1.params(k, s)) t.set(k, s, name, value);
  return t;
}

void swap_severities(SeverityTable& t, CorruptionKind k, int a, int b) {
  const auto pa = t.params(k, a), pb = t.params(k, b);
  for (const auto& [name, value] : pb) t.set(k, a, name, value);
  for (const auto& [name, value] : pa) t.set(k, b, name, value);
}

/// Windowed SSIM written directly from the definition, 2-D weights.
/// Luma here stays in double; the library stores it as float, hence 1e-6.
double ssim_oracle(const ImageBuf& a, const ImageBuf& b) {
  double g[11], gs = 0;
  for (int i = 0; i < 11; ++i) gs += g[i] = std::exp(-(i - 5) * (i - 5) / 4.5);
  auto luma = [](const ImageBuf& im, int x, int y) {
    return 0.299 * im.at(x, y, 0) + 0.587 * im.at(x, y, 1) + 0.114 * im.at(x, y, 2);
  };
  double total = 0;
  int n = 0;
  for (int y0 = 0; y0 + 11 <= a.height(); ++y0)
    for (int x0 = 0; x0 + 11 <= a.width(); ++x0) {
      double mx = 0, my = 0;
      for (int j = 0; j < 11; ++j)
        for (int i = 0; i < 11; ++i) {
          const double w = g[i] * g[j] / (gs * gs);
          mx += w * luma(a, x0 + i, y0 + j);
          my += w * luma(b, x0 + i, y0 + j);
        }
      double vx = 0, vy = 0, cxy = 0;
      for (int j = 0; j < 11; ++j)
        for (int i = 0; i < 11; ++i) {
          const double w = g[i] * g[j] / (gs * gs);
          const double dx = luma(a, x0 + i, y0 + j) - mx, dy = luma(b, x0 + i, y0 + j) - my;
          vx += w * dx * dx;
          vy += w * dy * dy;
          cxy += w * dx * dy;
        }
      const double c1 = 1e-4, c2 = 9e-4;
      total += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++n;
    }
  return total / n;
}

}  // namespace

TEST(Ssim, SelfIsOneAndSymmetric) {
  const auto a = random_image(32, 24, 1), b = random_image(32, 24, 2);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-9);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
  EXPECT_LT(ssim(a, b), 0.2);
  EXPECT_THROW(ssim(a, random_image(24, 32, 1)), Error);
  EXPECT_THROW(ssim(random_image(10, 20, 1), random_image(10, 20, 1)), Error);
}

TEST(Ssim, MatchesDirectWindowedFormula) {
  for (std::uint32_t seed = 0; seed < 3; ++seed) {
    const auto a = random_image(16, 16, 10 + seed);
    const auto b = add_gaussian_noise(a, 0.1, seed);
    EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-6);
  }
  const auto r = ramp_image(20, 17);
  const auto c = checkerboard(20, 17, 3);
  EXPECT_NEAR(ssim(r, c), ssim_oracle(r, c), 1e-6);
}

TEST(Ssim, DecreasesWithNoise) {
  const auto img = reference_image(3, 64);
  double prev = 1.0;
  for (double s : {0.02, 0.05, 0.1, 0.2}) {
    const double v = ssim(img, add_gaussian_noise(img, s, 4));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Calibration, CorpusSizeGuards) {
  const auto t = subset_of_v1({CorruptionKind::Brightness});
  EXPECT_THROW(check_calibration(t, {}), Error);
  EXPECT_THROW(check_calibration(t, reference_corpus(49, 32)), Error);
}

TEST(Calibration, MonotoneSubsetPassesAndSwapFails) {
  const auto corpus = reference_corpus(50, 64);
  auto t = subset_of_v1({CorruptionKind::Brightness, CorruptionKind::Contrast, CorruptionKind::Pixelate});
  const auto ok = check_calibration(t, corpus);
  EXPECT_TRUE(ok.passed()) << ok.failures.front();
  EXPECT_EQ(ok.curves.size(), 3u);

  swap_severities(t, CorruptionKind::Contrast, 2, 4);
  const auto bad = check_calibration(t, corpus);
  ASSERT_FALSE(bad.passed());
  bool distortion = false, trend = false;
  for (const auto& f : bad.failures) {
    distortion = distortion || f.starts_with("contrast: distortion not increasing");
    trend = trend || f.starts_with("parameter trend: contrast");
    EXPECT_EQ(f.find("brightness"), std::string::npos) << f;
  }
  EXPECT_TRUE(distortion);
  EXPECT_TRUE(trend);
}

TEST(Calibration, FingerprintAndVersionMismatchThrow) {
  const auto bands = CalibrationBands::load(data_dir() / "bands_v1.txt");
  const auto t = subset_of_v1({CorruptionKind::Brightness});
  EXPECT_THROW(check_calibration(t, reference_corpus(50, 32), &bands), Error);
  auto other = bands;
  other.version = "v0";
  try {
    check_calibration(t, reference_corpus(kReferenceCorpusSize, 224), &other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("does not match table"), std::string::npos);
  }
}

TEST(Calibration, ShippedBandsHoldForCheapKinds) {
  const auto bands = CalibrationBands::load(data_dir() / "bands_v1.txt");
  const auto corpus = reference_corpus();
  EXPECT_EQ(corpus_fingerprint(corpus), bands.corpus_fingerprint);
  const auto t = subset_of_v1({CorruptionKind::Brightness, CorruptionKind::ImpulseNoise, CorruptionKind::Pixelate});
  const auto r = check_calibration(t, corpus, &bands);
  EXPECT_TRUE(r.passed()) << r.failures.front();
}

TEST(Bands, ShippedFileCoversTableAndIsOrdered) {
  const auto bands = CalibrationBands::load(data_dir() / "bands_v1.txt");
  const auto table = load_severity_table("v1");
  EXPECT_EQ(bands.version, table.version());
  for (const auto& k : kKinds) EXPECT_EQ(bands.bands.count(k.kind), table.has(k.kind) ? 1u : 0u) << k.name;
  EXPECT_TRUE(bands.invariant_violations().empty());
}

TEST(Bands, FromCurvesInvariantsAndRoundTrip) {
  std::map<CorruptionKind, SeverityCurve> curves{{CorruptionKind::Fog, {0.02, 0.04, 0.07, 0.1, 0.15}},
                                                 {CorruptionKind::Snow, {0.2, 0.3, 0.45, 0.5, 0.62}}};
  const auto b = CalibrationBands::from_curves("v9", "abc", curves);
  EXPECT_TRUE(b.invariant_violations().empty());
  for (const auto& [k, m] : curves)
    for (int s = 0; s < kSeverityCount; ++s) EXPECT_TRUE(b.bands.at(k)[static_cast<std::size_t>(s)].contains(m[static_cast<std::size_t>(s)]));
  EXPECT_DOUBLE_EQ(b.bands.at(CorruptionKind::Fog)[0].lo, 0.01);
  EXPECT_DOUBLE_EQ(b.bands.at(CorruptionKind::Fog)[4].hi, 0.175);
  const auto back = CalibrationBands::parse(b.serialize());
  EXPECT_EQ(back.serialize(), b.serialize());
  EXPECT_EQ(back.corpus_fingerprint, "abc");

  auto bad = CalibrationBands::from_curves("v9", "abc", {{CorruptionKind::Fog, {0.05, 0.1, 0.02, 0.1, 0.15}}});
  EXPECT_FALSE(bad.invariant_violations().empty());
  EXPECT_THROW(CalibrationBands::parse("version = v1\nfog = 1 2 3\n"), Error);
  EXPECT_THROW(CalibrationBands::parse("fog = 0 1 1 2 2 3 3 4 4 5\n"), Error);
}

TEST(Goldens, ShippedSetMatches) {
  const auto set = GoldenSet::load(data_dir() / "goldens_v1.json");
  const auto table = load_severity_table("v1");
  std::size_t kinds = 0;
  for (const auto& k : kKinds) kinds += table.has(k.kind);
  EXPECT_EQ(set.entries.size(), kinds * kSeverityCount * kGoldenImageCount);
  const auto failures = check_goldens(set, table);
  for (const auto& f : failures) ADD_FAILURE() << f.kernel << " image " << f.image << ": " << f.reason;
  for (const auto& g : set.entries) EXPECT_EQ(g.mode, tolerance_for(g.kind));
}

TEST(Goldens, DetectsPerturbations) {
  const auto table = load_severity_table("v1");
  const auto img = reference_image(1, kGoldenImageSize);
  for (auto k : {CorruptionKind::Pixelate, CorruptionKind::Fog, CorruptionKind::Jpeg}) {
    auto g = make_golden(img, 1, k, 3, table);
    EXPECT_EQ(check_golden(g, img, table), "");
    switch (g.mode) {
      case ToleranceMode::Bitwise: g.output_hash[0] = g.output_hash[0] == '0' ? '1' : '0'; break;
      case ToleranceMode::PerSample: g.probes[7] += 1e-5; break;
      case ToleranceMode::DistortionBand: g.mse *= 1.25; break;
    }
    EXPECT_NE(check_golden(g, img, table), "") << name_of(k);
  }
  auto g = make_golden(img, 1, CorruptionKind::Fog, 2, table);
  EXPECT_EQ(check_golden(g, reference_image(2, kGoldenImageSize), table), "input image changed");
  auto shifted = g;
  shifted.probes[0] += 5e-7;
  EXPECT_EQ(check_golden(shifted, img, table), "");
}

TEST(Goldens, JsonRoundTripAndVersionGuard) {
  const auto table = subset_of_v1({CorruptionKind::Brightness});
  const auto set = build_goldens(table);
  EXPECT_EQ(set.entries.size(), static_cast<std::size_t>(kSeverityCount * kGoldenImageCount));
  const auto back = GoldenSet::from_json(set.to_json());
  EXPECT_EQ(back.to_json(), set.to_json());
  EXPECT_TRUE(check_goldens(back, table).empty());
  auto other = back;
  other.table_version = "v2";
  EXPECT_THROW(check_goldens(other, table), Error);
  EXPECT_THROW(GoldenSet::from_json({{"format", "x"}}), Error);
}
