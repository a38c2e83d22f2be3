#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <unordered_set>

#include "corrupt_bench/dataset.hpp"
#include "corrupt_bench/manifest.hpp"
#include "fixture_tree.hpp"
#include "test_util.hpp"

using namespace corrupt_bench;
using namespace cbtest;
namespace fs = std::filesystem;

namespace {

const SeverityTable& table_v1() {
  static const SeverityTable t = load_severity_table("v1");
  return t;
}

GenerateRequest small_request(std::uint64_t salt = 0x5eed) {
  GenerateRequest r;
  r.kinds = {CorruptionKind::GaussianNoise, CorruptionKind::Fog};
  r.salt = salt;
  r.options.resize = 32;
  r.jobs = 2;
  return r;
}

std::size_t count_images(const fs::path& root) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") ++n;
  return n;
}

}  // namespace

TEST(DeriveSeed, StableAndSensitive) {
  const auto a = derive_seed(7, "cls/a.png", CorruptionKind::Fog, 3);
  EXPECT_EQ(a, derive_seed(7, "cls/a.png", CorruptionKind::Fog, 3));
  EXPECT_NE(a, derive_seed(7, "cls/a.png", CorruptionKind::Fog, 4));
  EXPECT_NE(a, derive_seed(8, "cls/a.png", CorruptionKind::Fog, 3));
  EXPECT_NE(a, derive_seed(7, "cls/a.png", CorruptionKind::Snow, 3));
  EXPECT_NE(a, derive_seed(7, "cls/b.png", CorruptionKind::Fog, 3));
}

TEST(DeriveSeed, NoCollisionsOverAMillionPaths) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'100'000);
  std::string path = "class_000/image_0000000.png";
  for (int i = 0; i < 1'000'000; ++i) {
    auto digits = std::to_string(i);
    path.replace(path.size() - 4 - digits.size(), digits.size(), digits);
    seen.insert(derive_seed(1, path, CorruptionKind::Fog, 1));
  }
  EXPECT_EQ(seen.size(), 1'000'000u);
}

TEST(GenerateDataset, CountsFilesAndEntries) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 2, 2, 40);
  const auto m = generate_dataset(src.path(), out / "ds", table_v1(), small_request());
  EXPECT_EQ(count_images(out / "ds"), 40u);
  EXPECT_TRUE(fs::exists(out / "ds/manifest.json"));
  EXPECT_EQ(m.entries.size(), 40u);
  EXPECT_EQ(m.sources.size(), 4u);
  EXPECT_TRUE(m.errors.empty());
  EXPECT_EQ(m.labels, (std::vector<std::string>{"class_0", "class_1"}));
  EXPECT_TRUE(fs::exists(out / "ds/gaussian_noise/3/class_1/img_0.jpg"));
  for (const auto& e : m.entries) {
    EXPECT_TRUE(fs::exists(out / "ds" / e.path)) << e.path;
    EXPECT_EQ(e.seed, derive_seed(m.salt, e.source, e.kind, e.severity));
    const auto img = read_image(out / "ds" / e.path);
    EXPECT_EQ(img.width(), 32);
  }
  EXPECT_EQ(DatasetManifest::load(out / "ds/manifest.json"), m);
}

TEST(GenerateDataset, RerunIsPixelIdenticalAndSaltMatters) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 2, 2, 40);
  auto req = small_request();
  req.options.lossless = true;
  const auto a = generate_dataset(src.path(), out / "a", table_v1(), req);
  req.jobs = 1;
  const auto b = generate_dataset(src.path(), out / "b", table_v1(), req);
  EXPECT_EQ(a, b);
  req.salt ^= 1;
  const auto c = generate_dataset(src.path(), out / "c", table_v1(), req);
  std::size_t changed = 0;
  for (const auto& e : a.entries) {
    EXPECT_EQ(pixel_hash(read_image(out / "a" / e.path)), pixel_hash(read_image(out / "b" / e.path)));
    changed += pixel_hash(read_image(out / "a" / e.path)) != pixel_hash(read_image(out / "c" / e.path));
  }
  EXPECT_EQ(changed, a.entries.size());  // both kinds are stochastic
}

TEST(GenerateDataset, NonEmptyOutputNeedsResume) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 1, 2, 40);
  write_file(out / "stray.txt", Bytes{'x'});
  EXPECT_THROW(generate_dataset(src.path(), out.path(), table_v1(), small_request()), Error);
}

TEST(GenerateDataset, ResumeSkipsExistingAndFillsGaps) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 1, 2, 40);
  const auto first = generate_dataset(src.path(), out / "ds", table_v1(), small_request());
  const auto victim = out / "ds" / first.entries[3].path;
  const auto kept = out / "ds" / first.entries[5].path;
  const auto kept_bytes = read_file(kept);
  const auto victim_bytes = read_file(victim);
  fs::remove(victim);
  fs::remove(out / "ds/manifest.json");
  auto req = small_request();
  req.resume = true;
  const auto second = generate_dataset(src.path(), out / "ds", table_v1(), req);
  EXPECT_EQ(second, first);
  EXPECT_EQ(read_file(victim), victim_bytes);
  EXPECT_EQ(read_file(kept), kept_bytes);
}

TEST(GenerateDataset, UndecodableSourceIsRecordedAndSkipped) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 1, 2, 40);
  write_file(src / "class_0/broken.png", Bytes{'n', 'o', 'p', 'e'});
  const auto m = generate_dataset(src.path(), out / "ds", table_v1(), small_request());
  ASSERT_EQ(m.errors.size(), 1u);
  EXPECT_EQ(m.errors[0].path, "class_0/broken.png");
  EXPECT_EQ(m.sources.size(), 2u);
  EXPECT_EQ(m.entries.size(), 20u);
  for (const auto& e : m.entries) EXPECT_NE(e.source, "class_0/broken.png");
}

TEST(GenerateDataset, RejectsBadRequests) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 1, 1, 40);
  auto req = small_request();
  req.severities = {0, 1};
  EXPECT_THROW(generate_dataset(src.path(), out / "a", table_v1(), req), Error);
  req = small_request();
  req.kinds.clear();
  EXPECT_THROW(generate_dataset(src.path(), out / "b", table_v1(), req), Error);
  EXPECT_THROW(generate_dataset(src / "missing", out / "c", table_v1(), small_request()), Error);
}

TEST(GenerateDataset, JpegKindKeepsItsOwnEncodingAndFrostIsTraced) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 1, 1, 40);
  auto req = small_request();
  req.kinds = {CorruptionKind::Jpeg, CorruptionKind::Frost};
  req.severities = {2};
  req.options.lossless = true;
  const auto m = generate_dataset(src.path(), out / "ds", table_v1(), req);
  ASSERT_EQ(m.entries.size(), 2u);
  for (const auto& e : m.entries) {
    if (e.kind == CorruptionKind::Jpeg) {
      EXPECT_TRUE(e.path.ends_with(".jpg"));
      EXPECT_FALSE(e.frost_texture.has_value());
    } else {
      EXPECT_TRUE(e.path.ends_with(".png"));
      ASSERT_TRUE(e.frost_texture.has_value());
      EXPECT_TRUE(e.frost_texture->starts_with("procedural:"));
    }
  }
}

TEST(GenerateDataset, RegenerateEntryReproducesEveryFile) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 2, 1, 40);
  auto req = small_request();
  req.kinds = {CorruptionKind::Snow, CorruptionKind::Elastic, CorruptionKind::Jpeg};
  const auto m = generate_dataset(src.path(), out / "ds", table_v1(), req);
  for (const auto& e : m.entries) EXPECT_EQ(regenerate_entry(m, e, src.path(), table_v1()), read_file(out / "ds" / e.path));
  write_file(src / "class_0/img_0.png", encode_png(reference_image(90, 40)));
  const auto& e0 = *std::find_if(m.entries.begin(), m.entries.end(), [](const auto& e) { return e.source == "class_0/img_0.png"; });
  EXPECT_THROW(regenerate_entry(m, e0, src.path(), table_v1()), Error);
}

TEST(GenerateDataset, CoreRequestEnumerates75Conditions) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 1, 1, 64);
  GenerateRequest req;
  req.options.resize = 64;
  req.options.lossless = true;
  const auto m = generate_dataset(src.path(), out / "ds", table_v1(), req);
  std::set<std::pair<CorruptionKind, int>> cond;
  for (const auto& e : m.entries) cond.insert({e.kind, e.severity});
  ASSERT_TRUE(m.errors.empty()) << m.errors.front().message;
  EXPECT_EQ(cond.size(), 75u);
  EXPECT_EQ(m.corruptions.size(), 15u);
}

TEST(Manifest, JsonRoundTripAndGuards) {
  DatasetManifest m;
  m.severity_table = "v1";
  m.salt = 0xfeedface12345678ULL;
  m.corruptions = {CorruptionKind::Frost};
  m.severities = {1};
  m.labels = {"a"};
  m.sources = {{"a/x.png", std::string(64, 'f'), "a"}};
  m.entries = {{"frost/1/a/x.jpg", "a/x.png", CorruptionKind::Frost, 1, 0xffffffffffffffffULL, "procedural:3"}};
  m.errors = {{"a/y.png", "bad"}};
  auto j = m.to_json();
  EXPECT_EQ(j["test_only"], true);
  EXPECT_EQ(j["seed_rule"], std::string(kSeedRule));
  EXPECT_EQ(DatasetManifest::from_json(j), m);
  auto bad = j;
  bad["test_only"] = false;
  EXPECT_THROW(DatasetManifest::from_json(bad), Error);
  bad = j;
  bad["seed_rule"] = "md5";
  EXPECT_THROW(DatasetManifest::from_json(bad), Error);
  bad = j;
  bad["format"] = "other";
  EXPECT_THROW(DatasetManifest::from_json(bad), Error);
  EXPECT_EQ(parse_hex_u64(hex_u64(0x0123456789abcdefULL)), 0x0123456789abcdefULL);
  EXPECT_EQ(parse_hex_u64("0xff"), 255u);
  EXPECT_THROW(parse_hex_u64("zz"), Error);
}

TEST(Manifest, CanonicalOrderIgnoresEnumerationOrder) {
  TempDir src("src"), out("out");
  write_source_tree(src.path(), 3, 2, 40);
  const auto m = generate_dataset(src.path(), out / "ds", table_v1(), small_request());
  std::mt19937 g(4);
  for (int i = 0; i < 3; ++i) {
    auto s = m;
    std::shuffle(s.sources.begin(), s.sources.end(), g);
    std::shuffle(s.entries.begin(), s.entries.end(), g);
    std::shuffle(s.labels.begin(), s.labels.end(), g);
    EXPECT_NE(s.dump(), m.dump());
    s.canonicalize();
    EXPECT_EQ(s.dump(), m.dump());
  }
}

TEST(TenCrop, OrderCornersAndMirrors) {
  const auto img = random_image(20, 14, 21);
  const auto crops = ten_crop(img, 9);
  ASSERT_EQ(crops.size(), 10u);
  const int origins[5][2] = {{0, 0}, {11, 0}, {0, 5}, {11, 5}, {5, 2}};
  for (int k = 0; k < 5; ++k)
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 9; ++x)
        for (int c = 0; c < 3; ++c) {
          const float v = img.at(origins[k][0] + x, origins[k][1] + y, c);
          EXPECT_EQ(crops[static_cast<std::size_t>(k)].at(x, y, c), v);
          EXPECT_EQ(crops[static_cast<std::size_t>(k) + 5].at(8 - x, y, c), v);
        }
  for (int k = 0; k < 5; ++k) EXPECT_EQ(mirror_horizontal(crops[static_cast<std::size_t>(k) + 5]), crops[static_cast<std::size_t>(k)]);
}

TEST(TenCrop, FullSizeAndErrors) {
  const auto img = random_image(9, 9, 22);
  const auto crops = ten_crop(img, 9);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(crops[static_cast<std::size_t>(k)], img);
    EXPECT_EQ(crops[static_cast<std::size_t>(k) + 5], mirror_horizontal(img));
  }
  EXPECT_THROW(ten_crop(img, 10), Error);
  EXPECT_THROW(ten_crop(img, 4), Error);
}

TEST(AverageDistributions, Examples) {
  const std::vector<double> p{0.2, 0.3, 0.5};
  EXPECT_EQ(average_distributions({p}), p);
  const auto half = average_distributions({{1, 0}, {0, 1}});
  EXPECT_DOUBLE_EQ(half[0], 0.5);
  EXPECT_DOUBLE_EQ(half[1], 0.5);
  std::mt19937 g(8);
  std::exponential_distribution<double> ex(1.0);
  std::vector<std::vector<double>> ds(10, std::vector<double>(7));
  for (auto& d : ds) {
    double s = 0;
    for (auto& v : d) s += (v = ex(g));
    for (auto& v : d) v /= s;
  }
  const auto avg = average_distributions(ds);
  double total = 0;
  for (std::size_t j = 0; j < 7; ++j) {
    double m = 0;
    for (const auto& d : ds) m += d[j];
    EXPECT_NEAR(avg[j], m / 10, 1e-15);
    total += avg[j];
  }
  EXPECT_NEAR(total, 1.0, 1e-6);
  EXPECT_THROW(average_distributions({{0.5, 0.5}, {1.0}}), Error);
  EXPECT_THROW(average_distributions({{0.5, 0.6}}), Error);
  EXPECT_THROW(average_distributions({}), Error);
}
