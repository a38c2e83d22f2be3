#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "corrupt_bench/image.hpp"
#include "corrupt_bench/prediction_log.hpp"
#include "corrupt_bench/rng.hpp"

namespace corrupt_bench {

inline constexpr std::array<std::string_view, 50> kIcons50Classes{
    "Airplane",      "Arrow Directions", "Ball",           "Biking",         "Bird",
    "Blade",         "Boat",             "Books",          "Building",       "Bunny Ears",
    "Cartwheeling",  "Clock",            "Cloud",          "Disk",           "Drink",
    "Emotion Face",  "Envelope",         "Family",         "Fast Train",     "Feline",
    "Flag",          "Flower",           "Footwear",       "Golfing",        "Hand",
    "Hat",           "Heart",            "Holding Hands",  "Japanese Ideograph", "Kiss",
    "Lock",          "Mailbox",          "Marine Animal",  "Medal",          "Money",
    "Monkey",        "Moon",             "Mountain",       "Numbers",        "Phone",
    "Prohibit Sign", "Star",             "Surfing",        "Tree",           "Umbrella",
    "Vehicle",       "Water Polo",       "Worker",         "Wrestling",      "Writing Utensil"};

struct WordNetClass {
  std::string_view name;
  std::string_view wnid;
};

inline constexpr std::array<WordNetClass, 25> kImageNet22kBroadClasses{{
    {"Amphibian", "n01627424"},           {"Appliance", "n02729837"},
    {"Aquatic Mammal", "n02062017"},      {"Bird", "n01503061"},
    {"Bear", "n02131653"},                {"Beverage", "n07881800"},
    {"Big cat", "n02127808"},             {"Building", "n02913152"},
    {"Cat", "n02121620"},                 {"Clothing", "n03051540"},
    {"Dog", "n02084071"},                 {"Electronic Equipment", "n03278248"},
    {"Fish", "n02512053"},                {"Footwear", "n03380867"},
    {"Fruit", "n13134947"},               {"Fungus", "n12992868"},
    {"Geological Formation", "n09287968"}, {"Hoofed Animal", "n02370806"},
    {"Insect", "n02159955"},              {"Musical Instrument", "n03800933"},
    {"Primate", "n02469914"},             {"Reptile", "n01661091"},
    {"Utensil", "n04516672"},             {"Vegetable", "n07707451"},
    {"Vehicle", "n04576211"},
}};

/// Broad class -> subtypes.
using Taxonomy = std::map<std::string, std::vector<std::string>>;

inline Taxonomy cifar100_taxonomy() {
  return {
      {"aquatic_mammals", {"beaver", "dolphin", "otter", "seal", "whale"}},
      {"fish", {"aquarium_fish", "flatfish", "ray", "shark", "trout"}},
      {"flowers", {"orchid", "poppy", "rose", "sunflower", "tulip"}},
      {"food_containers", {"bottle", "bowl", "can", "cup", "plate"}},
      {"fruit_and_vegetables", {"apple", "mushroom", "orange", "pear", "sweet_pepper"}},
      {"household_electrical_devices", {"clock", "keyboard", "lamp", "telephone", "television"}},
      {"household_furniture", {"bed", "chair", "couch", "table", "wardrobe"}},
      {"insects", {"bee", "beetle", "butterfly", "caterpillar", "cockroach"}},
      {"large_carnivores", {"bear", "leopard", "lion", "tiger", "wolf"}},
      {"large_man-made_outdoor_things", {"bridge", "castle", "house", "road", "skyscraper"}},
      {"large_natural_outdoor_scenes", {"cloud", "forest", "mountain", "plain", "sea"}},
      {"large_omnivores_and_herbivores", {"camel", "cattle", "chimpanzee", "elephant", "kangaroo"}},
      {"medium_mammals", {"fox", "porcupine", "possum", "raccoon", "skunk"}},
      {"non-insect_invertebrates", {"crab", "lobster", "snail", "spider", "worm"}},
      {"people", {"baby", "boy", "girl", "man", "woman"}},
      {"reptiles", {"crocodile", "dinosaur", "lizard", "snake", "turtle"}},
      {"small_mammals", {"hamster", "mouse", "rabbit", "shrew", "squirrel"}},
      {"trees", {"maple_tree", "oak_tree", "palm_tree", "pine_tree", "willow_tree"}},
      {"vehicles_1", {"bicycle", "bus", "motorcycle", "pickup_truck", "train"}},
      {"vehicles_2", {"lawn_mower", "rocket", "streetcar", "tank", "tractor"}},
  };
}

/// Tab-separated "broad<TAB>subtype" lines; '#' starts a comment.
inline Taxonomy parse_taxonomy(std::istream& in) {
  Taxonomy t;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw Error("taxonomy line without tab: " + line);
    auto& subs = t[line.substr(0, tab)];
    const auto sub = line.substr(tab + 1);
    if (std::find(subs.begin(), subs.end(), sub) == subs.end()) subs.push_back(sub);
  }
  return t;
}

inline Taxonomy load_taxonomy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_taxonomy(in);
}

struct IconRecord {
  std::string path;
  std::string broad_class;
  std::string platform;
  std::string subtype;
  std::string version;
};

/// Compares strings with embedded digit runs by numeric value, so "v2" < "v10".
inline bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])), db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na[0] == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb[0] == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
  return a < b;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (c == sep && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

/// Reads a delimited table (tab or comma, chosen from the header) with the
/// columns path, class, platform, subtype, version in any order. When
/// `allowed_classes` is nonempty every class must belong to it.
inline std::vector<IconRecord> parse_icon_records(std::istream& in,
                                                  const std::vector<std::string>& allowed_classes = {}) {
  std::string header;
  if (!std::getline(in, header)) throw Error("metadata table is empty");
  const char sep = header.find('\t') != std::string::npos ? '\t' : ',';
  const auto cols = detail::split_fields(header, sep);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cols.size(); ++i) index[cols[i]] = i;
  for (const char* need : {"path", "class", "platform", "subtype", "version"})
    if (!index.contains(need)) throw Error(std::string("metadata table lacks column '") + need + "'");
  const std::set<std::string> allowed(allowed_classes.begin(), allowed_classes.end());
  std::vector<IconRecord> out;
  std::set<std::string> paths;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = detail::split_fields(line, sep);
    if (f.size() != cols.size()) throw Error("metadata line " + std::to_string(lineno) + ": wrong field count");
    IconRecord r{f[index["path"]], f[index["class"]], f[index["platform"]], f[index["subtype"]], f[index["version"]]};
    if (!allowed.empty() && !allowed.contains(r.broad_class))
      throw Error("metadata line " + std::to_string(lineno) + ": unknown class '" + r.broad_class + "'");
    if (!paths.insert(r.path).second) throw Error("duplicate path in metadata: " + r.path);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<IconRecord> load_icon_records(const std::filesystem::path& path,
                                                 const std::vector<std::string>& allowed_classes = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_icon_records(in, allowed_classes);
}

inline std::vector<std::string> icons50_class_list() { return {kIcons50Classes.begin(), kIcons50Classes.end()}; }

enum class SplitProtocol { StyleHoldout, SubtypeHoldout, VersionHoldout, TaxonomyHoldout };

inline std::string_view protocol_name(SplitProtocol p) {
  switch (p) {
    case SplitProtocol::StyleHoldout: return "style_holdout";
    case SplitProtocol::SubtypeHoldout: return "subtype_holdout";
    case SplitProtocol::VersionHoldout: return "version_holdout";
    case SplitProtocol::TaxonomyHoldout: return "taxonomy_holdout";
  }
  return "?";
}

inline SplitProtocol parse_protocol(std::string_view s) {
  for (auto p : {SplitProtocol::StyleHoldout, SplitProtocol::SubtypeHoldout, SplitProtocol::VersionHoldout,
                 SplitProtocol::TaxonomyHoldout})
    if (s == protocol_name(p) || s == protocol_name(p).substr(0, protocol_name(p).find('_'))) return p;
  throw Error("unknown split protocol '" + std::string(s) + "'");
}

struct ExcludedRecord {
  std::string id;
  std::string reason;
};

struct SplitSpec {
  SplitProtocol protocol;
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::vector<ExcludedRecord> excluded;
  nlohmann::json descriptor;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> labels;  // id -> broad class

  nlohmann::json to_json() const {
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& e : excluded) ex.push_back({{"id", e.id}, {"reason", e.reason}});
    return {{"format", "corrupt-bench-split/1"},
            {"protocol", protocol_name(protocol)},
            {"descriptor", descriptor},
            {"train", train},
            {"test", test},
            {"excluded", ex},
            {"warnings", warnings},
            {"labels", labels}};
  }

  static SplitSpec from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "corrupt-bench-split/1") throw Error("not a corrupt-bench split file");
    SplitSpec s{parse_protocol(j.at("protocol").get<std::string>()),
                j.at("train").get<std::vector<std::string>>(),
                j.at("test").get<std::vector<std::string>>(),
                {},
                j.at("descriptor"),
                j.value("warnings", std::vector<std::string>{}),
                j.value("labels", std::map<std::string, std::string>{})};
    for (const auto& e : j.at("excluded")) s.excluded.push_back({e.at("id"), e.at("reason")});
    return s;
  }
};

namespace detail {

inline SplitSpec make_split(SplitProtocol protocol, const std::vector<IconRecord>& records,
                            const std::function<bool(const IconRecord&)>& is_test,
                            const std::function<std::optional<std::string>(const IconRecord&)>& exclusion = {}) {
  SplitSpec s{protocol, {}, {}, {}, nlohmann::json::object(), {}, {}};
  for (const auto& r : records) {
    if (exclusion)
      if (auto why = exclusion(r)) {
        s.excluded.push_back({r.path, *why});
        continue;
      }
    (is_test(r) ? s.test : s.train).push_back(r.path);
    s.labels[r.path] = r.broad_class;
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.excluded.begin(), s.excluded.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return s;
}

}  // namespace detail

/// Test = every record rendered by `platform`; train = the rest.
inline SplitSpec style_holdout(const std::vector<IconRecord>& records, const std::string& platform) {
  std::set<std::string> all_classes, held_classes;
  bool found = false;
  for (const auto& r : records) {
    all_classes.insert(r.broad_class);
    if (r.platform == platform) {
      found = true;
      held_classes.insert(r.broad_class);
    }
  }
  if (!found) throw Error("platform '" + platform + "' has no records");
  auto s = detail::make_split(SplitProtocol::StyleHoldout, records,
                              [&](const IconRecord& r) { return r.platform == platform; });
  s.descriptor = {{"platform", platform}};
  std::vector<std::string> missing;
  for (const auto& c : all_classes)
    if (!held_classes.contains(c)) missing.push_back(c);
  if (!missing.empty()) {
    std::string w = "classes with no held-out icons:";
    for (const auto& c : missing) w += " " + c + ";";
    w.pop_back();
    s.warnings.push_back(w);
  }
  return s;
}

/// Test = records whose subtype is held out. An entry "Class/subtype"
/// names one class's subtype; a bare "subtype" matches it in every class.
/// Holding out every subtype of a broad class is refused.
inline SplitSpec subtype_holdout(const std::vector<IconRecord>& records, const std::vector<std::string>& held) {
  std::map<std::string, std::set<std::string>> subtypes;
  for (const auto& r : records) subtypes[r.broad_class].insert(r.subtype);
  std::set<std::pair<std::string, std::string>> held_pairs;
  for (const auto& h : held) {
    bool matched = false;
    if (const auto slash = h.find('/'); slash != std::string::npos) {
      const auto cls = h.substr(0, slash), sub = h.substr(slash + 1);
      if (subtypes.contains(cls) && subtypes[cls].contains(sub)) {
        held_pairs.insert({cls, sub});
        matched = true;
      }
    } else {
      for (const auto& [cls, subs] : subtypes)
        if (subs.contains(h)) {
          held_pairs.insert({cls, h});
          matched = true;
        }
    }
    if (!matched) throw Error("held-out subtype '" + h + "' not found in metadata");
  }
  for (const auto& [cls, subs] : subtypes) {
    std::size_t n = 0;
    for (const auto& sub : subs) n += held_pairs.contains({cls, sub});
    if (n == subs.size())
      throw Error("entire broad class withheld: '" + cls +
                  "' would have no training subtypes (entire broad classes are not withheld)");
  }
  auto s = detail::make_split(SplitProtocol::SubtypeHoldout, records, [&](const IconRecord& r) {
    return held_pairs.contains({r.broad_class, r.subtype});
  });
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [cls, sub] : held_pairs) list.push_back(cls + "/" + sub);
  s.descriptor = {{"subtypes", list}};
  return s;
}

/// For every (class, platform, subtype) group with two or more versions,
/// the highest version id (natural order) goes to test.
inline SplitSpec version_holdout(const std::vector<IconRecord>& records) {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<std::string>> versions;
  for (const auto& r : records) {
    if (r.version.empty()) throw Error("record " + r.path + " has no version id");
    auto& v = versions[{r.broad_class, r.platform, r.subtype}];
    if (std::find(v.begin(), v.end(), r.version) == v.end()) v.push_back(r.version);
  }
  std::map<std::tuple<std::string, std::string, std::string>, std::string> held;
  for (const auto& [group, v] : versions)
    if (v.size() >= 2) held[group] = *std::max_element(v.begin(), v.end(), natural_less);
  auto s = detail::make_split(SplitProtocol::VersionHoldout, records, [&](const IconRecord& r) {
    auto it = held.find({r.broad_class, r.platform, r.subtype});
    return it != held.end() && it->second == r.version;
  });
  s.descriptor = {{"rule", "highest version id per (class, platform, subtype) group with >= 2 versions"},
                  {"groups_held", held.size()}};
  return s;
}

/// Seeded uniform choice of k held-out subtypes per broad class of the
/// taxonomy. Records outside the taxonomy are excluded and listed.
inline SplitSpec taxonomy_holdout(const std::vector<IconRecord>& records, const Taxonomy& taxonomy, int k,
                                  std::uint64_t seed) {
  if (k < 0) throw Error("k must be non-negative");
  std::set<std::pair<std::string, std::string>> held;
  nlohmann::json desc_held = nlohmann::json::object();
  for (const auto& [cls, subs] : taxonomy) {
    if (static_cast<std::size_t>(k) >= subs.size())
      throw Error("k = " + std::to_string(k) + " leaves no training subtype in '" + cls + "' (" +
                  std::to_string(subs.size()) + " subtypes)");
    auto order = subs;
    std::sort(order.begin(), order.end());
    Rng64 rng = Rng64(seed).split(cls);
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(i, static_cast<std::int64_t>(order.size()) - 1));
      std::swap(order[static_cast<std::size_t>(i)], order[j]);
    }
    std::vector<std::string> chosen(order.begin(), order.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    for (const auto& c : chosen) held.insert({cls, c});
    desc_held[cls] = chosen;
  }
  auto s = detail::make_split(
      SplitProtocol::TaxonomyHoldout, records,
      [&](const IconRecord& r) { return held.contains({r.broad_class, r.subtype}); },
      [&](const IconRecord& r) -> std::optional<std::string> {
        auto it = taxonomy.find(r.broad_class);
        if (it == taxonomy.end()) return "class not in taxonomy";
        if (std::find(it->second.begin(), it->second.end(), r.subtype) == it->second.end())
          return "subtype not in taxonomy";
        return std::nullopt;
      });
  s.descriptor = {{"k", k}, {"seed", hex_u64(seed)}, {"held", desc_held}};
  return s;
}

/// Problems with a split: overlap, ids outside the corpus, and corpus
/// records that are neither in train, test nor the exclusion list.
inline std::vector<std::string> partition_violations(const SplitSpec& s, const std::vector<IconRecord>& records) {
  std::vector<std::string> out;
  std::map<std::string, int> where;
  for (const auto& id : s.train) where[id] |= 1;
  for (const auto& id : s.test) {
    if (where[id] & 1) out.push_back("in train and test: " + id);
    where[id] |= 2;
  }
  for (const auto& e : s.excluded) {
    if (where[e.id]) out.push_back("excluded but assigned: " + e.id);
    where[e.id] |= 4;
  }
  std::set<std::string> corpus;
  for (const auto& r : records) corpus.insert(r.path);
  for (const auto& [id, mask] : where)
    if (!corpus.contains(id)) out.push_back("not in corpus: " + id);
  for (const auto& id : corpus)
    if (!where.contains(id)) out.push_back("unassigned: " + id);
  return out;
}

struct SplitScore {
  double accuracy;
  std::size_t correct;
  std::size_t total;
};

/// Fraction of test ids whose predicted broad class equals the true one.
inline SplitScore score_split(const PredictionLog& log, const SplitSpec& split) {
  if (split.test.empty()) throw Error("split has no test ids");
  std::map<std::string, const PredictionRecord*> by_id;
  for (const auto& r : log)
    if (!by_id.emplace(r.image_id, &r).second) throw Error("duplicate prediction for " + r.image_id);
  std::vector<std::string> missing;
  std::size_t correct = 0;
  for (const auto& id : split.test) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      missing.push_back(id);
      continue;
    }
    correct += it->second->pred == it->second->label;
  }
  if (!missing.empty()) {
    std::string msg = "predictions missing for " + std::to_string(missing.size()) + " test ids:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw Error(msg);
  }
  return {static_cast<double>(correct) / static_cast<double>(split.test.size()), correct, split.test.size()};
}

}  // namespace corrupt_bench
