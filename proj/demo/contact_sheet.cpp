// Writes a PNG grid: one row per corruption kind, the clean image then
// severities 1..5.
//   contact_sheet OUT.png [image-index] [tile-size]

#include <cstdio>
#include <cstdlib>

#include "corrupt_bench/corrupt_bench.hpp"

using namespace corrupt_bench;

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s OUT.png [image-index] [tile-size]\n", argv[0]);
    return 2;
  }
  const int index = argc > 2 ? std::atoi(argv[2]) : 7;
  const int tile = argc > 3 ? std::atoi(argv[3]) : 128;
  try {
    const auto table = load_severity_table("v1");
    const auto clean = reference_image(index, tile);
    const int cols = 1 + kSeverityCount, rows = static_cast<int>(kKindCount);
    std::vector<float> sheet(static_cast<std::size_t>(cols) * tile * rows * tile * 3);
    auto paste = [&](const ImageBuf& img, int col, int row) {
      for (int y = 0; y < tile; ++y)
        for (int x = 0; x < tile; ++x)
          for (int c = 0; c < 3; ++c)
            sheet[((static_cast<std::size_t>(row) * tile + y) * cols * tile + col * tile + x) * 3 + c] = img.at(x, y, c);
    };
    for (int r = 0; r < rows; ++r) {
      const auto kind = kKinds[static_cast<std::size_t>(r)].kind;
      paste(clean, 0, r);
      for (int s = 1; s <= kSeverityCount; ++s)
        paste(apply_corruption(clean, kind, s, derive_seed(1, "sheet", kind, s), table), s, r);
      std::printf("%-18s done\n", std::string(name_of(kind)).c_str());
    }
    write_file(argv[1], encode_png(ImageBuf::from_samples(cols * tile, rows * tile, std::move(sheet))));
    std::printf("wrote %s\n", argv[1]);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
