#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "corrupt_bench/corruption_kind.hpp"
#include "corrupt_bench/image.hpp"

namespace corrupt_bench {

using Digest = std::array<unsigned char, 32>;

/// Incremental SHA-256 (OpenSSL EVP).
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const unsigned char> bytes) {
    EVP_DigestUpdate(ctx_, bytes.data(), bytes.size());
    return *this;
  }
  Sha256& update(std::string_view s) {
    EVP_DigestUpdate(ctx_, s.data(), s.size());
    return *this;
  }
  Sha256& update_u64(std::uint64_t v) {
    unsigned char le[8];
    for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(v >> (8 * i));
    return update(std::span<const unsigned char>(le, 8));
  }

  Digest finish() {
    Digest d{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, d.data(), &len);
    return d;
  }

 private:
  EVP_MD_CTX* ctx_;
};

inline Digest sha256(std::span<const unsigned char> bytes) { return Sha256().update(bytes).finish(); }

inline std::string to_hex(std::span<const unsigned char> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

inline std::uint64_t digest_prefix_u64(const Digest& d) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(d[i]) << (8 * i);
  return v;
}

/// Hash of the 8-bit encoding of an image plus its dimensions. Two images
/// that write out to the same 8-bit file hash equal.
inline std::string pixel_hash(const ImageBuf& img) {
  Sha256 h;
  h.update_u64(static_cast<std::uint64_t>(img.width())).update_u64(static_cast<std::uint64_t>(img.height()));
  const auto rgb = img.to_rgb8();
  h.update(rgb);
  const auto d = h.finish();
  return to_hex(d);
}

/// Hash of the raw float bit patterns.
inline std::string sample_bits_hash(const ImageBuf& img) {
  Sha256 h;
  h.update_u64(static_cast<std::uint64_t>(img.width())).update_u64(static_cast<std::uint64_t>(img.height()));
  auto s = img.samples();
  h.update(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(s.data()),
                                          s.size_bytes()));
  return to_hex(h.finish());
}

/// Per-image corruption seed: the first 8 bytes (little endian) of
/// SHA-256("corrupt-bench/seed/v1" NUL, salt as u64 LE, path length as u64
/// LE, path bytes, kind name, NUL, severity byte). Depends only on the
/// tuple, never on traversal order.
inline constexpr std::string_view kSeedRule = "sha256/corrupt-bench/seed/v1";

inline std::uint64_t derive_seed(std::uint64_t salt, std::string_view relative_path, CorruptionKind kind,
                                 int severity) {
  Sha256 h;
  h.update(std::string_view("corrupt-bench/seed/v1\0", 22));
  h.update_u64(salt).update_u64(relative_path.size()).update(relative_path);
  h.update(name_of(kind)).update(std::string_view("\0", 1));
  const unsigned char sev = static_cast<unsigned char>(severity);
  h.update(std::span<const unsigned char>(&sev, 1));
  return digest_prefix_u64(h.finish());
}

}  // namespace corrupt_bench
