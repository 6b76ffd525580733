#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>

namespace centaur {

// FNV-1a, 64 bit. Content hashes for opening sets, configs and model files;
// stable across platforms and runs.
class Fnv1a {
 public:
  void update(std::string_view s) noexcept {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  void update(std::span<const std::byte> bytes) noexcept {
    for (std::byte b : bytes) {
      h_ ^= static_cast<unsigned char>(b);
      h_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void update_pod(const T& v) noexcept {
    update(std::as_bytes(std::span<const T, 1>(&v, 1)));
  }
  std::uint64_t digest() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view s) noexcept {
  Fnv1a h;
  h.update(s);
  return h.digest();
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace centaur
