#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace cirf {

// FNV-1a, used for container checksums and CSV config hashes.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= b[i];
      h_ *= 0x100000001b3ULL;
    }
  }

  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a(std::string_view s) {
  Fnv1a h;
  h.update(s.data(), s.size());
  return h.digest();
}

}  // namespace cirf
