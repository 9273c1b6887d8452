#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace brightside {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// 64-bit FNV-1a over raw bytes; `seed` lets callers chain several fields.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t seed = kFnvOffset) noexcept {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Lowercase, zero-padded, 16 hex digits.
std::string to_hex(std::uint64_t value);

}  // namespace brightside
