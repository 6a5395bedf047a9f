#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vcalib {

// Hex-encoded SHA-256; used for request fingerprints and config hashes.
std::string sha256_hex(std::string_view data);

// FNV-1a 64-bit; stable across platforms, used to seed deterministic mocks.
constexpr std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Shortest round-trip decimal form of a double ("80", "0.625", "87.5").
std::string format_double(double v);

}  // namespace vcalib
