#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aestore/errors.hpp"

namespace aestore {

using Bytes = std::vector<std::uint8_t>;

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

inline Bytes from_hex(const std::string& hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw Error("hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error("invalid hex digit in \"" + hex + "\"");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

inline void xor_into(Bytes& acc, std::span<const std::uint8_t> other) {
  if (acc.size() != other.size()) throw Error("xor operands differ in length");
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] ^= other[i];
}

inline Bytes xor_bytes(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  Bytes out(a.begin(), a.end());
  xor_into(out, b);
  return out;
}

// Portable uniform double in [0, 1) from a seeded mt19937_64. Used instead of
// uniform_real_distribution, whose output is implementation-defined.
inline double seeded_unit_uniform(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline Bytes random_bytes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Bytes out(n);
  std::size_t i = 0;
  while (i + 8 <= n) {
    std::uint64_t v = gen();
    for (int k = 0; k < 8; ++k) out[i++] = static_cast<std::uint8_t>(v >> (8 * k));
  }
  if (i < n) {
    std::uint64_t v = gen();
    while (i < n) {
      out[i++] = static_cast<std::uint8_t>(v);
      v >>= 8;
    }
  }
  return out;
}

}  // namespace aestore
