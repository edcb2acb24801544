#pragma once

// Brute-force recoverability oracle for the entanglement lattice. Starting
// from the surviving blocks it keeps applying the two xor rules
//
//   data i   <- P_in(i, x)  xor P_out(i, x)        (any strand x)
//   P(i->j)  <- d_i xor P_in(i, x)                 (backward)
//   P(i->j)  <- d_j xor P_out(j, x)                (forward)
//
// until nothing new becomes derivable. The head's incoming parity is the
// always-known virtual zero. Geometry is recomputed from scratch here so the
// oracle stays independent of the library implementation it judges.

#include <cstdint>
#include <unordered_set>
#include <vector>

namespace oracle {

enum Strand : std::uint32_t { H = 0, RH = 1, LH = 2 };

inline std::uint64_t data_key(std::uint32_t i) { return static_cast<std::uint64_t>(i) << 3; }
inline std::uint64_t parity_key(std::uint32_t i, std::uint32_t x) {
  return (static_cast<std::uint64_t>(i) << 3) | 0x4u | x;
}

inline std::uint32_t row_of(std::uint32_t i, std::uint32_t s) { return (i - 1) % s; }
inline std::uint32_t col_of(std::uint32_t i, std::uint32_t s) { return (i - 1) / s; }

inline std::uint32_t succ(std::uint32_t i, std::uint32_t x, std::uint32_t s) {
  std::uint32_t r = row_of(i, s), c = col_of(i, s);
  std::uint32_t r2 = x == H ? r : (x == RH ? (r + 1) % s : (r + s - 1) % s);
  return (c + 1) * s + r2 + 1;
}

// 0 when i sits in column 0 (no predecessor; incoming parity is virtual zero)
inline std::uint32_t pred(std::uint32_t i, std::uint32_t x, std::uint32_t s) {
  std::uint32_t r = row_of(i, s), c = col_of(i, s);
  if (c == 0) return 0;
  std::uint32_t r2 = x == H ? r : (x == RH ? (r + s - 1) % s : (r + 1) % s);
  return (c - 1) * s + r2 + 1;
}

// failed: keys (data_key / parity_key) of the withheld stored blocks
inline bool recoverable(std::uint32_t s, std::uint32_t n,
                        const std::unordered_set<std::uint64_t>& failed) {
  std::unordered_set<std::uint64_t> known;
  for (std::uint32_t i = 1; i <= n; ++i) {
    if (!failed.count(data_key(i))) known.insert(data_key(i));
    for (std::uint32_t x = 0; x < 3; ++x)
      if (!failed.count(parity_key(i, x))) known.insert(parity_key(i, x));
  }

  auto in_known = [&](std::uint32_t i, std::uint32_t x) {
    std::uint32_t p = pred(i, x, s);
    if (p == 0) return true;  // virtual zero
    return known.count(parity_key(p, x)) > 0;
  };

  bool progress = true;
  while (progress) {
    progress = false;
    for (std::uint32_t i = 1; i <= n; ++i) {
      if (!known.count(data_key(i))) {
        for (std::uint32_t x = 0; x < 3; ++x) {
          if (in_known(i, x) && known.count(parity_key(i, x))) {
            known.insert(data_key(i));
            progress = true;
            break;
          }
        }
      }
      for (std::uint32_t x = 0; x < 3; ++x) {
        if (known.count(parity_key(i, x))) continue;
        bool backward = known.count(data_key(i)) && in_known(i, x);
        bool forward = false;
        std::uint32_t j = succ(i, x, s);
        if (j <= n)
          forward = known.count(data_key(j)) && known.count(parity_key(j, x));
        if (backward || forward) {
          known.insert(parity_key(i, x));
          progress = true;
        }
      }
    }
  }

  for (std::uint32_t i = 1; i <= n; ++i)
    if (!known.count(data_key(i))) return false;
  return true;
}

}  // namespace oracle
