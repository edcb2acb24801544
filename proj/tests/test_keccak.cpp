#include <catch2/catch_amalgamated.hpp>

#include "aestore/chunk_store.hpp"
#include "aestore/keccak.hpp"
#include "aestore/util.hpp"

using namespace aestore;

TEST_CASE("keccak256 matches published digests", "[keccak]") {
  CHECK(to_hex(keccak256(Bytes{})) ==
        "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
  Bytes abc = {'a', 'b', 'c'};
  CHECK(to_hex(keccak256(abc)) ==
        "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
}

TEST_CASE("keccak256 handles rate-boundary inputs", "[keccak]") {
  // 135/136/137 bytes straddle the 1088-bit sponge rate
  for (std::size_t n : {135u, 136u, 137u, 272u}) {
    Bytes a(n, 0x5a), b(n, 0x5a);
    CHECK(keccak256(a) == keccak256(b));
    b[n / 2] ^= 1;
    CHECK(keccak256(a) != keccak256(b));
  }
}

// Frozen address vectors, computed once with an independent reference
// implementation of Keccak-256 over (LE64 length || payload).
TEST_CASE("chunk address test vectors", "[keccak][store]") {
  Bytes zeros(4096, 0x00);
  CHECK(address_of(zeros).hex() ==
        "411dd45de7246e94589ff5888362c41e85bd3e582a92d0fda8f0e90b76439bec");

  Bytes one = {0x41};
  CHECK(address_of(one).hex() ==
        "7e7f5629cecb161408edf5a9229739e198ab29f25faafb7ff6d0d2dc3e7571cf");

  Bytes pat(4095);
  for (std::size_t i = 0; i < pat.size(); ++i) pat[i] = static_cast<std::uint8_t>(i % 251);
  CHECK(address_of(pat).hex() ==
        "1a614a1cc17974f7f1a17e0bf36a73d50c77ff19c2ac1186118b7699904e10be");
}

TEST_CASE("addresses are length-aware and deterministic", "[store]") {
  Bytes a = {'A'};
  Bytes aa = {'A', 'A'};
  CHECK(address_of(a) == address_of(a));
  CHECK(address_of(a) != address_of(aa));
  CHECK(address_of(a).hex() ==
        "7e7f5629cecb161408edf5a9229739e198ab29f25faafb7ff6d0d2dc3e7571cf");
  CHECK(address_of(aa).hex() ==
        "6b0187ec9e71fec2b34fa54e3afdf4ab401c444faab486ea1a2eecbad429ac2d");
}

TEST_CASE("address_of rejects out-of-bound payloads", "[store]") {
  CHECK_THROWS_AS(address_of(Bytes(4097, 0)), ChunkTooLargeError);
  CHECK_THROWS_AS(address_of(Bytes{}), Error);
}

TEST_CASE("content addressing is injective over random chunks", "[store][property]") {
  std::unordered_set<ChunkAddress> seen;
  std::mt19937_64 gen(7);
  std::size_t collisions = 0;
  for (std::uint32_t i = 0; i < 100000; ++i) {
    std::size_t len = 8 + gen() % 57;
    Bytes payload = random_bytes(len, gen());
    // stamp the counter so payloads are pairwise distinct by construction
    for (int k = 0; k < 4; ++k) payload[k] = static_cast<std::uint8_t>(i >> (8 * k));
    if (!seen.insert(address_of(payload)).second) ++collisions;
  }
  CHECK(collisions == 0);
}
