#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "aestore/errors.hpp"
#include "aestore/keccak.hpp"
#include "aestore/util.hpp"

namespace aestore {

inline constexpr std::size_t kMaxChunkSize = 4096;

// Content-derived 32-byte chunk address:
//   keccak256(little-endian uint64 payload length || payload)
struct ChunkAddress {
  std::array<std::uint8_t, 32> digest{};

  std::string hex() const { return to_hex(digest); }

  static ChunkAddress from_hex(const std::string& hex) {
    Bytes raw = aestore::from_hex(hex);
    if (raw.size() != 32) throw Error("chunk address must be 32 bytes");
    ChunkAddress a;
    std::copy(raw.begin(), raw.end(), a.digest.begin());
    return a;
  }

  // first 8 digest bytes as a little-endian integer; used for policy seeding
  std::uint64_t prefix64() const {
    std::uint64_t v;
    std::memcpy(&v, digest.data(), 8);
    return v;
  }

  friend bool operator==(const ChunkAddress& a, const ChunkAddress& b) {
    return a.digest == b.digest;
  }
  friend bool operator!=(const ChunkAddress& a, const ChunkAddress& b) { return !(a == b); }
  friend bool operator<(const ChunkAddress& a, const ChunkAddress& b) {
    return a.digest < b.digest;
  }
};

}  // namespace aestore

template <>
struct std::hash<aestore::ChunkAddress> {
  std::size_t operator()(const aestore::ChunkAddress& a) const noexcept {
    return static_cast<std::size_t>(a.prefix64());  // digest bytes are already uniform
  }
};

namespace aestore {

inline ChunkAddress address_of(std::span<const std::uint8_t> payload) {
  if (payload.empty()) throw Error("chunk payload must not be empty");
  if (payload.size() > kMaxChunkSize)
    throw ChunkTooLargeError("chunk payload of " + std::to_string(payload.size()) +
                             " bytes exceeds " + std::to_string(kMaxChunkSize));
  Bytes buf;
  buf.reserve(8 + payload.size());
  std::uint64_t len = payload.size();
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  buf.insert(buf.end(), payload.begin(), payload.end());
  return ChunkAddress{keccak256(buf)};
}

enum class GetStatus : std::uint8_t {
  hit,          // payload returned and verified against the address
  unavailable,  // unknown address, injected failure, or retrieval timeout
  corrupt,      // payload found but fails its address check
};

struct GetResult {
  GetStatus status = GetStatus::unavailable;
  Bytes payload;

  bool ok() const { return status == GetStatus::hit; }

  static GetResult hit(Bytes p) { return {GetStatus::hit, std::move(p)}; }
  static GetResult unavailable() { return {GetStatus::unavailable, {}}; }
  static GetResult corrupt() { return {GetStatus::corrupt, {}}; }
};

class ChunkStore {
 public:
  virtual ~ChunkStore() = default;

  // Idempotent; the chunk stays retrievable under the returned address.
  virtual ChunkAddress put(std::span<const std::uint8_t> payload) = 0;
  virtual GetResult get(const ChunkAddress& addr) = 0;
};

class MemoryStore : public ChunkStore {
 public:
  ChunkAddress put(std::span<const std::uint8_t> payload) override {
    ChunkAddress addr = address_of(payload);
    std::unique_lock lock(mutex_);
    chunks_.try_emplace(addr, payload.begin(), payload.end());
    return addr;
  }

  GetResult get(const ChunkAddress& addr) override {
    Bytes payload;
    {
      std::shared_lock lock(mutex_);
      auto it = chunks_.find(addr);
      if (it == chunks_.end()) return GetResult::unavailable();
      payload = it->second;
    }
    if (address_of(payload) != addr) return GetResult::corrupt();
    return GetResult::hit(std::move(payload));
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return chunks_.size();
  }

  // test hook: silently replace a stored payload without touching its key
  void tamper(const ChunkAddress& addr, Bytes payload) {
    std::unique_lock lock(mutex_);
    chunks_[addr] = std::move(payload);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<ChunkAddress, Bytes> chunks_;
};

// One file per chunk named by the hex address, under a two-level fan-out
// directory keyed on the first two hex characters.
class DiskStore : public ChunkStore {
 public:
  explicit DiskStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw StoreUnavailableError("cannot create store root: " + ec.message());
  }

  ChunkAddress put(std::span<const std::uint8_t> payload) override {
    ChunkAddress addr = address_of(payload);
    std::filesystem::path path = chunk_path(addr);
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) return addr;  // idempotent re-put
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw StoreUnavailableError("cannot create fan-out dir: " + ec.message());

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw StoreUnavailableError("cannot open " + tmp.string());
      out.write(reinterpret_cast<const char*>(payload.data()),
                static_cast<std::streamsize>(payload.size()));
      if (!out) throw StoreUnavailableError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw StoreUnavailableError("cannot rename chunk file: " + ec.message());
    return addr;
  }

  GetResult get(const ChunkAddress& addr) override {
    std::ifstream in(chunk_path(addr), std::ios::binary);
    if (!in) return GetResult::unavailable();
    Bytes payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (payload.empty() || payload.size() > kMaxChunkSize) return GetResult::corrupt();
    if (address_of(payload) != addr) return GetResult::corrupt();
    return GetResult::hit(std::move(payload));
  }

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path chunk_path(const ChunkAddress& addr) const {
    std::string hex = addr.hex();
    return root_ / hex.substr(0, 2) / hex;
  }

  std::filesystem::path root_;
};

}  // namespace aestore
