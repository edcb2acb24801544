#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "aestore/chunk_store.hpp"
#include "aestore/codec.hpp"

namespace aestore {

inline constexpr int kManifestVersion = 1;

// Client-side index from every lattice block of a file to its chunk address.
// Without it the chunks are unaddressable; it is what gets kept in local
// storage after an upload.
struct ManifestIndex {
  CodecConfig codec;
  std::unordered_map<BlockId, ChunkAddress> entries;
  std::string created_at;  // ISO 8601 UTC

  std::optional<ChunkAddress> find(const BlockId& b) const {
    auto it = entries.find(b);
    if (it == entries.end()) return std::nullopt;
    return it->second;
  }

  // exactly n_data data entries plus alpha * n_data parity entries
  void validate() const {
    codec.validate();
    std::size_t data = 0, parity = 0;
    for (const auto& [id, addr] : entries) {
      (id.is_data() ? data : parity)++;
    }
    std::size_t n = codec.lattice.n_data;
    if (data != n || parity != codec.lattice.alpha * n)
      throw IncompleteInputError("manifest entry count mismatch: " + std::to_string(data) +
                                 " data / " + std::to_string(parity) + " parity for n_data " +
                                 std::to_string(n));
  }

  // Deterministic entry order: data blocks by node, then parities by
  // (node, strand). Two entangles of one file serialize identically apart
  // from created_at.
  std::vector<BlockId> ordered_ids() const {
    std::vector<BlockId> ids;
    ids.reserve(entries.size());
    for (std::uint32_t i = 1; i <= codec.lattice.n_data; ++i)
      ids.push_back(BlockId::data_block(i));
    for (std::uint32_t i = 1; i <= codec.lattice.n_data; ++i)
      for (StrandClass x : kAllStrands) ids.push_back(BlockId::parity_block(i, x));
    return ids;
  }
};

inline std::string current_utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json manifest_to_json(const ManifestIndex& m) {
  nlohmann::json j;
  j["version"] = kManifestVersion;
  j["alpha"] = m.codec.lattice.alpha;
  j["s"] = m.codec.lattice.s;
  j["p"] = m.codec.lattice.p;
  j["block_size"] = m.codec.block_size;
  j["original_length"] = m.codec.original_length;
  j["n_data"] = m.codec.lattice.n_data;
  j["created_at"] = m.created_at;
  nlohmann::json entries = nlohmann::json::array();
  for (const BlockId& id : m.ordered_ids()) {
    auto addr = m.find(id);
    if (!addr) throw IncompleteInputError("manifest missing entry for " + id.str());
    nlohmann::json e;
    e["class"] = id.is_data() ? "data" : "parity";
    e["node"] = id.node;
    if (id.is_parity()) e["strand"] = to_string(id.strand);
    e["address-hex"] = addr->hex();
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

inline ManifestIndex manifest_from_json(const nlohmann::json& j) {
  if (j.at("version").get<int>() != kManifestVersion)
    throw Error("unsupported manifest version");
  ManifestIndex m;
  m.codec.lattice.alpha = j.at("alpha").get<std::uint32_t>();
  m.codec.lattice.s = j.at("s").get<std::uint32_t>();
  m.codec.lattice.p = j.at("p").get<std::uint32_t>();
  m.codec.block_size = j.at("block_size").get<std::uint32_t>();
  m.codec.original_length = j.at("original_length").get<std::uint64_t>();
  m.codec.lattice.n_data = j.at("n_data").get<std::uint32_t>();
  m.created_at = j.value("created_at", "");
  for (const auto& e : j.at("entries")) {
    BlockId id;
    std::string cls = e.at("class").get<std::string>();
    id.node = e.at("node").get<std::uint32_t>();
    if (cls == "data") {
      id.cls = BlockClass::data;
    } else if (cls == "parity") {
      id.cls = BlockClass::parity;
      auto strand = strand_from_string(e.at("strand").get<std::string>());
      if (!strand) throw Error("unknown strand class in manifest");
      id.strand = *strand;
    } else {
      throw Error("unknown block class in manifest: " + cls);
    }
    m.entries[id] = ChunkAddress::from_hex(e.at("address-hex").get<std::string>());
  }
  m.validate();
  return m;
}

inline void save_manifest(const ManifestIndex& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write manifest to " + path);
  out << manifest_to_json(m).dump(2) << "\n";
}

inline ManifestIndex load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read manifest from " + path);
  nlohmann::json j;
  in >> j;
  return manifest_from_json(j);
}

// Splits, encodes, and uploads a file; returns the manifest needed to
// retrieve it later.
inline ManifestIndex entangle(std::span<const std::uint8_t> file, const CodecConfig& cfg,
                              ChunkStore& store) {
  std::vector<Block> data = split(file, cfg);
  std::vector<Block> parities = encode(data, cfg);
  ManifestIndex m;
  m.codec = cfg;
  m.created_at = current_utc_timestamp();
  m.entries.reserve(data.size() + parities.size());
  for (const Block& b : data) m.entries[b.id] = store.put(b.payload);
  for (const Block& b : parities) m.entries[b.id] = store.put(b.payload);
  m.validate();
  return m;
}

}  // namespace aestore
