#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "aestore/errors.hpp"
#include "aestore/lattice.hpp"
#include "aestore/util.hpp"

namespace aestore {

inline constexpr std::uint32_t kDefaultBlockSize = 4096;

struct CodecConfig {
  LatticeConfig lattice;
  std::uint32_t block_size = kDefaultBlockSize;
  std::uint64_t original_length = 0;

  // Derives n_data = ceil(length / block_size) for a file of known length.
  static CodecConfig for_file(std::uint64_t length, std::uint32_t s,
                              std::uint32_t block_size = kDefaultBlockSize) {
    if (length == 0) throw EmptyFileError("cannot encode an empty file");
    if (block_size == 0) throw InvalidConfigError("block_size must be positive");
    CodecConfig cfg;
    cfg.block_size = block_size;
    cfg.original_length = length;
    cfg.lattice.s = s;
    cfg.lattice.p = s;
    cfg.lattice.n_data = static_cast<std::uint32_t>((length + block_size - 1) / block_size);
    cfg.validate();
    return cfg;
  }

  void validate() const {
    lattice.validate();
    if (block_size == 0) throw InvalidConfigError("block_size must be positive");
    std::uint64_t expected = (original_length + block_size - 1) / block_size;
    if (expected == 0) expected = 1;
    if (lattice.n_data != expected)
      throw InvalidConfigError("n_data does not match ceil(original_length / block_size)");
  }
};

struct Block {
  BlockId id;
  Bytes payload;  // exactly block_size bytes; final data block zero-padded
};

inline std::vector<Block> split(std::span<const std::uint8_t> file, const CodecConfig& cfg) {
  cfg.validate();
  if (file.empty()) throw EmptyFileError("cannot split an empty file");
  if (file.size() != cfg.original_length)
    throw IncompleteInputError("input length does not match codec config");
  std::vector<Block> blocks;
  blocks.reserve(cfg.lattice.n_data);
  for (std::uint32_t i = 1; i <= cfg.lattice.n_data; ++i) {
    std::size_t begin = static_cast<std::size_t>(i - 1) * cfg.block_size;
    std::size_t len = std::min<std::size_t>(cfg.block_size, file.size() - begin);
    Bytes payload(cfg.block_size, 0);
    std::copy(file.begin() + begin, file.begin() + begin + len, payload.begin());
    blocks.push_back({BlockId::data_block(i), std::move(payload)});
  }
  return blocks;
}

// Computes all alpha * n_data parity blocks by walking each strand chain:
//   P(i -> succ_x(i), x) = d_i xor P(pred_x(i) -> i, x)
// with the virtual all-zero parity standing in at column 0. Nodes are
// processed in index order; a predecessor parity always lives in an earlier
// column, so every chain input is ready when needed.
inline std::vector<Block> encode(const std::vector<Block>& data_blocks,
                                 const CodecConfig& cfg) {
  cfg.validate();
  if (data_blocks.size() != cfg.lattice.n_data)
    throw IncompleteInputError("encode requires all " + std::to_string(cfg.lattice.n_data) +
                               " data blocks, got " + std::to_string(data_blocks.size()));
  for (std::uint32_t i = 1; i <= cfg.lattice.n_data; ++i) {
    const Block& b = data_blocks[i - 1];
    if (b.id != BlockId::data_block(i))
      throw IncompleteInputError("data blocks out of order at node " + std::to_string(i));
    if (b.payload.size() != cfg.block_size)
      throw IncompleteInputError("data block " + std::to_string(i) + " has wrong size");
  }

  std::vector<Block> parities;
  parities.reserve(static_cast<std::size_t>(cfg.lattice.alpha) * cfg.lattice.n_data);
  std::unordered_map<BlockId, std::size_t> index;
  index.reserve(parities.capacity());

  for (std::uint32_t i = 1; i <= cfg.lattice.n_data; ++i) {
    for (StrandClass x : kAllStrands) {
      Bytes payload = data_blocks[i - 1].payload;
      if (auto in = parity_in(i, x, cfg.lattice)) {
        xor_into(payload, parities[index.at(*in)].payload);
      }
      BlockId pid = parity_out(i, x);
      index.emplace(pid, parities.size());
      parities.push_back({pid, std::move(payload)});
    }
  }
  return parities;
}

inline Bytes reassemble(const std::vector<Block>& data_blocks, const CodecConfig& cfg) {
  cfg.validate();
  std::vector<const Block*> by_node(cfg.lattice.n_data, nullptr);
  for (const Block& b : data_blocks) {
    if (b.id.is_data() && b.id.node >= 1 && b.id.node <= cfg.lattice.n_data)
      by_node[b.id.node - 1] = &b;
  }
  std::string missing;
  for (std::uint32_t i = 1; i <= cfg.lattice.n_data; ++i) {
    if (!by_node[i - 1]) missing += (missing.empty() ? "" : ", ") + BlockId::data_block(i).str();
  }
  if (!missing.empty()) throw IncompleteInputError("missing data blocks: " + missing);

  Bytes out;
  out.reserve(static_cast<std::size_t>(cfg.lattice.n_data) * cfg.block_size);
  for (std::uint32_t i = 1; i <= cfg.lattice.n_data; ++i) {
    const Bytes& p = by_node[i - 1]->payload;
    if (p.size() != cfg.block_size)
      throw IncompleteInputError("data block " + std::to_string(i) + " has wrong size");
    out.insert(out.end(), p.begin(), p.end());
  }
  out.resize(cfg.original_length);  // drop final-block padding
  return out;
}

}  // namespace aestore
