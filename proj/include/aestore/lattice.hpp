#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aestore/errors.hpp"

namespace aestore {

// Strand classes of the entanglement lattice. Data nodes fill an s-row
// cylinder column by column; H strands run along rows, RH strands step
// down-right with row wraparound, LH strands step up-right.
enum class StrandClass : std::uint8_t { H = 0, RH = 1, LH = 2 };

inline constexpr std::array<StrandClass, 3> kAllStrands = {StrandClass::H, StrandClass::RH,
                                                           StrandClass::LH};

inline const char* to_string(StrandClass x) {
  switch (x) {
    case StrandClass::H: return "H";
    case StrandClass::RH: return "RH";
    case StrandClass::LH: return "LH";
  }
  return "?";
}

inline std::optional<StrandClass> strand_from_string(const std::string& s) {
  if (s == "H") return StrandClass::H;
  if (s == "RH") return StrandClass::RH;
  if (s == "LH") return StrandClass::LH;
  return std::nullopt;
}

enum class BlockClass : std::uint8_t { data = 0, parity = 1 };

// AE(alpha, s, p) parameters plus the data-block count of one file's lattice.
struct LatticeConfig {
  std::uint32_t alpha = 3;
  std::uint32_t s = 5;
  std::uint32_t p = 5;
  std::uint32_t n_data = 1;

  void validate() const {
    if (alpha != 3) throw InvalidConfigError("alpha must be 3");
    if (s < 1) throw InvalidConfigError("s must be >= 1");
    if (p != s) throw InvalidConfigError("p must equal s");
    if (n_data < 1) throw InvalidConfigError("n_data must be >= 1");
  }
};

// Identity of a block in the lattice. Parities are named by their origin node
// and strand class; the destination node is derivable. node is 1-based.
struct BlockId {
  BlockClass cls = BlockClass::data;
  std::uint32_t node = 0;
  StrandClass strand = StrandClass::H;  // meaningful for parities only

  static BlockId data_block(std::uint32_t i) { return {BlockClass::data, i, StrandClass::H}; }
  static BlockId parity_block(std::uint32_t i, StrandClass x) {
    return {BlockClass::parity, i, x};
  }

  bool is_data() const { return cls == BlockClass::data; }
  bool is_parity() const { return cls == BlockClass::parity; }

  std::uint64_t packed() const {
    std::uint64_t key = node;
    key |= static_cast<std::uint64_t>(cls) << 32;
    if (is_parity()) key |= static_cast<std::uint64_t>(strand) << 33;
    return key;
  }

  friend bool operator==(const BlockId& a, const BlockId& b) {
    return a.packed() == b.packed();
  }
  friend bool operator!=(const BlockId& a, const BlockId& b) { return !(a == b); }
  friend bool operator<(const BlockId& a, const BlockId& b) { return a.packed() < b.packed(); }

  std::string str() const {
    if (is_data()) return "d_" + std::to_string(node);
    return std::string("p_") + std::to_string(node) + "_" + to_string(strand);
  }
};

struct GridPosition {
  std::uint32_t row = 0;  // in [0, s)
  std::uint32_t col = 0;

  friend bool operator==(const GridPosition& a, const GridPosition& b) {
    return a.row == b.row && a.col == b.col;
  }
};

inline GridPosition grid_position(std::uint32_t node, const LatticeConfig& cfg) {
  if (node == 0) throw InvalidIndexError("node indices are 1-based");
  return {(node - 1) % cfg.s, (node - 1) / cfg.s};
}

inline std::uint32_t node_at(const GridPosition& pos, const LatticeConfig& cfg) {
  return pos.col * cfg.s + pos.row + 1;
}

// Next node along a strand. Successors past n_data are valid identifiers for
// parity naming; no data block is ever stored for them.
inline std::uint32_t strand_successor(std::uint32_t node, StrandClass x,
                                      const LatticeConfig& cfg) {
  GridPosition pos = grid_position(node, cfg);
  std::uint32_t row = pos.row;
  switch (x) {
    case StrandClass::H: break;
    case StrandClass::RH: row = (pos.row + 1) % cfg.s; break;
    case StrandClass::LH: row = (pos.row + cfg.s - 1) % cfg.s; break;
  }
  return node_at({row, pos.col + 1}, cfg);
}

// Inverse of strand_successor; nullopt at column 0 (open lattice head).
inline std::optional<std::uint32_t> strand_predecessor(std::uint32_t node, StrandClass x,
                                                       const LatticeConfig& cfg) {
  GridPosition pos = grid_position(node, cfg);
  if (pos.col == 0) return std::nullopt;
  std::uint32_t row = pos.row;
  switch (x) {
    case StrandClass::H: break;
    case StrandClass::RH: row = (pos.row + cfg.s - 1) % cfg.s; break;
    case StrandClass::LH: row = (pos.row + 1) % cfg.s; break;
  }
  return node_at({row, pos.col - 1}, cfg);
}

// Parity into node i on strand x, i.e. P(pred_x(i) -> i, x). nullopt at the
// lattice head, where the incoming parity is the virtual all-zero block.
inline std::optional<BlockId> parity_in(std::uint32_t node, StrandClass x,
                                        const LatticeConfig& cfg) {
  auto pred = strand_predecessor(node, x, cfg);
  if (!pred) return std::nullopt;
  return BlockId::parity_block(*pred, x);
}

// Parity out of node i on strand x, i.e. P(i -> succ_x(i), x).
inline BlockId parity_out(std::uint32_t node, StrandClass x) {
  return BlockId::parity_block(node, x);
}

// True when the id names a block the codec actually emits: data blocks with
// node <= n_data, parities with origin <= n_data.
inline bool block_exists(const BlockId& b, const LatticeConfig& cfg) {
  return b.node >= 1 && b.node <= cfg.n_data;
}

// One xor operand of a repair identity. A disengaged id stands for the virtual
// zero parity at the lattice head; it is never stored or fetched.
struct RepairOperand {
  std::optional<BlockId> id;

  bool is_virtual_zero() const { return !id.has_value(); }
};

// Two operands whose xor reconstructs the target block, listed in the order a
// repair should acquire them.
struct RepairPair {
  StrandClass strand = StrandClass::H;
  std::array<RepairOperand, 2> ops;
};

inline RepairPair data_repair_pair(std::uint32_t node, StrandClass x,
                                   const LatticeConfig& cfg) {
  RepairPair pair;
  pair.strand = x;
  auto in = parity_in(node, x, cfg);
  pair.ops[0].id = in;  // nullopt at the head: d == P_out xor 0
  pair.ops[1].id = parity_out(node, x);
  return pair;
}

// Repair identities for one block.
//   data node i:      alpha pairs, one per strand: (P_in(i,x), P_out(i,x))
//   parity P(i->j,x): backward (d_i, P_in(i,x)) then forward (d_j, P_out(j,x))
// The forward pair of a tail parity references blocks past n_data; fetches of
// those fail at store level.
inline std::vector<RepairPair> repair_pairs(const BlockId& b, const LatticeConfig& cfg) {
  cfg.validate();
  if (b.node == 0) throw InvalidIndexError("node indices are 1-based");
  std::vector<RepairPair> pairs;
  if (b.is_data()) {
    pairs.reserve(kAllStrands.size());
    for (StrandClass x : kAllStrands) pairs.push_back(data_repair_pair(b.node, x, cfg));
    return pairs;
  }
  pairs.reserve(2);
  StrandClass x = b.strand;
  std::uint32_t i = b.node;
  std::uint32_t j = strand_successor(i, x, cfg);
  RepairPair backward;
  backward.strand = x;
  backward.ops[0].id = BlockId::data_block(i);
  backward.ops[1].id = parity_in(i, x, cfg);  // virtual zero when i is a head node
  pairs.push_back(backward);
  RepairPair forward;
  forward.strand = x;
  forward.ops[0].id = BlockId::data_block(j);
  forward.ops[1].id = parity_out(j, x);
  pairs.push_back(forward);
  return pairs;
}

}  // namespace aestore

template <>
struct std::hash<aestore::BlockId> {
  std::size_t operator()(const aestore::BlockId& b) const noexcept {
    // splitmix64 finalizer
    std::uint64_t z = b.packed() + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};
