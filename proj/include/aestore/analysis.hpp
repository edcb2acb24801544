#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "aestore/lattice.hpp"

namespace aestore {

// A redundancy scheme for the comparative table: plain replication,
// an MDS m-of-(m+k) code, or an alpha entanglement.
struct Scheme {
  enum class Kind : std::uint8_t { replication, mds, alpha_entanglement };

  Kind kind = Kind::replication;
  std::uint32_t r = 1;         // replication factor
  std::uint32_t m = 1;         // MDS data fragments
  std::uint32_t k = 0;         // MDS redundant fragments
  LatticeConfig ae;            // entanglement parameters
  std::uint32_t shards = 1;    // AE sharding factor (block split into shards sub-blocks)

  static Scheme replication(std::uint32_t r) {
    if (r < 1) throw InvalidConfigError("replication factor must be >= 1");
    Scheme s;
    s.kind = Kind::replication;
    s.r = r;
    return s;
  }

  static Scheme mds(std::uint32_t m, std::uint32_t k) {
    if (m < 1) throw InvalidConfigError("MDS m must be >= 1");
    Scheme s;
    s.kind = Kind::mds;
    s.m = m;
    s.k = k;
    return s;
  }

  static Scheme alpha_entanglement(const LatticeConfig& cfg, std::uint32_t shards = 1) {
    cfg.validate();
    if (shards < 1) throw InvalidConfigError("shard factor must be >= 1");
    Scheme s;
    s.kind = Kind::alpha_entanglement;
    s.ae = cfg;
    s.shards = shards;
    return s;
  }

  std::string name() const {
    switch (kind) {
      case Kind::replication: return "R=" + std::to_string(r);
      case Kind::mds: return std::to_string(m) + "-of-" + std::to_string(m + k);
      case Kind::alpha_entanglement:
        return "AE(" + std::to_string(ae.alpha) + "," + std::to_string(ae.s) + "," +
               std::to_string(ae.p) + ")" + (shards > 1 ? "/" + std::to_string(shards) : "");
    }
    return "?";
  }

  // shard size as a fraction of the block size B
  std::string shard_size_label() const {
    std::uint32_t div = 1;
    switch (kind) {
      case Kind::replication: div = 1; break;
      case Kind::mds: div = m; break;
      case Kind::alpha_entanglement: div = shards; break;
    }
    return div == 1 ? "B" : "B/" + std::to_string(div);
  }
};

// Stored bytes per source byte.
inline double storage_overhead(const Scheme& s) {
  switch (s.kind) {
    case Scheme::Kind::replication: return static_cast<double>(s.r);
    case Scheme::Kind::mds: return static_cast<double>(s.m + s.k) / static_cast<double>(s.m);
    case Scheme::Kind::alpha_entanglement: return 1.0 + static_cast<double>(s.ae.alpha);
  }
  return 0.0;
}

// Guaranteed failure tolerance. Entanglements have no single number: the
// tolerated count depends on the failure pattern, so the result carries the
// guaranteed floor and a pattern-dependence flag (exact per-pattern answers
// come from the recoverability oracle over the lattice).
struct FaultTolerance {
  std::uint32_t guaranteed = 0;
  bool pattern_dependent = false;

  std::string str() const {
    if (!pattern_dependent) return std::to_string(guaranteed);
    return ">=" + std::to_string(guaranteed) + " (pattern-dependent)";
  }
};

inline FaultTolerance fault_tolerance(const Scheme& s) {
  switch (s.kind) {
    case Scheme::Kind::replication: return {s.r - 1, false};
    case Scheme::Kind::mds: return {s.k, false};
    case Scheme::Kind::alpha_entanglement: return {1, true};
  }
  return {};
}

// Peers that must answer to repair one lost block.
inline std::uint32_t repair_peers(const Scheme& s) {
  switch (s.kind) {
    case Scheme::Kind::replication: return 1;
    case Scheme::Kind::mds: return s.m;
    case Scheme::Kind::alpha_entanglement: return 2;  // one xor pair, any alpha
  }
  return 0;
}

// Bytes read from other peers to rebuild a failed peer of capacity c_bytes.
inline std::uint64_t repair_read_cost(const Scheme& s, std::uint64_t c_bytes) {
  if (c_bytes == 0) throw InvalidConfigError("peer capacity must be positive");
  switch (s.kind) {
    case Scheme::Kind::replication: return c_bytes;
    case Scheme::Kind::mds: return static_cast<std::uint64_t>(s.m) * c_bytes;
    case Scheme::Kind::alpha_entanglement: return 2 * c_bytes;
  }
  return 0;
}

inline std::uint64_t byzantine_tolerance(std::uint64_t n) {
  if (n < 1) throw InvalidConfigError("peer count must be >= 1");
  return (n - 1) / 3;
}

// Loose-quorum check n >> 3f+1, reported as the plain predicate with margin.
struct LockssRegime {
  bool holds = false;
  std::int64_t margin = 0;  // n - (3f + 1)
};

inline LockssRegime lockss_regime(std::uint64_t n, std::uint64_t f) {
  LockssRegime r;
  r.margin = static_cast<std::int64_t>(n) - static_cast<std::int64_t>(3 * f + 1);
  r.holds = r.margin > 0;
  return r;
}

// Blocks outside {b} + its adjacent parities that become reachable by
// expanding repair pairs for `depth` BFS rounds. For a data block the start
// set is the block plus all six adjacent parities (three in, three out); the
// paper-style peer count of the whole neighborhood is |start| + result.
inline std::unordered_set<BlockId> repair_neighborhood(const LatticeConfig& cfg,
                                                       const BlockId& b, std::uint32_t depth) {
  cfg.validate();
  std::unordered_set<BlockId> start;
  start.insert(b);
  if (b.is_data()) {
    for (StrandClass x : kAllStrands) {
      if (auto in = parity_in(b.node, x, cfg)) start.insert(*in);
      start.insert(parity_out(b.node, x));
    }
  }
  std::unordered_set<BlockId> seen = start;
  std::vector<BlockId> frontier(start.begin(), start.end());
  std::unordered_set<BlockId> outside;
  for (std::uint32_t round = 0; round < depth; ++round) {
    std::vector<BlockId> next;
    for (const BlockId& cur : frontier) {
      for (const RepairPair& pair : repair_pairs(cur, cfg)) {
        for (const RepairOperand& op : pair.ops) {
          if (!op.id) continue;
          if (!block_exists(*op.id, cfg)) continue;
          if (seen.insert(*op.id).second) {
            outside.insert(*op.id);
            next.push_back(*op.id);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return outside;
}

// Peers holding fragments relevant to one block's repair. For entanglements
// this is the one-round repair neighborhood of an interior node, evaluated on
// a reference lattice deep enough to have one, times the sharding factor.
inline std::uint32_t dissemination_width(const Scheme& s) {
  switch (s.kind) {
    case Scheme::Kind::replication: return s.r;
    case Scheme::Kind::mds: return s.m + s.k;
    case Scheme::Kind::alpha_entanglement: {
      LatticeConfig ref = s.ae;
      ref.n_data = std::max(ref.n_data, 5 * ref.s);  // ensure an interior column exists
      std::uint32_t interior = 2 * ref.s + ref.s / 2 + 1;  // middle row, column 2
      BlockId b = BlockId::data_block(interior);
      std::uint32_t start = 1 + 2 * ref.alpha;  // block + in/out parities
      auto outside = repair_neighborhood(ref, b, 1);
      return s.shards * (start + static_cast<std::uint32_t>(outside.size()));
    }
  }
  return 0;
}

struct ComparisonRow {
  std::string scheme;
  std::string shard_size;
  double overhead = 0;
  std::string tolerated_failures;
  std::uint32_t repair_peers = 0;
  std::uint32_t dissemination_width = 0;
};

inline ComparisonRow comparison_row(const Scheme& s) {
  ComparisonRow row;
  row.scheme = s.name();
  row.shard_size = s.shard_size_label();
  row.overhead = storage_overhead(s);
  row.tolerated_failures = fault_tolerance(s).str();
  row.repair_peers = repair_peers(s);
  row.dissemination_width = dissemination_width(s);
  return row;
}

// The five schemes of the comparison chart.
inline std::vector<Scheme> comparison_schemes() {
  LatticeConfig ae;
  ae.alpha = 3;
  ae.s = 5;
  ae.p = 5;
  ae.n_data = 25;
  return {
      Scheme::replication(4), Scheme::mds(4, 3),   Scheme::mds(8, 6),
      Scheme::mds(4, 12),     Scheme::alpha_entanglement(ae),
  };
}

inline std::vector<ComparisonRow> comparison_table() {
  std::vector<ComparisonRow> rows;
  for (const Scheme& s : comparison_schemes()) rows.push_back(comparison_row(s));
  return rows;
}

inline void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "scheme,shard_size,overhead,tolerated_failures,repair_peers,dissemination_width\n";
  for (const ComparisonRow& r : rows) {
    out << r.scheme << ',' << r.shard_size << ',' << r.overhead << ',' << '"'
        << r.tolerated_failures << '"' << ',' << r.repair_peers << ','
        << r.dissemination_width << "\n";
  }
}

inline void write_comparison_text(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << std::left << std::setw(12) << "scheme" << std::setw(12) << "shard_size"
      << std::setw(10) << "overhead" << std::setw(28) << "tolerated_failures" << std::setw(14)
      << "repair_peers" << "dissemination_width\n";
  for (const ComparisonRow& r : rows) {
    std::ostringstream overhead;
    overhead << r.overhead;
    out << std::left << std::setw(12) << r.scheme << std::setw(12) << r.shard_size
        << std::setw(10) << overhead.str() << std::setw(28) << r.tolerated_failures
        << std::setw(14) << r.repair_peers << r.dissemination_width << "\n";
  }
}

}  // namespace aestore
