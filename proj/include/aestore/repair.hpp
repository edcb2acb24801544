#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "aestore/chunk_store.hpp"
#include "aestore/codec.hpp"
#include "aestore/manifest.hpp"

namespace aestore {

enum class RepairStrategy : std::uint8_t { hierarchical, round_robin };

inline const char* to_string(RepairStrategy s) {
  return s == RepairStrategy::hierarchical ? "hierarchical" : "round_robin";
}

inline std::optional<RepairStrategy> strategy_from_string(const std::string& s) {
  if (s == "hierarchical") return RepairStrategy::hierarchical;
  if (s == "round_robin" || s == "round-robin") return RepairStrategy::round_robin;
  return std::nullopt;
}

struct RepairConfig {
  static constexpr int kUnboundedDepth = std::numeric_limits<int>::max();

  RepairStrategy strategy = RepairStrategy::hierarchical;
  std::array<StrandClass, 3> tuple_order = {StrandClass::H, StrandClass::RH, StrandClass::LH};
  int max_depth = 8;

  // Deterministic mode: single-threaded, hedging off; request counts are a
  // pure function of the failure set.
  bool deterministic = true;

  // Delay before speculatively launching the alternate repair route for the
  // same goal. Ignored in deterministic mode.
  std::optional<std::chrono::milliseconds> hedge_delay;

  // Bound on how long a hedged route waits for an in-flight fetch.
  std::chrono::milliseconds fetch_timeout{5000};

  unsigned max_in_flight = 32;

  bool hedging_enabled() const { return hedge_delay.has_value() && !deterministic; }

  void validate() const {
    if (max_depth < 1) throw InvalidConfigError("max_depth must be >= 1");
    bool seen[3] = {false, false, false};
    for (StrandClass x : tuple_order) seen[static_cast<int>(x)] = true;
    if (!(seen[0] && seen[1] && seen[2]))
      throw InvalidConfigError("tuple_order must be a permutation of (H, RH, LH)");
  }
};

// Per-download metrics.
//
// total_blocks_requested counts every request issued to the store, including
// probes of incomplete pairs and hedged duplicates. parity_requests_per_failure
// counts, per failed data block, every parity acquisition consumed or probed
// while repairing it: store requests (hit or miss), repaired-block cache hits,
// and the virtual zero head parity. A lone failure therefore always costs
// exactly two parities, which is the fixed two-peer repair bound of the code.
struct FetchReport {
  std::uint64_t total_blocks_requested = 0;
  std::uint32_t failed_data_blocks = 0;
  std::vector<std::uint32_t> parity_requests_per_failure;
  double wall_time_ms = 0.0;
  std::uint32_t corruption_errors = 0;
  std::vector<BlockId> irrecoverable;

  bool success() const { return irrecoverable.empty(); }

  double parity_requests_mean() const {
    if (parity_requests_per_failure.empty()) return 0.0;
    double sum = 0;
    for (auto v : parity_requests_per_failure) sum += v;
    return sum / static_cast<double>(parity_requests_per_failure.size());
  }
  std::uint32_t parity_requests_min() const {
    if (parity_requests_per_failure.empty()) return 0;
    return *std::min_element(parity_requests_per_failure.begin(),
                             parity_requests_per_failure.end());
  }
  std::uint32_t parity_requests_max() const {
    if (parity_requests_per_failure.empty()) return 0;
    return *std::max_element(parity_requests_per_failure.begin(),
                             parity_requests_per_failure.end());
  }
};

struct DownloadResult {
  Bytes bytes;  // empty when irrecoverable
  FetchReport report;
};

// Retrieves a file's data blocks and repairs missing ones over the
// entanglement lattice. One instance per download.
class Downloader {
 public:
  Downloader(const ManifestIndex& manifest, ChunkStore& store, RepairConfig cfg)
      : manifest_(manifest), store_(store), cfg_(cfg), zero_(manifest.codec.block_size, 0) {
    manifest_.validate();
    cfg_.validate();
  }

  DownloadResult download() {
    auto t0 = std::chrono::steady_clock::now();
    const std::uint32_t n = manifest_.codec.lattice.n_data;

    race_parity_events_.assign(n + 1, 0);
    fetch_data_blocks();

    // Candidates: blocks with no payload yet. With hedging this can overstate
    // the final failure set (a slow direct fetch may still land a hit), so the
    // authoritative per-block verdict is taken after the stragglers drain.
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t i = 1; i <= n; ++i) {
      if (!peek_hit(data_address(i))) candidates.push_back(i);
    }

    buckets_ = std::make_unique<std::atomic<std::uint32_t>[]>(candidates.size());
    bucket_of_.clear();
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      buckets_[k].store(race_parity_events_[candidates[k]], std::memory_order_relaxed);
      bucket_of_[candidates[k]] = &buckets_[k];
    }

    repair_failed_blocks(candidates);

    // Repairs are done; leftover hedge duplicates finish in the background
    // and are excluded from the wall clock.
    report_.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    drain_pending();

    std::vector<std::uint32_t> failed;
    for (std::uint32_t i = 1; i <= n; ++i) {
      std::unique_lock lock(mu_);
      if (missing_.count(data_address(i))) failed.push_back(i);
    }
    report_.failed_data_blocks = static_cast<std::uint32_t>(failed.size());
    for (std::uint32_t node : failed) {
      auto it = bucket_of_.find(node);
      report_.parity_requests_per_failure.push_back(
          it != bucket_of_.end() ? it->second->load(std::memory_order_relaxed)
                                 : race_parity_events_[node]);
    }
    for (std::uint32_t node : failed) {
      if (!peek_hit(data_address(node)))
        report_.irrecoverable.push_back(BlockId::data_block(node));
    }

    DownloadResult result;
    if (report_.irrecoverable.empty()) {
      std::vector<Block> blocks;
      blocks.reserve(n);
      for (std::uint32_t i = 1; i <= n; ++i)
        blocks.push_back({BlockId::data_block(i), *peek_payload(data_address(i))});
      result.bytes = reassemble(blocks, manifest_.codec);
    }

    report_.total_blocks_requested = total_requests_.load(std::memory_order_relaxed);
    report_.corruption_errors = corruption_errors_.load(std::memory_order_relaxed);
    result.report = std::move(report_);
    return result;
  }

 private:
  // ---- shared fetch state -------------------------------------------------

  struct Waiter {
    std::mutex m;
    std::condition_variable cv;
    bool done = false;
  };

  struct ProbeResult {
    std::optional<Bytes> payload;
    bool issued = false;  // a store request went out for this probe
  };

  ChunkAddress data_address(std::uint32_t node) const {
    auto addr = manifest_.find(BlockId::data_block(node));
    if (!addr) throw IncompleteInputError("manifest lacks data block " + std::to_string(node));
    return *addr;
  }

  // Single retrieval funnel: consults the repaired/fetched cache, suppresses
  // re-requests of addresses the store already reported missing, and
  // deduplicates concurrent in-flight requests for one address.
  ProbeResult probe_addr(const ChunkAddress& addr) {
    std::shared_ptr<Waiter> waiter;
    {
      std::unique_lock lock(mu_);
      for (;;) {
        if (auto it = cache_.find(addr); it != cache_.end()) return {it->second, false};
        if (missing_.count(addr)) return {std::nullopt, false};
        auto in = inflight_.find(addr);
        if (in == inflight_.end()) break;
        auto w = in->second;
        lock.unlock();
        {
          std::unique_lock wl(w->m);
          w->cv.wait(wl, [&] { return w->done; });
        }
        lock.lock();
      }
      waiter = std::make_shared<Waiter>();
      inflight_.emplace(addr, waiter);
    }

    total_requests_.fetch_add(1, std::memory_order_relaxed);
    GetResult r = store_.get(addr);

    ProbeResult out;
    {
      std::unique_lock lock(mu_);
      if (r.status == GetStatus::hit) {
        out.payload = r.payload;
        cache_.emplace(addr, std::move(r.payload));
      } else {
        if (r.status == GetStatus::corrupt)
          corruption_errors_.fetch_add(1, std::memory_order_relaxed);
        missing_.insert(addr);
      }
      inflight_.erase(addr);
    }
    {
      std::unique_lock wl(waiter->m);
      waiter->done = true;
    }
    waiter->cv.notify_all();
    out.issued = true;
    return out;
  }

  bool peek_hit(const ChunkAddress& addr) {
    std::unique_lock lock(mu_);
    return cache_.count(addr) > 0;
  }

  std::optional<Bytes> peek_payload(const ChunkAddress& addr) {
    std::unique_lock lock(mu_);
    auto it = cache_.find(addr);
    if (it == cache_.end()) return std::nullopt;
    return it->second;
  }

  enum class PeekState { unknown, hit, miss };
  PeekState peek_state(const ChunkAddress& addr) {
    std::unique_lock lock(mu_);
    if (cache_.count(addr)) return PeekState::hit;
    if (missing_.count(addr)) return PeekState::miss;
    return PeekState::unknown;
  }

  void cache_repaired(const ChunkAddress& addr, Bytes payload) {
    std::unique_lock lock(mu_);
    cache_.emplace(addr, std::move(payload));
  }

  // ---- repair episodes ----------------------------------------------------

  // One episode per top-level failed data block. path is the stack of blocks
  // currently being repaired; a block is never re-entered while on it, which
  // cuts cycles without forbidding its use on sibling branches.
  struct Episode {
    std::vector<BlockId> path;
    std::vector<std::atomic<std::uint32_t>*> attribution;

    bool on_path(const BlockId& b) const {
      return std::find(path.begin(), path.end(), b) != path.end();
    }
    void parity_event() {
      if (!attribution.empty())
        attribution.back()->fetch_add(1, std::memory_order_relaxed);
    }
  };

  struct PathGuard {
    Episode& ep;
    PathGuard(Episode& e, const BlockId& b) : ep(e) { ep.path.push_back(b); }
    ~PathGuard() { ep.path.pop_back(); }
  };

  struct AttributionGuard {
    Episode& ep;
    bool pushed = false;
    AttributionGuard(Episode& e, std::atomic<std::uint32_t>* bucket) : ep(e) {
      if (bucket) {
        ep.attribution.push_back(bucket);
        pushed = true;
      }
    }
    ~AttributionGuard() {
      if (pushed) ep.attribution.pop_back();
    }
  };

  // Direct fetch of one xor operand; counts a parity acquisition when the
  // operand resolves from any source (virtual zero, cache, issued request).
  // Suppressed re-probes of known-missing addresses count nothing.
  std::optional<Bytes> probe_operand(const RepairOperand& op, Episode& ep) {
    if (op.is_virtual_zero()) {
      ep.parity_event();
      return zero_;
    }
    auto addr = manifest_.find(*op.id);
    if (!addr) return std::nullopt;  // block past the lattice tail, never stored
    ProbeResult pr = probe_addr(*addr);
    if (op.id->is_parity() && (pr.issued || pr.payload)) ep.parity_event();
    return pr.payload;
  }

  std::optional<Bytes> acquire_operand(const RepairOperand& op, Episode& ep, int depth) {
    if (auto p = probe_operand(op, ep)) return p;
    if (op.is_virtual_zero()) return std::nullopt;
    return attempt_repair(*op.id, ep, depth + 1);
  }

  std::optional<Bytes> attempt_repair(const BlockId& b, Episode& ep, int depth) {
    auto addr = manifest_.find(b);
    if (!addr) return std::nullopt;
    if (ep.on_path(b)) return std::nullopt;   // cycle guard
    if (depth >= cfg_.max_depth) return std::nullopt;
    PathGuard path_guard(ep, b);

    if (b.is_data()) {
      std::atomic<std::uint32_t>* bucket = nullptr;
      if (auto it = bucket_of_.find(b.node); it != bucket_of_.end()) bucket = it->second;
      AttributionGuard attr_guard(ep, bucket);
      return cfg_.strategy == RepairStrategy::hierarchical
                 ? repair_data_hierarchical(b, ep, depth)
                 : repair_data_round_robin(b, ep, depth);
    }
    return repair_parity(b, ep, depth);
  }

  std::optional<Bytes> finish_repair(const BlockId& target, Bytes payload) {
    ChunkAddress expected = *manifest_.find(target);
    if (address_of(payload) != expected) {
      corruption_errors_.fetch_add(1, std::memory_order_relaxed);
      return std::nullopt;
    }
    cache_repaired(expected, payload);
    return payload;
  }

  std::optional<Bytes> try_pair(const BlockId& target, const RepairPair& pair, Episode& ep,
                                int depth) {
    auto a = acquire_operand(pair.ops[0], ep, depth);
    if (!a) return std::nullopt;
    auto c = acquire_operand(pair.ops[1], ep, depth);
    if (!c) return std::nullopt;
    return finish_repair(target, xor_bytes(*a, *c));
  }

  // Walks the strand tuples in order; a missing parity is itself repaired
  // recursively before the pair is given up on.
  std::optional<Bytes> repair_data_hierarchical(const BlockId& b, Episode& ep, int depth) {
    for (StrandClass x : cfg_.tuple_order) {
      RepairPair pair = data_repair_pair(b.node, x, manifest_.codec.lattice);
      if (auto payload = try_pair(b, pair, ep, depth)) return payload;
    }
    return std::nullopt;
  }

  // Probes all tuples with direct fetches only, then falls back to repairing
  // the missing parities of the first tuple (incoming before outgoing).
  std::optional<Bytes> repair_data_round_robin(const BlockId& b, Episode& ep, int depth) {
    for (StrandClass x : cfg_.tuple_order) {
      RepairPair pair = data_repair_pair(b.node, x, manifest_.codec.lattice);
      auto a = probe_operand(pair.ops[0], ep);
      if (!a) continue;
      auto c = probe_operand(pair.ops[1], ep);
      if (!c) continue;
      if (auto payload = finish_repair(b, xor_bytes(*a, *c))) return payload;
    }
    RepairPair pair = data_repair_pair(b.node, cfg_.tuple_order[0], manifest_.codec.lattice);
    auto a = acquire_operand(pair.ops[0], ep, depth);
    if (!a) return std::nullopt;
    auto c = acquire_operand(pair.ops[1], ep, depth);
    if (!c) return std::nullopt;
    return finish_repair(b, xor_bytes(*a, *c));
  }

  // Backward identity (d_i xor P_in(i)) first, then forward (d_j xor P_out(j)).
  // Missing data operands recurse via the active strategy.
  std::optional<Bytes> repair_parity(const BlockId& p, Episode& ep, int depth) {
    for (const RepairPair& pair : repair_pairs(p, manifest_.codec.lattice)) {
      if (auto payload = try_pair(p, pair, ep, depth)) return payload;
    }
    return std::nullopt;
  }

  // ---- phase 1: bulk data fetch -------------------------------------------

  void fetch_data_blocks() {
    const std::uint32_t n = manifest_.codec.lattice.n_data;
    if (cfg_.hedging_enabled()) {
      for (std::uint32_t i = 1; i <= n; ++i) hedged_fetch_data(i);
      return;
    }
    if (cfg_.deterministic) {
      for (std::uint32_t i = 1; i <= n; ++i) probe_addr(data_address(i));
      return;
    }
    unsigned workers = std::min<unsigned>(
        {cfg_.max_in_flight, n, std::max(1u, std::thread::hardware_concurrency())});
    std::atomic<std::uint32_t> next{1};
    run_workers(workers, [&] {
      for (;;) {
        std::uint32_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i > n) return;
        probe_addr(data_address(i));
      }
    });
  }

  void repair_failed_blocks(const std::vector<std::uint32_t>& failed) {
    auto repair_one = [&](std::uint32_t node) {
      // settles the direct verdict first: waits out an in-flight fetch, is a
      // cache hit when an earlier episode already repaired this block, and
      // costs nothing when the store already said missing
      if (probe_addr(data_address(node)).payload) return;
      if (cfg_.hedging_enabled() && hedged_repair_data(node)) return;
      Episode ep;
      attempt_repair(BlockId::data_block(node), ep, 0);
    };

    if (cfg_.deterministic || cfg_.hedging_enabled()) {
      for (std::uint32_t node : failed) repair_one(node);
      return;
    }
    unsigned workers = std::min<unsigned>(
        {static_cast<unsigned>(failed.size()), std::max(1u, std::thread::hardware_concurrency()), 8u});
    if (workers <= 1) {
      for (std::uint32_t node : failed) repair_one(node);
      return;
    }
    std::atomic<std::size_t> next{0};
    run_workers(workers, [&] {
      for (;;) {
        std::size_t k = next.fetch_add(1, std::memory_order_relaxed);
        if (k >= failed.size()) return;
        repair_one(failed[k]);
      }
    });
  }

  static void run_workers(unsigned count, const std::function<void()>& body) {
    std::vector<std::thread> threads;
    threads.reserve(count);
    for (unsigned t = 0; t < count; ++t) threads.emplace_back(body);
    for (auto& t : threads) t.join();
  }

  // ---- hedged routes ------------------------------------------------------

  struct RaceState {
    std::mutex m;
    std::condition_variable cv;
  };

  struct Slot {
    RepairOperand op;
    std::optional<ChunkAddress> addr;  // nullopt: virtual zero or nonexistent block
    enum class St { pending, resolved, dead } st = St::pending;
    Bytes payload;
  };

  struct Route {
    std::vector<Slot> slots;
    bool launched = false;
    bool dead = false;
    std::chrono::steady_clock::time_point launched_at;
  };

  void launch_route(Route& route, const std::shared_ptr<RaceState>& rs,
                    const std::function<void()>& parity_event) {
    route.launched = true;
    route.launched_at = std::chrono::steady_clock::now();
    for (Slot& slot : route.slots) {
      if (slot.op.is_virtual_zero()) {
        slot.st = Slot::St::resolved;
        slot.payload = zero_;
        parity_event();
        continue;
      }
      if (!slot.addr) {
        slot.st = Slot::St::dead;
        route.dead = true;
        continue;
      }
      PeekState ps = peek_state(*slot.addr);
      if (ps == PeekState::hit) {
        slot.st = Slot::St::resolved;
        slot.payload = *peek_payload(*slot.addr);
        if (slot.op.id->is_parity()) parity_event();
        continue;
      }
      if (ps == PeekState::miss) {
        slot.st = Slot::St::dead;
        route.dead = true;
        continue;
      }
      if (slot.op.id->is_parity()) parity_event();
      ChunkAddress addr = *slot.addr;
      pending_.push_back(std::async(std::launch::async, [this, rs, addr] {
        probe_addr(addr);
        { std::lock_guard<std::mutex> lk(rs->m); }
        rs->cv.notify_all();
      }));
    }
  }

  // Races the given routes: the first is launched immediately, each further
  // one after hedge_delay without a winner (or as soon as every launched
  // route is dead). First fully resolved route wins. Requests issued for
  // losing routes stay counted; their results land in the shared cache.
  std::optional<Bytes> run_race(std::vector<std::vector<RepairOperand>> route_ops,
                                const BlockId& target,
                                const std::function<void()>& parity_event) {
    auto rs = std::make_shared<RaceState>();
    std::vector<Route> routes(route_ops.size());
    for (std::size_t r = 0; r < route_ops.size(); ++r) {
      for (const RepairOperand& op : route_ops[r]) {
        Slot slot;
        slot.op = op;
        if (!op.is_virtual_zero()) slot.addr = manifest_.find(*op.id);
        routes[r].slots.push_back(std::move(slot));
      }
    }

    const auto hedge = *cfg_.hedge_delay;
    std::size_t next_route = 0;
    auto next_launch = std::chrono::steady_clock::now();

    std::unique_lock lk(rs->m);
    for (;;) {
      auto now = std::chrono::steady_clock::now();
      bool all_launched_dead = true;
      for (Route& route : routes) {
        if (!route.launched) continue;
        if (route.dead) continue;
        bool complete = true;
        for (Slot& slot : route.slots) {
          if (slot.st != Slot::St::pending) continue;
          PeekState ps = peek_state(*slot.addr);
          if (ps == PeekState::hit) {
            slot.st = Slot::St::resolved;
            slot.payload = *peek_payload(*slot.addr);
          } else if (ps == PeekState::miss) {
            slot.st = Slot::St::dead;
            route.dead = true;
          } else if (now - route.launched_at > cfg_.fetch_timeout) {
            slot.st = Slot::St::dead;
            route.dead = true;
          }
        }
        for (Slot& slot : route.slots)
          if (slot.st != Slot::St::resolved) complete = false;
        if (route.dead) continue;
        all_launched_dead = false;
        if (!complete) continue;
        // assemble: xor of all resolved operands
        Bytes payload = route.slots[0].payload;
        for (std::size_t s = 1; s < route.slots.size(); ++s)
          xor_into(payload, route.slots[s].payload);
        if (route.slots.size() == 1) {
          // direct fetch, already verified against its address by the store
          return payload;
        }
        ChunkAddress expected = *manifest_.find(target);
        if (address_of(payload) != expected) {
          corruption_errors_.fetch_add(1, std::memory_order_relaxed);
          route.dead = true;
          continue;
        }
        cache_repaired(expected, payload);
        return payload;
      }

      bool can_launch = next_route < routes.size();
      if (can_launch && (next_route == 0 || all_launched_dead || now >= next_launch)) {
        launch_route(routes[next_route], rs, parity_event);
        ++next_route;
        next_launch = std::chrono::steady_clock::now() + hedge;
        continue;
      }
      if (!can_launch && all_launched_dead) return std::nullopt;

      auto wake = can_launch ? next_launch : now + cfg_.fetch_timeout;
      rs->cv.wait_until(lk, wake);
    }
  }

  // Phase-1 fetch with hedging: the data chunk itself is the primary route,
  // the repair pairs are the alternates. Does not wait for a straggling
  // direct fetch once an alternate has produced the payload; the verdict for
  // failure accounting settles when the stragglers drain.
  void hedged_fetch_data(std::uint32_t node) {
    std::vector<std::vector<RepairOperand>> routes;
    routes.push_back({RepairOperand{BlockId::data_block(node)}});
    for (StrandClass x : cfg_.tuple_order) {
      RepairPair pair = data_repair_pair(node, x, manifest_.codec.lattice);
      routes.push_back({pair.ops[0], pair.ops[1]});
    }
    std::uint64_t events = 0;
    run_race(std::move(routes), BlockId::data_block(node), [&events] { ++events; });
    race_parity_events_[node] = static_cast<std::uint32_t>(events);
  }

  // Repair-phase race over the three pair routes of a failed block. On a dead
  // heat (every route killed by missing parities) the caller falls back to the
  // recursive strategy, which reuses everything already fetched.
  bool hedged_repair_data(std::uint32_t node) {
    std::vector<std::vector<RepairOperand>> routes;
    for (StrandClass x : cfg_.tuple_order) {
      RepairPair pair = data_repair_pair(node, x, manifest_.codec.lattice);
      routes.push_back({pair.ops[0], pair.ops[1]});
    }
    std::atomic<std::uint32_t>* bucket = bucket_of_.at(node);
    auto payload = run_race(std::move(routes), BlockId::data_block(node),
                            [bucket] { bucket->fetch_add(1, std::memory_order_relaxed); });
    return payload.has_value();
  }

  void drain_pending() {
    for (auto& f : pending_) {
      if (f.valid()) f.wait();
    }
    pending_.clear();
  }

  // ---- members -------------------------------------------------------------

  const ManifestIndex& manifest_;
  ChunkStore& store_;
  RepairConfig cfg_;
  Bytes zero_;

  std::mutex mu_;
  std::unordered_map<ChunkAddress, Bytes> cache_;
  std::unordered_set<ChunkAddress> missing_;
  std::unordered_map<ChunkAddress, std::shared_ptr<Waiter>> inflight_;
  std::atomic<std::uint64_t> total_requests_{0};
  std::atomic<std::uint32_t> corruption_errors_{0};

  std::unique_ptr<std::atomic<std::uint32_t>[]> buckets_;
  std::unordered_map<std::uint32_t, std::atomic<std::uint32_t>*> bucket_of_;
  std::vector<std::uint32_t> race_parity_events_;
  std::vector<std::future<void>> pending_;

  FetchReport report_;
};

inline DownloadResult download(const ManifestIndex& manifest, ChunkStore& store,
                               const RepairConfig& cfg) {
  Downloader d(manifest, store, cfg);
  return d.download();
}

}  // namespace aestore
