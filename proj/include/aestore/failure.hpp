#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <random>
#include <thread>
#include <unordered_set>

#include "aestore/chunk_store.hpp"

namespace aestore {

// Deterministic, seeded availability policy. A chunk's fate is a pure function
// of (mode, seed, address), independent of access order: the verdict hashes the
// seed with the address prefix and compares a derived uniform against the rate.
// The same draw compared against growing rates yields nested failure sets.
struct FailurePolicy {
  enum class Mode : std::uint8_t { none, bernoulli, blocklist };

  Mode mode = Mode::none;
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::unordered_set<ChunkAddress> blocked;

  static FailurePolicy none() { return {}; }

  static FailurePolicy bernoulli(double rate, std::uint64_t seed) {
    if (rate < 0.0 || rate > 1.0) throw InvalidConfigError("failure rate must be in [0, 1]");
    FailurePolicy p;
    p.mode = Mode::bernoulli;
    p.rate = rate;
    p.seed = seed;
    return p;
  }

  static FailurePolicy blocklist(std::unordered_set<ChunkAddress> blocked) {
    FailurePolicy p;
    p.mode = Mode::blocklist;
    p.blocked = std::move(blocked);
    return p;
  }

  bool unavailable(const ChunkAddress& addr) const {
    switch (mode) {
      case Mode::none: return false;
      case Mode::blocklist: return blocked.count(addr) > 0;
      case Mode::bernoulli: return seeded_unit_uniform(seed ^ addr.prefix64()) < rate;
    }
    return false;
  }
};

// Withholds chunks per policy; never alters payloads. Puts pass through.
class FailureInjectionStore : public ChunkStore {
 public:
  FailureInjectionStore(ChunkStore& inner, FailurePolicy policy)
      : inner_(inner), policy_(std::move(policy)) {}

  ChunkAddress put(std::span<const std::uint8_t> payload) override { return inner_.put(payload); }

  GetResult get(const ChunkAddress& addr) override {
    if (policy_.unavailable(addr)) return GetResult::unavailable();
    return inner_.get(addr);
  }

  const FailurePolicy& policy() const { return policy_; }

 private:
  ChunkStore& inner_;
  FailurePolicy policy_;
};

// Per-request latency model for bench runs on local backends: a uniform
// base+jitter delay with an occasional straggler, deterministic per
// (seed, address).
struct LatencyModel {
  std::chrono::microseconds base{150};
  std::chrono::microseconds jitter{150};
  double straggler_prob = 0.02;
  std::chrono::microseconds straggler{4000};
  std::uint64_t seed = 1;

  std::chrono::microseconds sample(const ChunkAddress& addr) const {
    std::mt19937_64 gen(seed ^ addr.prefix64() ^ 0x9e3779b97f4a7c15ULL);
    double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    if (u < straggler_prob) return straggler;
    double v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return base + std::chrono::microseconds(
                      static_cast<std::int64_t>(v * static_cast<double>(jitter.count())));
  }
};

class LatencySimStore : public ChunkStore {
 public:
  LatencySimStore(ChunkStore& inner, LatencyModel model) : inner_(inner), model_(model) {}

  ChunkAddress put(std::span<const std::uint8_t> payload) override { return inner_.put(payload); }

  GetResult get(const ChunkAddress& addr) override {
    std::this_thread::sleep_for(model_.sample(addr));
    return inner_.get(addr);
  }

 private:
  ChunkStore& inner_;
  LatencyModel model_;
};

// Counts traffic that reaches the wrapped store. Test instrumentation.
class CountingStore : public ChunkStore {
 public:
  explicit CountingStore(ChunkStore& inner) : inner_(inner) {}

  ChunkAddress put(std::span<const std::uint8_t> payload) override {
    puts_.fetch_add(1, std::memory_order_relaxed);
    return inner_.put(payload);
  }

  GetResult get(const ChunkAddress& addr) override {
    gets_.fetch_add(1, std::memory_order_relaxed);
    return inner_.get(addr);
  }

  std::uint64_t gets() const { return gets_.load(std::memory_order_relaxed); }
  std::uint64_t puts() const { return puts_.load(std::memory_order_relaxed); }

 private:
  ChunkStore& inner_;
  std::atomic<std::uint64_t> gets_{0};
  std::atomic<std::uint64_t> puts_{0};
};

}  // namespace aestore
