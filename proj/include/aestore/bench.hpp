#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "aestore/failure.hpp"
#include "aestore/gateway.hpp"
#include "aestore/manifest.hpp"
#include "aestore/repair.hpp"

namespace aestore {

struct BenchSpec {
  std::uint64_t file_size = 1u << 20;  // 1 MiB
  std::uint32_t s = 5;
  std::uint32_t block_size = kDefaultBlockSize;
  std::vector<double> rates = {0.0, 0.05, 0.10, 0.15};
  std::uint32_t trials = 100;  // desk-scale default; --trials 600 for the full run
  std::vector<RepairStrategy> strategies = {RepairStrategy::hierarchical,
                                            RepairStrategy::round_robin};
  std::uint64_t seed = 42;

  enum class Backend : std::uint8_t { memory, disk, gateway };
  Backend backend = Backend::memory;
  std::string store_dir = "chunks";
  GatewayConfig gateway;

  bool deterministic = true;
  std::optional<std::chrono::milliseconds> hedge_delay;
  bool simulate_latency = false;
  LatencyModel latency;

  std::array<StrandClass, 3> tuple_order = {StrandClass::H, StrandClass::RH, StrandClass::LH};
  int max_depth = 8;

  void validate() const {
    if (trials < 1) throw InvalidConfigError("trials must be >= 1");
    for (double r : rates)
      if (r < 0.0 || r > 1.0) throw InvalidConfigError("failure rates must be in [0, 1]");
  }

  RepairConfig repair_config(RepairStrategy strategy) const {
    RepairConfig cfg;
    cfg.strategy = strategy;
    cfg.tuple_order = tuple_order;
    cfg.max_depth = max_depth;
    cfg.deterministic = deterministic;
    cfg.hedge_delay = hedge_delay;
    return cfg;
  }
};

struct BenchRow {
  RepairStrategy strategy = RepairStrategy::hierarchical;
  double failure_rate = 0.0;
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  FetchReport report;
};

// Statistics over one (strategy, rate) cell. Parity stats pool the
// per-failure counts of every trial in the cell.
struct BenchSummary {
  RepairStrategy strategy = RepairStrategy::hierarchical;
  double failure_rate = 0.0;
  std::uint32_t trials = 0;
  std::uint32_t successes = 0;
  double mean_wall_ms = 0.0;
  double sem_wall_ms = 0.0;
  std::uint64_t failures_observed = 0;
  double parity_requests_mean = 0.0;
  std::uint32_t parity_requests_min = 0;
  std::uint32_t parity_requests_max = 0;
  double mean_total_requests = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchSummary> summaries;
  bool aborted = false;
  std::string abort_reason;
};

namespace bench_detail {

inline BenchSummary summarize_cell(RepairStrategy strategy, double rate,
                                   const std::vector<const BenchRow*>& rows) {
  BenchSummary s;
  s.strategy = strategy;
  s.failure_rate = rate;
  s.trials = static_cast<std::uint32_t>(rows.size());
  double wall_sum = 0, wall_sq = 0, req_sum = 0;
  std::uint64_t parity_sum = 0;
  bool have_parity = false;
  for (const BenchRow* r : rows) {
    if (r->success) s.successes++;
    wall_sum += r->report.wall_time_ms;
    wall_sq += r->report.wall_time_ms * r->report.wall_time_ms;
    req_sum += static_cast<double>(r->report.total_blocks_requested);
    for (std::uint32_t c : r->report.parity_requests_per_failure) {
      parity_sum += c;
      s.failures_observed++;
      if (!have_parity) {
        s.parity_requests_min = s.parity_requests_max = c;
        have_parity = true;
      } else {
        s.parity_requests_min = std::min(s.parity_requests_min, c);
        s.parity_requests_max = std::max(s.parity_requests_max, c);
      }
    }
  }
  if (!rows.empty()) {
    double n = static_cast<double>(rows.size());
    s.mean_wall_ms = wall_sum / n;
    s.mean_total_requests = req_sum / n;
    if (rows.size() > 1) {
      double var = (wall_sq - wall_sum * wall_sum / n) / (n - 1);
      s.sem_wall_ms = std::sqrt(std::max(0.0, var) / n);
    }
  }
  if (s.failures_observed > 0)
    s.parity_requests_mean =
        static_cast<double>(parity_sum) / static_cast<double>(s.failures_observed);
  return s;
}

}  // namespace bench_detail

// Entangles a seeded pseudorandom file once, then runs one download per
// (strategy, rate, trial) against a freshly seeded failure decorator.
// Trial seeds are base seed + trial index, so extending a run never perturbs
// earlier trials. A crashing trial aborts the run; completed rows survive.
inline BenchResult run_bench(const BenchSpec& spec, std::ostream* progress = nullptr) {
  spec.validate();

  std::unique_ptr<MemoryStore> memory;
  std::unique_ptr<DiskStore> disk;
  std::unique_ptr<GatewayStore> gateway;
  ChunkStore* base = nullptr;
  switch (spec.backend) {
    case BenchSpec::Backend::memory:
      memory = std::make_unique<MemoryStore>();
      base = memory.get();
      break;
    case BenchSpec::Backend::disk:
      disk = std::make_unique<DiskStore>(spec.store_dir);
      base = disk.get();
      break;
    case BenchSpec::Backend::gateway:
      gateway = std::make_unique<GatewayStore>(spec.gateway);
      base = gateway.get();
      break;
  }

  Bytes file = random_bytes(spec.file_size, spec.seed);
  CodecConfig codec = CodecConfig::for_file(spec.file_size, spec.s, spec.block_size);
  ManifestIndex manifest = entangle(file, codec, *base);

  BenchResult result;
  for (RepairStrategy strategy : spec.strategies) {
    for (double rate : spec.rates) {
      for (std::uint32_t trial = 0; trial < spec.trials; ++trial) {
        std::uint64_t trial_seed = spec.seed + trial;
        try {
          FailurePolicy policy = rate > 0.0 ? FailurePolicy::bernoulli(rate, trial_seed)
                                            : FailurePolicy::none();
          FailureInjectionStore injected(*base, policy);
          LatencySimStore delayed(injected, spec.latency);
          ChunkStore& store = spec.simulate_latency ? static_cast<ChunkStore&>(delayed)
                                                    : static_cast<ChunkStore&>(injected);

          DownloadResult dl = download(manifest, store, spec.repair_config(strategy));
          bool bytes_match = dl.report.success() && dl.bytes == file;
          if (dl.report.success() && !bytes_match)
            throw CorruptionError("download reported success but bytes differ from source");

          BenchRow row;
          row.strategy = strategy;
          row.failure_rate = rate;
          row.trial = trial;
          row.seed = trial_seed;
          row.success = bytes_match;
          row.report = std::move(dl.report);
          result.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
          result.aborted = true;
          result.abort_reason = std::string(to_string(strategy)) + " rate " +
                                std::to_string(rate) + " trial " + std::to_string(trial) +
                                ": " + e.what();
          return result;
        }
      }
      if (progress) {
        const BenchRow& last = result.rows.back();
        *progress << to_string(strategy) << " rate " << rate << ": " << spec.trials
                  << " trials done (last wall " << std::fixed << std::setprecision(2)
                  << last.report.wall_time_ms << " ms)\n"
                  << std::defaultfloat;
      }
    }
  }

  for (RepairStrategy strategy : spec.strategies) {
    for (double rate : spec.rates) {
      std::vector<const BenchRow*> cell;
      for (const BenchRow& r : result.rows)
        if (r.strategy == strategy && r.failure_rate == rate) cell.push_back(&r);
      result.summaries.push_back(bench_detail::summarize_cell(strategy, rate, cell));
    }
  }
  return result;
}

inline const char* bench_csv_header() {
  return "strategy,failure_rate,trial,seed,success,wall_time_ms,total_requests,"
         "failed_data_blocks,parity_requests_mean,parity_requests_min,parity_requests_max";
}

inline std::string bench_csv_row(const BenchRow& r) {
  std::ostringstream out;
  out << to_string(r.strategy) << ',' << r.failure_rate << ',' << r.trial << ',' << r.seed
      << ',' << (r.success ? 1 : 0) << ',' << std::fixed << std::setprecision(3)
      << r.report.wall_time_ms << std::defaultfloat << ','
      << r.report.total_blocks_requested << ',' << r.report.failed_data_blocks << ','
      << r.report.parity_requests_mean() << ',' << r.report.parity_requests_min() << ','
      << r.report.parity_requests_max();
  return out.str();
}

inline void write_bench_csv(std::ostream& out, const BenchResult& result) {
  out << bench_csv_header() << "\n";
  for (const BenchRow& r : result.rows) out << bench_csv_row(r) << "\n";
  if (result.aborted) out << "# aborted: " << result.abort_reason << "\n";
}

inline void write_bench_summary(std::ostream& out, const BenchResult& result) {
  out << std::left << std::setw(14) << "strategy" << std::setw(7) << "rate" << std::setw(9)
      << "success" << std::setw(14) << "mean_wall_ms" << std::setw(13) << "sem_wall_ms"
      << std::setw(10) << "failures" << std::setw(13) << "parity_mean" << std::setw(12)
      << "parity_min" << "parity_max\n";
  for (const BenchSummary& s : result.summaries) {
    std::ostringstream success;
    success << s.successes << '/' << s.trials;
    out << std::left << std::setw(14) << to_string(s.strategy) << std::setw(7)
        << s.failure_rate << std::setw(9) << success.str() << std::setw(14) << std::fixed
        << std::setprecision(3) << s.mean_wall_ms << std::setw(13) << s.sem_wall_ms
        << std::defaultfloat << std::setw(10) << s.failures_observed << std::setw(13)
        << std::setprecision(4) << s.parity_requests_mean << std::setw(12)
        << s.parity_requests_min << s.parity_requests_max << "\n";
  }
}

}  // namespace aestore
