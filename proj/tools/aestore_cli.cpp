// aestore: entangle files into a content-addressed chunk store, retrieve them
// under injected failures, and run the redundancy-scheme comparison and
// repair benchmarks.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aestore/aestore.hpp"

namespace {

using namespace aestore;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;        // I/O, config, store failures
constexpr int kExitIrrecoverable = 2;

struct GlobalOpts {
  std::uint32_t alpha = 3;
  std::uint32_t s = 5;
  std::uint32_t p = 5;
  std::uint32_t block_size = kDefaultBlockSize;
  std::string backend = "disk";
  std::string store_dir = "chunks";
  std::string gateway_url = "http://127.0.0.1:8500";
  std::uint64_t seed = 42;
  bool deterministic = false;
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path);
}

std::unique_ptr<ChunkStore> make_store(const GlobalOpts& g, bool allow_memory) {
  if (g.backend == "disk") return std::make_unique<DiskStore>(g.store_dir);
  if (g.backend == "gateway") {
    GatewayConfig cfg;
    cfg.base_url = g.gateway_url;
    return std::make_unique<GatewayStore>(cfg);
  }
  if (g.backend == "memory") {
    if (!allow_memory)
      throw Error("memory backend holds chunks only within one process; "
                  "use --backend disk or gateway for this command");
    return std::make_unique<MemoryStore>();
  }
  throw Error("unknown backend \"" + g.backend + "\"");
}

void check_lattice_flags(const GlobalOpts& g) {
  LatticeConfig cfg;
  cfg.alpha = g.alpha;
  cfg.s = g.s;
  cfg.p = g.p;
  cfg.n_data = 1;
  cfg.validate();
}

// ---- entangle --------------------------------------------------------------

int cmd_entangle(const GlobalOpts& g, const std::string& input, std::string manifest_path) {
  check_lattice_flags(g);
  Bytes file = read_file(input);
  if (file.empty()) throw EmptyFileError("refusing to entangle empty file " + input);
  if (manifest_path.empty()) manifest_path = input + ".manifest.json";

  auto store = make_store(g, /*allow_memory=*/false);
  CodecConfig codec = CodecConfig::for_file(file.size(), g.s, g.block_size);
  ManifestIndex manifest = entangle(file, codec, *store);
  save_manifest(manifest, manifest_path);

  std::uint32_t n = codec.lattice.n_data;
  std::cout << "entangled " << input << " (" << file.size() << " bytes)\n"
            << "  blocks:   " << n << " data + " << 3 * n << " parity = " << 4 * n
            << " chunk addresses\n"
            << "  overhead: " << storage_overhead(Scheme::alpha_entanglement(codec.lattice))
            << "x\n"
            << "  manifest: " << manifest_path << "\n";
  return kExitOk;
}

// ---- download --------------------------------------------------------------

std::unordered_set<ChunkAddress> parse_blocklist(const std::string& arg) {
  std::unordered_set<ChunkAddress> out;
  auto add = [&out](const std::string& token) {
    if (!token.empty()) out.insert(ChunkAddress::from_hex(token));
  };
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw Error("cannot read blocklist file " + arg.substr(1));
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      add(line);
    }
    return out;
  }
  std::stringstream ss(arg);
  std::string token;
  while (std::getline(ss, token, ',')) add(token);
  return out;
}

int cmd_download(const GlobalOpts& g, const std::string& manifest_path,
                 const std::string& output, const std::string& strategy_name,
                 const std::string& failure_mode, double failure_rate,
                 std::uint64_t failure_seed, const std::string& blocklist_arg,
                 const std::string& csv_path, int max_depth, int hedge_delay_ms) {
  ManifestIndex manifest = load_manifest(manifest_path);
  auto base = make_store(g, /*allow_memory=*/false);

  FailurePolicy policy = FailurePolicy::none();
  if (failure_mode == "bernoulli") {
    policy = FailurePolicy::bernoulli(failure_rate, failure_seed);
  } else if (failure_mode == "blocklist") {
    policy = FailurePolicy::blocklist(parse_blocklist(blocklist_arg));
  } else if (failure_mode != "none") {
    throw Error("unknown failure mode \"" + failure_mode + "\"");
  }
  FailureInjectionStore store(*base, policy);

  auto strategy = strategy_from_string(strategy_name);
  if (!strategy) throw Error("unknown strategy \"" + strategy_name + "\"");
  RepairConfig cfg;
  cfg.strategy = *strategy;
  cfg.max_depth = max_depth;
  cfg.deterministic = g.deterministic;
  if (hedge_delay_ms > 0) cfg.hedge_delay = std::chrono::milliseconds(hedge_delay_ms);

  DownloadResult result = download(manifest, store, cfg);
  const FetchReport& r = result.report;

  if (!csv_path.empty()) {
    bool fresh = !std::filesystem::exists(csv_path);
    std::ofstream csv(csv_path, std::ios::app);
    if (!csv) throw Error("cannot append to " + csv_path);
    if (fresh) csv << bench_csv_header() << "\n";
    BenchRow row;
    row.strategy = *strategy;
    row.failure_rate = failure_mode == "bernoulli" ? failure_rate : 0.0;
    row.trial = 0;
    row.seed = failure_seed;
    row.success = r.success();
    row.report = r;
    csv << bench_csv_row(row) << "\n";
  }

  std::cout << "requested " << r.total_blocks_requested << " blocks, "
            << r.failed_data_blocks << " data failures, mean parities/failure "
            << r.parity_requests_mean() << ", wall " << r.wall_time_ms << " ms\n";
  if (!r.success()) {
    std::cerr << "irrecoverable blocks:";
    for (const BlockId& b : r.irrecoverable) std::cerr << ' ' << b.str();
    std::cerr << "\n";
    return kExitIrrecoverable;
  }
  write_file(output, result.bytes);
  std::cout << "recovered " << result.bytes.size() << " bytes -> " << output << "\n";
  return kExitOk;
}

// ---- bench -----------------------------------------------------------------

int cmd_bench(const GlobalOpts& g, BenchSpec spec, const std::string& out_csv) {
  check_lattice_flags(g);
  BenchResult result = run_bench(spec, &std::cerr);

  std::ofstream csv(out_csv, std::ios::trunc);
  if (!csv) throw Error("cannot write " + out_csv);
  write_bench_csv(csv, result);

  if (result.aborted) {
    std::cerr << "bench aborted: " << result.abort_reason << " (partial CSV in " << out_csv
              << ")\n";
    return kExitError;
  }
  write_bench_summary(std::cout, result);
  std::cout << "rows written to " << out_csv << "\n";
  return kExitOk;
}

// ---- analyze ---------------------------------------------------------------

int cmd_analyze(const std::string& csv_path) {
  auto rows = comparison_table();
  write_comparison_text(std::cout, rows);
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw Error("cannot write " + csv_path);
    write_comparison_csv(csv, rows);
    std::cout << "table written to " << csv_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alpha-entangled content-addressed storage"};
  app.set_config("--config", "", "read options from a config file; flags override it");

  GlobalOpts g;
  app.add_option("--alpha", g.alpha, "parity classes per data block (fixed at 3)");
  app.add_option("--s", g.s, "horizontal strand count");
  app.add_option("--p", g.p, "helical strand count per direction (must equal s)");
  app.add_option("--block-size", g.block_size, "bytes per block");
  app.add_option("--backend", g.backend, "chunk store backend: memory|disk|gateway");
  app.add_option("--store-dir", g.store_dir, "disk backend root directory");
  app.add_option("--gateway-url", g.gateway_url, "gateway base URL");
  app.add_option("--seed", g.seed, "base PRNG seed");
  app.add_flag("--deterministic", g.deterministic,
               "single-threaded mode: request counts depend only on the failure set");

  // entangle
  std::string in_path, manifest_out;
  CLI::App* entangle_cmd = app.add_subcommand("entangle", "split, encode and upload a file");
  entangle_cmd->add_option("input", in_path, "file to entangle")->required();
  entangle_cmd->add_option("--manifest", manifest_out, "manifest output path");

  // download
  std::string manifest_path, out_path, strategy = "hierarchical";
  std::string failure_mode = "none", blocklist_arg, dl_csv;
  double failure_rate = 0.0;
  std::uint64_t failure_seed = 0;
  int max_depth = 8, hedge_delay_ms = 0;
  CLI::App* download_cmd =
      app.add_subcommand("download", "retrieve a file, repairing unavailable blocks");
  download_cmd->add_option("manifest", manifest_path, "manifest path")->required();
  download_cmd->add_option("output", out_path, "recovered file path")->required();
  download_cmd->add_option("--strategy", strategy, "hierarchical|round_robin");
  download_cmd->add_option("--failure-mode", failure_mode, "none|bernoulli|blocklist");
  download_cmd->add_option("--failure-rate", failure_rate, "bernoulli unavailability rate");
  download_cmd->add_option("--failure-seed", failure_seed, "failure policy seed");
  download_cmd->add_option("--blocklist", blocklist_arg,
                           "comma-separated hex addresses, or @file with one per line");
  download_cmd->add_option("--csv", dl_csv, "append one metrics row to this CSV");
  download_cmd->add_option("--max-depth", max_depth, "recursion bound for parity repair");
  download_cmd->add_option("--hedge-delay-ms", hedge_delay_ms,
                           "speculative duplicate-fetch delay; 0 disables hedging");

  // bench
  BenchSpec spec;
  std::string out_csv = "bench.csv";
  std::vector<double> rates;
  std::vector<std::string> strategy_names;
  int bench_hedge_ms = 150;  // bench-mode default; forced off by --deterministic
  bool latency_sim = false;
  CLI::App* bench_cmd = app.add_subcommand("bench", "seeded failure-injection benchmark");
  bench_cmd->add_option("--file-size", spec.file_size, "bench file size in bytes");
  bench_cmd->add_option("--rates", rates, "failure rates, e.g. --rates 0 0.05 0.1 0.15");
  bench_cmd->add_option("--trials", spec.trials, "trials per (strategy, rate)");
  bench_cmd->add_option("--strategies", strategy_names, "subset of hierarchical round_robin");
  bench_cmd->add_option("--out-csv", out_csv, "CSV output path");
  bench_cmd->add_option("--hedge-delay-ms", bench_hedge_ms,
                        "speculative duplicate-fetch delay; 0 disables hedging");
  bench_cmd->add_flag("--latency-sim", latency_sim,
                      "add deterministic per-request latency to local backends");

  // analyze
  std::string analyze_csv;
  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "redundancy scheme comparison table");
  analyze_cmd->add_option("--csv", analyze_csv, "also write the table as CSV");

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  try {
    if (*entangle_cmd) return cmd_entangle(g, in_path, manifest_out);
    if (*download_cmd)
      return cmd_download(g, manifest_path, out_path, strategy, failure_mode, failure_rate,
                          failure_seed, blocklist_arg, dl_csv, max_depth, hedge_delay_ms);
    if (*bench_cmd) {
      check_lattice_flags(g);
      spec.s = g.s;
      spec.block_size = g.block_size;
      spec.seed = g.seed;
      spec.deterministic = g.deterministic;
      if (!rates.empty()) spec.rates = rates;
      if (!strategy_names.empty()) {
        spec.strategies.clear();
        for (const std::string& name : strategy_names) {
          auto s = strategy_from_string(name);
          if (!s) throw Error("unknown strategy \"" + name + "\"");
          spec.strategies.push_back(*s);
        }
      }
      // bench defaults to the in-process memory backend
      if (app.count("--backend") == 0 || g.backend == "memory")
        spec.backend = BenchSpec::Backend::memory;
      else if (g.backend == "disk") spec.backend = BenchSpec::Backend::disk;
      else if (g.backend == "gateway") spec.backend = BenchSpec::Backend::gateway;
      else throw Error("unknown backend \"" + g.backend + "\"");
      spec.store_dir = g.store_dir;
      spec.gateway.base_url = g.gateway_url;
      if (bench_hedge_ms > 0 && !g.deterministic)
        spec.hedge_delay = std::chrono::milliseconds(bench_hedge_ms);
      spec.simulate_latency = latency_sim;
      return cmd_bench(g, spec, out_csv);
    }
    if (*analyze_cmd) return cmd_analyze(analyze_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
