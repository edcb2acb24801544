#pragma once

#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>

#include "aestore/chunk_store.hpp"

namespace aestore {

// HTTP content-addressed gateway, bzz-raw style:
//   GET  <base>/chunk/<hex-address>  -> 200 raw payload | 404
//   POST <base>/chunk  (raw body)    -> 200 hex address
//
// Gateways serve from nodes that may lag behind recent uploads, so transient
// verdicts (404, 5xx, connection failure, timeout) are retried with a fixed
// backoff before mapping to unavailable.
struct GatewayConfig {
  std::string base_url;  // e.g. "http://localhost:8500"
  std::chrono::milliseconds timeout{5000};
  int retries = 3;
  std::chrono::milliseconds backoff{200};
};

namespace gateway_detail {

inline httplib::Client make_client(const GatewayConfig& cfg) {
  httplib::Client cli(cfg.base_url);
  cli.set_connection_timeout(cfg.timeout);
  cli.set_read_timeout(cfg.timeout);
  cli.set_write_timeout(cfg.timeout);
  return cli;
}

inline bool transient(const httplib::Result& res) {
  if (!res) return true;                       // connection failure or timeout
  if (res->status >= 500) return true;
  if (res->status == 404) return true;         // possibly not yet synced
  return false;
}

}  // namespace gateway_detail

inline GetResult gateway_get(const GatewayConfig& cfg, const ChunkAddress& addr) {
  httplib::Client cli = gateway_detail::make_client(cfg);
  std::string path = "/chunk/" + addr.hex();
  for (int attempt = 0;; ++attempt) {
    httplib::Result res = cli.Get(path);
    if (res && res->status == 200) {
      Bytes payload(res->body.begin(), res->body.end());
      if (payload.empty() || payload.size() > kMaxChunkSize || address_of(payload) != addr)
        return GetResult::corrupt();
      return GetResult::hit(std::move(payload));
    }
    if (res && res->status >= 400 && res->status < 500 && res->status != 404)
      throw PermanentRejectionError("gateway rejected get with HTTP " +
                                    std::to_string(res->status));
    if (!gateway_detail::transient(res) || attempt >= cfg.retries)
      return GetResult::unavailable();
    std::this_thread::sleep_for(cfg.backoff);
  }
}

inline ChunkAddress gateway_put(const GatewayConfig& cfg, std::span<const std::uint8_t> payload) {
  ChunkAddress local = address_of(payload);  // validates the size bound
  httplib::Client cli = gateway_detail::make_client(cfg);
  for (int attempt = 0;; ++attempt) {
    httplib::Result res = cli.Post("/chunk", reinterpret_cast<const char*>(payload.data()),
                                   payload.size(), "application/octet-stream");
    if (res && res->status == 200) {
      std::string body = res->body;
      while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
      ChunkAddress remote = ChunkAddress::from_hex(body);
      if (remote != local)
        throw CorruptionError("gateway returned mismatched address for uploaded chunk");
      return remote;
    }
    if (res && res->status >= 400 && res->status < 500)
      throw PermanentRejectionError("gateway rejected put with HTTP " +
                                    std::to_string(res->status));
    if (attempt >= cfg.retries)
      throw StoreUnavailableError("gateway unreachable after " +
                                  std::to_string(cfg.retries + 1) + " attempts");
    std::this_thread::sleep_for(cfg.backoff);
  }
}

class GatewayStore : public ChunkStore {
 public:
  explicit GatewayStore(GatewayConfig cfg) : cfg_(std::move(cfg)) {}

  ChunkAddress put(std::span<const std::uint8_t> payload) override {
    return gateway_put(cfg_, payload);
  }

  GetResult get(const ChunkAddress& addr) override { return gateway_get(cfg_, addr); }

  const GatewayConfig& config() const { return cfg_; }

 private:
  GatewayConfig cfg_;
};

}  // namespace aestore
