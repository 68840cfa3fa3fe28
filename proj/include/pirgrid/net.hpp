#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pirgrid/goldberg.hpp"
#include "pirgrid/specdb.hpp"
#include "pirgrid/wire.hpp"

namespace pirgrid {

// Server-side fault injection, deterministic under the server's seed:
//   none | drop:<p> | delay:<ms> | byzantine:flip-bytes:<count> |
//   byzantine:random-block | byzantine:stale-db:<alt-path>
struct FaultProfile {
  enum class Kind {
    kNone,
    kDrop,
    kDelay,
    kByzFlipBytes,
    kByzRandomBlock,
    kByzStaleDb,
  };
  Kind kind = Kind::kNone;
  double drop_probability = 0.0;
  uint32_t delay_ms = 0;
  uint32_t flip_count = 0;
  std::string stale_db_path;

  static FaultProfile parse(const std::string& text);
  std::string to_string() const;
};

struct ServerConfig {
  std::shared_ptr<const DatabaseMatrix> db;
  std::string listen_host = "127.0.0.1";
  uint16_t port = 0;  // 0 = ephemeral
  FaultProfile fault;
  uint64_t seed = 0;
  std::string log_path;  // empty = no file log
};

// One replica daemon: answers HELLO with DB_INFO and queries via the
// protocol engines, applying its fault profile. Connections are served
// on their own threads against the shared immutable matrix.
class PirServer {
 public:
  explicit PirServer(ServerConfig config);
  ~PirServer();

  PirServer(const PirServer&) = delete;
  PirServer& operator=(const PirServer&) = delete;

  void start();
  void stop();
  uint16_t port() const { return port_; }

  // In-memory log, for tests that scrape what the server saw.
  std::string log_contents() const;

 private:
  void accept_loop();
  void handle_connection(int fd);
  void log_line(const std::string& line);

  ServerConfig config_;
  std::shared_ptr<const DatabaseMatrix> stale_db_;
  int listen_fd_ = -1;
  uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::atomic<uint64_t> query_counter_{0};
  std::thread accept_thread_;
  std::vector<std::thread> workers_;
  std::mutex workers_mutex_;
  mutable std::mutex log_mutex_;
  std::string log_;
};

struct ServerEndpoint {
  uint32_t server_id = 0;
  std::string host;
  uint16_t port = 0;
  uint8_t alpha = 0;  // Goldberg evaluation point
};

enum class Protocol { kChor, kGoldberg };

struct PerServerMetrics {
  uint32_t server_id = 0;
  uint64_t bytes_up = 0;    // wire bytes, framing included
  uint64_t bytes_down = 0;
  int64_t rtt_us = -1;      // -1 = no response
  bool responded = false;
};

struct SessionMetrics {
  std::vector<PerServerMetrics> servers;
  // Protocol-only accounting per the cost model, framing excluded:
  // Chor (r + b*8)*n bits; Goldberg r*8*n + k*b*8 bits.
  uint64_t protocol_bits_up = 0;
  uint64_t protocol_bits_down = 0;
  uint64_t wire_bytes_up = 0;
  uint64_t wire_bytes_down = 0;
  uint64_t framing_overhead_bits = 0;  // wire bits minus protocol bits
  int64_t build_us = 0;
  int64_t recovery_us = 0;
  int64_t elapsed_us = 0;
};

struct FetchResult {
  std::vector<uint8_t> block;
  RecoveryReport report;
  SessionMetrics metrics;
};

// Fans one private query out to n servers and gathers responses until
// the deadline. Chor needs all n responses; Goldberg proceeds with any
// k > t gathered in time.
FetchResult private_fetch(const SpectrumKey& key,
                          const std::vector<ServerEndpoint>& endpoints,
                          Protocol protocol, size_t t,
                          std::chrono::milliseconds deadline, RandomSource& rng);

}  // namespace pirgrid
