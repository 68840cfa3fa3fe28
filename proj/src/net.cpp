#include "pirgrid/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdio>
#include <cstring>

#include "pirgrid/chor.hpp"
#include "pirgrid/field.hpp"

namespace pirgrid {
namespace {

using Clock = std::chrono::steady_clock;

int64_t us_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
}

// Remaining milliseconds until deadline, clamped at zero.
int remaining_ms(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return left.count() <= 0 ? 0 : static_cast<int>(std::min<int64_t>(left.count(), 1 << 30));
}

bool send_all(int fd, const uint8_t* data, size_t len, Clock::time_point deadline) {
  size_t sent = 0;
  while (sent < len) {
    struct pollfd pfd {fd, POLLOUT, 0};
    int ms = remaining_ms(deadline);
    if (ms == 0) return false;
    int pr = ::poll(&pfd, 1, ms);
    if (pr <= 0) return false;
    ssize_t n = ::send(fd, data + sent, len - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<size_t>(n);
  }
  return true;
}

bool recv_all(int fd, uint8_t* data, size_t len, Clock::time_point deadline) {
  size_t got = 0;
  while (got < len) {
    struct pollfd pfd {fd, POLLIN, 0};
    int ms = remaining_ms(deadline);
    if (ms == 0) return false;
    int pr = ::poll(&pfd, 1, ms);
    if (pr <= 0) return false;
    ssize_t n = ::recv(fd, data + got, len - got, 0);
    if (n <= 0) return false;
    got += static_cast<size_t>(n);
  }
  return true;
}

// Reads one frame; returns false on timeout/EOF, throws FrameError on a
// malformed header.
bool recv_frame(int fd, WireMessage& out, Clock::time_point deadline,
                uint64_t* bytes_read = nullptr) {
  uint8_t header[kFrameHeaderSize];
  if (!recv_all(fd, header, sizeof header, deadline)) return false;
  // decode via the shared parser for the validation rules
  std::vector<uint8_t> buf(header, header + sizeof header);
  uint32_t len;
  std::memcpy(&len, header + 13, 4);
  if (len > kMaxPayload) throw FrameError("payload length exceeds 64 MiB");
  buf.resize(kFrameHeaderSize + len);
  if (len > 0 && !recv_all(fd, buf.data() + kFrameHeaderSize, len, deadline)) return false;
  out = decode_frame(buf);
  if (bytes_read) *bytes_read += buf.size();
  return true;
}

bool send_frame(int fd, const WireMessage& msg, Clock::time_point deadline,
                uint64_t* bytes_written = nullptr) {
  auto bytes = encode_frame(msg);
  if (!send_all(fd, bytes.data(), bytes.size(), deadline)) return false;
  if (bytes_written) *bytes_written += bytes.size();
  return true;
}

int connect_with_deadline(const std::string& host, uint16_t port,
                          Clock::time_point deadline) {
  struct addrinfo hints {};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  struct addrinfo* res = nullptr;
  char port_str[16];
  std::snprintf(port_str, sizeof port_str, "%u", port);
  if (::getaddrinfo(host.c_str(), port_str, &hints, &res) != 0 || res == nullptr)
    return -1;

  int fd = ::socket(res->ai_family, SOCK_STREAM | SOCK_NONBLOCK, 0);
  if (fd < 0) {
    ::freeaddrinfo(res);
    return -1;
  }
  int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0 && errno != EINPROGRESS) {
    ::close(fd);
    return -1;
  }
  if (rc != 0) {
    struct pollfd pfd {fd, POLLOUT, 0};
    if (::poll(&pfd, 1, remaining_ms(deadline)) <= 0) {
      ::close(fd);
      return -1;
    }
    int err = 0;
    socklen_t len = sizeof err;
    ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      ::close(fd);
      return -1;
    }
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

}  // namespace

FaultProfile FaultProfile::parse(const std::string& text) {
  FaultProfile p;
  if (text.empty() || text == "none") return p;
  if (text.rfind("drop:", 0) == 0) {
    p.kind = Kind::kDrop;
    p.drop_probability = std::stod(text.substr(5));
    return p;
  }
  if (text.rfind("delay:", 0) == 0) {
    p.kind = Kind::kDelay;
    p.delay_ms = static_cast<uint32_t>(std::stoul(text.substr(6)));
    return p;
  }
  if (text.rfind("byzantine:flip-bytes:", 0) == 0) {
    p.kind = Kind::kByzFlipBytes;
    p.flip_count = static_cast<uint32_t>(std::stoul(text.substr(21)));
    return p;
  }
  if (text == "byzantine:random-block") {
    p.kind = Kind::kByzRandomBlock;
    return p;
  }
  if (text.rfind("byzantine:stale-db:", 0) == 0) {
    p.kind = Kind::kByzStaleDb;
    p.stale_db_path = text.substr(19);
    return p;
  }
  throw PirError("unknown fault profile: " + text);
}

std::string FaultProfile::to_string() const {
  switch (kind) {
    case Kind::kNone:
      return "none";
    case Kind::kDrop:
      return "drop:" + std::to_string(drop_probability);
    case Kind::kDelay:
      return "delay:" + std::to_string(delay_ms);
    case Kind::kByzFlipBytes:
      return "byzantine:flip-bytes:" + std::to_string(flip_count);
    case Kind::kByzRandomBlock:
      return "byzantine:random-block";
    case Kind::kByzStaleDb:
      return "byzantine:stale-db:" + stale_db_path;
  }
  return "none";
}

PirServer::PirServer(ServerConfig config) : config_(std::move(config)) {
  if (!config_.db) throw PirError("server needs a database");
  if (config_.fault.kind == FaultProfile::Kind::kByzStaleDb) {
    stale_db_ = std::make_shared<const DatabaseMatrix>(load_db(config_.fault.stale_db_path));
    if (stale_db_->geometry() != config_.db->geometry())
      throw CorruptDatabase("stale replica geometry differs from serving geometry");
  }
}

PirServer::~PirServer() { stop(); }

void PirServer::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw NetError("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  struct sockaddr_in addr {};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.listen_host.c_str(), &addr.sin_addr) != 1)
    throw NetError("bad listen address: " + config_.listen_host);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
    throw NetError("bind failed on " + config_.listen_host);
  if (::listen(listen_fd_, 64) != 0) throw NetError("listen failed");

  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);

  running_ = true;
  accept_thread_ = std::thread(&PirServer::accept_loop, this);
}

void PirServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  listen_fd_ = -1;
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(workers_mutex_);
    workers.swap(workers_);
  }
  for (auto& w : workers)
    if (w.joinable()) w.join();
}

std::string PirServer::log_contents() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

void PirServer::log_line(const std::string& line) {
  std::lock_guard lock(log_mutex_);
  log_ += line;
  log_ += '\n';
  if (!config_.log_path.empty()) {
    if (std::FILE* f = std::fopen(config_.log_path.c_str(), "a")) {
      std::fputs(line.c_str(), f);
      std::fputc('\n', f);
      std::fclose(f);
    }
  }
}

void PirServer::accept_loop() {
  while (running_) {
    struct pollfd pfd {listen_fd_, POLLIN, 0};
    if (::poll(&pfd, 1, 100) <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    std::lock_guard lock(workers_mutex_);
    workers_.emplace_back(&PirServer::handle_connection, this, fd);
  }
}

void PirServer::handle_connection(int fd) {
  const DatabaseMatrix& db = *config_.db;
  auto far_deadline = [] { return Clock::now() + std::chrono::seconds(30); };

  while (running_) {
    // Short poll so stop() is noticed; only once bytes are waiting do we
    // commit to reading a whole frame.
    struct pollfd pfd {fd, POLLIN, 0};
    int pr = ::poll(&pfd, 1, 100);
    if (pr < 0) break;
    if (pr == 0) continue;
    {
      char probe;
      ssize_t pn = ::recv(fd, &probe, 1, MSG_PEEK | MSG_DONTWAIT);
      if (pn == 0) break;  // peer closed
    }

    WireMessage msg;
    try {
      if (!recv_frame(fd, msg, far_deadline())) break;
    } catch (const FrameError& e) {
      WireMessage err{MsgType::kError, 0, encode_error(WireErrorCode::kMalformedFrame, e.what())};
      send_frame(fd, err, far_deadline());
      break;
    }

    try {
      switch (msg.msg_type) {
        case MsgType::kHello: {
          DbInfo info{db.geometry(), db.content_digest()};
          WireMessage reply{MsgType::kDbInfo, msg.session_id, encode_db_info(info)};
          send_frame(fd, reply, far_deadline());
          break;
        }
        case MsgType::kQueryChor:
        case MsgType::kQueryGoldberg: {
          uint64_t query_index = query_counter_.fetch_add(1);
          // Per-query stream keyed off the server seed so fault behavior
          // replays under a fixed configuration.
          DeterministicRandom fault_rng(config_.seed * 0x100000001b3ULL + query_index);

          if (config_.fault.kind == FaultProfile::Kind::kDrop) {
            double u = static_cast<double>(fault_rng.below(1u << 30)) / (1u << 30);
            if (u < config_.fault.drop_probability) {
              log_line("query dropped by fault profile");
              break;
            }
          }
          if (config_.fault.kind == FaultProfile::Kind::kDelay) {
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.fault.delay_ms));
          }

          const DatabaseMatrix& serving =
              (config_.fault.kind == FaultProfile::Kind::kByzStaleDb) ? *stale_db_ : db;

          std::vector<uint8_t> block;
          if (msg.msg_type == MsgType::kQueryChor) {
            if (msg.payload.size() != (serving.rows() + 7) / 8)
              throw ShapeError("chor query size mismatch");
            auto query = BitVector::from_bytes(msg.payload, serving.rows());
            log_line("chor query: " + std::to_string(msg.payload.size()) + " share bytes");
            block = chor_respond(serving, query).block;
          } else {
            if (msg.payload.size() != serving.rows())
              throw ShapeError("goldberg share size mismatch");
            log_line("goldberg query: " + std::to_string(msg.payload.size()) +
                     " share bytes");
            block = goldberg_respond(serving, msg.payload).words;
          }

          if (config_.fault.kind == FaultProfile::Kind::kByzFlipBytes) {
            for (uint32_t i = 0; i < config_.fault.flip_count; ++i) {
              size_t pos = fault_rng.below(block.size());
              block[pos] ^= fault_rng.nonzero_byte();
            }
          } else if (config_.fault.kind == FaultProfile::Kind::kByzRandomBlock) {
            fault_rng.fill(block.data(), block.size());
          }

          WireMessage reply{MsgType::kResponse, msg.session_id, std::move(block)};
          send_frame(fd, reply, Clock::now() + std::chrono::seconds(10));
          break;
        }
        default: {
          WireMessage err{MsgType::kError, msg.session_id,
                          encode_error(WireErrorCode::kUnsupportedQuery,
                                       "unexpected message type")};
          send_frame(fd, err, far_deadline());
          break;
        }
      }
    } catch (const PirError& e) {
      WireMessage err{MsgType::kError, msg.session_id,
                      encode_error(WireErrorCode::kShapeMismatch, e.what())};
      send_frame(fd, err, far_deadline());
    }
  }
  ::close(fd);
}

namespace {

struct Exchange {
  ServerEndpoint endpoint;
  int fd = -1;
  bool have_info = false;
  DbInfo info;
  PerServerMetrics metrics;
  std::vector<uint8_t> response;
  bool have_response = false;
};

}  // namespace

FetchResult private_fetch(const SpectrumKey& key,
                          const std::vector<ServerEndpoint>& endpoints,
                          Protocol protocol, size_t t,
                          std::chrono::milliseconds deadline, RandomSource& rng) {
  size_t n = endpoints.size();
  if (n < 2) throw NeedMultipleServers("need at least 2 endpoints");

  auto start = Clock::now();
  auto cutoff = start + deadline;
  uint64_t session_id = 0;
  {
    SystemRandom sys;
    sys.fill(reinterpret_cast<uint8_t*>(&session_id), sizeof session_id);
  }

  std::vector<Exchange> exchanges(n);
  for (size_t i = 0; i < n; ++i) {
    exchanges[i].endpoint = endpoints[i];
    exchanges[i].metrics.server_id = endpoints[i].server_id;
  }

  // Phase 1: handshake every replica concurrently, verify agreement.
  {
    std::vector<std::thread> threads;
    for (auto& ex : exchanges) {
      threads.emplace_back([&ex, cutoff, session_id] {
        try {
          ex.fd = connect_with_deadline(ex.endpoint.host, ex.endpoint.port, cutoff);
          if (ex.fd < 0) return;
          WireMessage hello{MsgType::kHello, session_id, {}};
          if (!send_frame(ex.fd, hello, cutoff, &ex.metrics.bytes_up)) return;
          WireMessage reply;
          if (!recv_frame(ex.fd, reply, cutoff, &ex.metrics.bytes_down)) return;
          if (reply.msg_type != MsgType::kDbInfo) return;
          ex.info = decode_db_info(reply.payload);
          ex.have_info = true;
        } catch (const PirError&) {
          // a misbehaving replica counts as absent
        }
      });
    }
    for (auto& th : threads) th.join();
  }

  const DbInfo* reference = nullptr;
  for (auto& ex : exchanges) {
    if (!ex.have_info) continue;
    if (reference == nullptr) {
      reference = &ex.info;
    } else if (ex.info.digest != reference->digest ||
               !(ex.info.geometry == reference->geometry)) {
      for (auto& e : exchanges)
        if (e.fd >= 0) ::close(e.fd);
      throw ReplicaDivergence("replicas disagree on content digest or geometry");
    }
  }

  struct FdGuard {
    std::vector<Exchange>& exchanges;
    ~FdGuard() {
      for (auto& e : exchanges)
        if (e.fd >= 0) ::close(e.fd);
    }
  } guard{exchanges};

  if (reference == nullptr) {
    if (protocol == Protocol::kChor)
      throw IncompleteResponses("no replica reachable before the deadline");
    throw InsufficientResponses("no replica reachable before the deadline");
  }

  const DbGeometry& geo = reference->geometry;
  uint64_t beta = inv_index(key, geo);
  uint64_t r = geo.record_count;
  uint32_t b = geo.block_bytes;

  // Phase 2: build the query shares.
  auto build_start = Clock::now();
  std::vector<std::vector<uint8_t>> query_payloads(n);
  GoldbergQuerySet gq;
  if (protocol == Protocol::kChor) {
    auto qs = chor_build_queries(beta, n, r, rng);
    for (size_t i = 0; i < n; ++i) query_payloads[i] = qs.shares[i].to_bytes();
  } else {
    gq = goldberg_build_queries(beta, n, t, r, rng);
    for (size_t i = 0; i < n; ++i) query_payloads[i] = gq.shares[i];
  }
  int64_t build_us = us_between(build_start, Clock::now());

  // Phase 3: fan out, gather until the deadline.
  {
    std::vector<std::thread> threads;
    for (size_t i = 0; i < n; ++i) {
      auto& ex = exchanges[i];
      if (!ex.have_info) continue;
      threads.emplace_back([&ex, &query_payloads, i, protocol, cutoff, session_id, b] {
        try {
          MsgType qt = protocol == Protocol::kChor ? MsgType::kQueryChor
                                                   : MsgType::kQueryGoldberg;
          WireMessage query{qt, session_id, query_payloads[i]};
          auto sent_at = Clock::now();
          if (!send_frame(ex.fd, query, cutoff, &ex.metrics.bytes_up)) return;
          WireMessage reply;
          if (!recv_frame(ex.fd, reply, cutoff, &ex.metrics.bytes_down)) return;
          if (reply.msg_type != MsgType::kResponse || reply.payload.size() != b) return;
          ex.metrics.rtt_us = us_between(sent_at, Clock::now());
          ex.response = std::move(reply.payload);
          ex.have_response = true;
          ex.metrics.responded = true;
        } catch (const PirError&) {
          // dropped mid-exchange; the deadline barrier decides the outcome
        }
      });
    }
    for (auto& th : threads) th.join();
  }

  size_t k = 0;
  for (auto& ex : exchanges)
    if (ex.have_response) ++k;

  FetchResult result;
  auto recovery_start = Clock::now();
  if (protocol == Protocol::kChor) {
    if (k != n) throw IncompleteResponses("LP-Chor requires all n responses; got " +
                                          std::to_string(k) + "/" + std::to_string(n));
    std::vector<ChorResponse> responses;
    for (auto& ex : exchanges)
      responses.push_back({ex.endpoint.server_id, std::move(ex.response)});
    result.block = chor_reconstruct(responses, n);
    for (auto& ex : exchanges) result.report.honest_ids.push_back(ex.endpoint.server_id);
  } else {
    if (k <= t) throw InsufficientResponses("LP-Goldberg got k=" + std::to_string(k) +
                                            " <= t=" + std::to_string(t));
    std::vector<GoldbergResponse> responses;
    for (auto& ex : exchanges) {
      if (!ex.have_response) {
        result.report.absent_ids.push_back(ex.endpoint.server_id);
        continue;
      }
      responses.push_back({ex.endpoint.server_id, ex.endpoint.alpha, std::move(ex.response)});
    }
    result.report = [&] {
      auto report = goldberg_reconstruct(responses, t, b);
      report.absent_ids = std::move(result.report.absent_ids);
      return report;
    }();
    result.block = result.report.block;
  }
  int64_t recovery_us = us_between(recovery_start, Clock::now());

  SessionMetrics& m = result.metrics;
  for (auto& ex : exchanges) m.servers.push_back(ex.metrics);
  if (protocol == Protocol::kChor) {
    m.protocol_bits_up = r * n;
    m.protocol_bits_down = uint64_t{b} * 8 * n;
  } else {
    m.protocol_bits_up = r * 8 * n;
    m.protocol_bits_down = uint64_t{k} * b * 8;
  }
  for (auto& ex : exchanges) {
    m.wire_bytes_up += ex.metrics.bytes_up;
    m.wire_bytes_down += ex.metrics.bytes_down;
  }
  m.framing_overhead_bits =
      (m.wire_bytes_up + m.wire_bytes_down) * 8 - m.protocol_bits_up - m.protocol_bits_down;
  m.build_us = build_us;
  m.recovery_us = recovery_us;
  m.elapsed_us = us_between(start, Clock::now());
  return result;
}

}  // namespace pirgrid
