#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pirgrid/errors.hpp"
#include "pirgrid/specdb.hpp"

namespace pirgrid {

// Frame layout, all integers little-endian:
//   magic "PIR1" (4) | msg_type (1) | session_id (8) | payload_len (4) | payload
//
// Payload schemas:
//   HELLO           empty
//   DB_INFO         r u64 | block_bytes u32 | grid_x u32 | grid_y u32 |
//                   channels u32 | slots u32 | digest (20)
//   QUERY_CHOR      ceil(r/8) packed query bits, LSB-first
//   QUERY_GOLDBERG  r share bytes
//   RESPONSE        block bytes (b for Chor, s words for Goldberg)
//   ERROR           code u16 | utf8 message
enum class MsgType : uint8_t {
  kHello = 0x01,
  kQueryChor = 0x02,
  kQueryGoldberg = 0x03,
  kResponse = 0x04,
  kError = 0x05,
  kDbInfo = 0x06,
};

constexpr size_t kFrameHeaderSize = 17;
constexpr uint32_t kMaxPayload = 64u * 1024 * 1024;

struct WireMessage {
  MsgType msg_type = MsgType::kHello;
  uint64_t session_id = 0;
  std::vector<uint8_t> payload;
};

std::vector<uint8_t> encode_frame(const WireMessage& msg);

// Parses one complete frame; throws FrameError on bad magic, unknown
// type, oversize length, or short input.
WireMessage decode_frame(std::span<const uint8_t> bytes);

struct DbInfo {
  DbGeometry geometry;
  Digest digest{};
};

std::vector<uint8_t> encode_db_info(const DbInfo& info);
DbInfo decode_db_info(std::span<const uint8_t> payload);

enum class WireErrorCode : uint16_t {
  kMalformedFrame = 1,
  kShapeMismatch = 2,
  kUnsupportedQuery = 3,
  kInternal = 4,
};

std::vector<uint8_t> encode_error(WireErrorCode code, const std::string& message);

}  // namespace pirgrid
