#include "pirgrid/wire.hpp"

#include <cstring>

namespace pirgrid {
namespace {

constexpr char kWireMagic[4] = {'P', 'I', 'R', '1'};

template <typename T>
void put_le(std::vector<uint8_t>& out, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(const uint8_t* in) {
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[i]) << (8 * i);
  return v;
}

bool known_type(uint8_t t) { return t >= 0x01 && t <= 0x06; }

}  // namespace

std::vector<uint8_t> encode_frame(const WireMessage& msg) {
  if (msg.payload.size() > kMaxPayload) throw FrameError("payload exceeds 64 MiB");
  std::vector<uint8_t> out;
  out.reserve(kFrameHeaderSize + msg.payload.size());
  out.insert(out.end(), kWireMagic, kWireMagic + 4);
  out.push_back(static_cast<uint8_t>(msg.msg_type));
  put_le<uint64_t>(out, msg.session_id);
  put_le<uint32_t>(out, static_cast<uint32_t>(msg.payload.size()));
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

WireMessage decode_frame(std::span<const uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderSize) throw FrameError("short frame header");
  if (std::memcmp(bytes.data(), kWireMagic, 4) != 0) throw FrameError("bad magic");
  uint8_t type = bytes[4];
  if (!known_type(type)) throw FrameError("unknown message type");
  uint64_t session = get_le<uint64_t>(bytes.data() + 5);
  uint32_t len = get_le<uint32_t>(bytes.data() + 13);
  if (len > kMaxPayload) throw FrameError("payload length exceeds 64 MiB");
  if (bytes.size() < kFrameHeaderSize + len) throw FrameError("truncated payload");

  WireMessage msg;
  msg.msg_type = static_cast<MsgType>(type);
  msg.session_id = session;
  msg.payload.assign(bytes.begin() + kFrameHeaderSize,
                     bytes.begin() + kFrameHeaderSize + len);
  return msg;
}

std::vector<uint8_t> encode_db_info(const DbInfo& info) {
  std::vector<uint8_t> out;
  out.reserve(48);
  put_le<uint64_t>(out, info.geometry.record_count);
  put_le<uint32_t>(out, info.geometry.block_bytes);
  put_le<uint32_t>(out, info.geometry.grid_x);
  put_le<uint32_t>(out, info.geometry.grid_y);
  put_le<uint32_t>(out, info.geometry.channel_count);
  put_le<uint32_t>(out, info.geometry.time_slots);
  out.insert(out.end(), info.digest.begin(), info.digest.end());
  return out;
}

DbInfo decode_db_info(std::span<const uint8_t> payload) {
  if (payload.size() != 48) throw FrameError("DB_INFO payload must be 48 bytes");
  DbInfo info;
  info.geometry.record_count = get_le<uint64_t>(payload.data());
  info.geometry.block_bytes = get_le<uint32_t>(payload.data() + 8);
  info.geometry.grid_x = get_le<uint32_t>(payload.data() + 12);
  info.geometry.grid_y = get_le<uint32_t>(payload.data() + 16);
  info.geometry.channel_count = get_le<uint32_t>(payload.data() + 20);
  info.geometry.time_slots = get_le<uint32_t>(payload.data() + 24);
  std::memcpy(info.digest.data(), payload.data() + 28, 20);
  return info;
}

std::vector<uint8_t> encode_error(WireErrorCode code, const std::string& message) {
  std::vector<uint8_t> out;
  put_le<uint16_t>(out, static_cast<uint16_t>(code));
  out.insert(out.end(), message.begin(), message.end());
  return out;
}

}  // namespace pirgrid
