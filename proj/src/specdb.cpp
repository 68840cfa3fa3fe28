#include "pirgrid/specdb.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstring>
#include <memory>

#include "pirgrid/rng.hpp"

namespace pirgrid {
namespace {

constexpr char kMagic[4] = {'S', 'P', 'D', 'B'};
constexpr uint32_t kFormatVersion = 1;
constexpr size_t kHeaderSize = 64;

Digest digest_rows(std::span<const uint8_t> data) {
  std::array<uint8_t, 32> full{};
  unsigned int out_len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx.get(), data.data(), data.size());
  EVP_DigestFinal_ex(ctx.get(), full.data(), &out_len);
  Digest d{};
  std::memcpy(d.data(), full.data(), d.size());
  return d;
}

template <typename T>
void put_le(uint8_t* out, T v) {
  for (size_t i = 0; i < sizeof(T); ++i) out[i] = static_cast<uint8_t>(v >> (8 * i));
}

template <typename T>
T get_le(const uint8_t* in) {
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[i]) << (8 * i);
  return v;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

std::string digest_hex(const Digest& d) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(d.size() * 2);
  for (uint8_t b : d) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xF]);
  }
  return out;
}

void DbGeometry::validate() const {
  if (record_count < 2) throw CorruptDatabase("record count must be >= 2");
  if (block_bytes < 1) throw CorruptDatabase("block size must be >= 1");
  uint64_t product = uint64_t{grid_x} * grid_y * channel_count * time_slots;
  if (product != record_count)
    throw CorruptDatabase("grid_x*grid_y*channels*slots != record count");
}

uint64_t inv_index(const SpectrumKey& key, const DbGeometry& geo) {
  if (key.x >= geo.grid_x || key.y >= geo.grid_y || key.channel >= geo.channel_count ||
      key.time_slot >= geo.time_slots)
    throw KeyOutOfRange("spectrum key outside geometry bounds");
  return ((uint64_t{key.y} * geo.grid_x + key.x) * geo.channel_count + key.channel) *
             geo.time_slots +
         key.time_slot;
}

DatabaseMatrix::DatabaseMatrix(DbGeometry geo, std::vector<uint8_t> data, uint64_t seed)
    : geo_(geo), data_(std::move(data)), seed_(seed) {
  geo_.validate();
  if (data_.size() != geo_.record_count * geo_.block_bytes)
    throw CorruptDatabase("row data size does not match geometry");
  digest_ = digest_rows(data_);
}

DatabaseMatrix generate_synthetic(const DbGeometry& geo, uint64_t seed) {
  geo.validate();
  std::vector<uint8_t> data(geo.record_count * geo.block_bytes);
  DeterministicRandom rng(seed);
  rng.fill(data.data(), data.size());
  return DatabaseMatrix(geo, std::move(data), seed);
}

void save_db(const DatabaseMatrix& db, const std::string& path) {
  uint8_t header[kHeaderSize] = {};
  std::memcpy(header, kMagic, 4);
  put_le<uint32_t>(header + 4, kFormatVersion);
  const DbGeometry& g = db.geometry();
  put_le<uint64_t>(header + 8, g.record_count);
  put_le<uint32_t>(header + 16, g.block_bytes);
  put_le<uint32_t>(header + 20, g.grid_x);
  put_le<uint32_t>(header + 24, g.grid_y);
  put_le<uint32_t>(header + 28, g.channel_count);
  put_le<uint32_t>(header + 32, g.time_slots);
  put_le<uint64_t>(header + 36, db.seed());
  std::memcpy(header + 44, db.content_digest().data(), 20);

  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw CorruptDatabase("cannot open " + path + " for writing");
  if (std::fwrite(header, 1, kHeaderSize, f.get()) != kHeaderSize ||
      std::fwrite(db.raw().data(), 1, db.raw().size(), f.get()) != db.raw().size())
    throw CorruptDatabase("short write to " + path);
}

DatabaseMatrix load_db(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw CorruptDatabase("cannot open " + path);

  uint8_t header[kHeaderSize];
  if (std::fread(header, 1, kHeaderSize, f.get()) != kHeaderSize)
    throw CorruptDatabase("truncated header in " + path);
  if (std::memcmp(header, kMagic, 4) != 0) throw CorruptDatabase("bad magic in " + path);
  if (get_le<uint32_t>(header + 4) != kFormatVersion)
    throw CorruptDatabase("unsupported format version in " + path);

  DbGeometry geo;
  geo.record_count = get_le<uint64_t>(header + 8);
  geo.block_bytes = get_le<uint32_t>(header + 16);
  geo.grid_x = get_le<uint32_t>(header + 20);
  geo.grid_y = get_le<uint32_t>(header + 24);
  geo.channel_count = get_le<uint32_t>(header + 28);
  geo.time_slots = get_le<uint32_t>(header + 32);
  uint64_t seed = get_le<uint64_t>(header + 36);
  geo.validate();

  std::vector<uint8_t> data(geo.record_count * geo.block_bytes);
  if (std::fread(data.data(), 1, data.size(), f.get()) != data.size())
    throw CorruptDatabase("truncated rows in " + path);
  if (std::fgetc(f.get()) != EOF) throw CorruptDatabase("trailing bytes in " + path);

  DatabaseMatrix db(geo, std::move(data), seed);
  if (std::memcmp(db.content_digest().data(), header + 44, 20) != 0)
    throw CorruptDatabase("digest mismatch in " + path);
  return db;
}

}  // namespace pirgrid
