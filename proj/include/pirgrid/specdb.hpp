#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pirgrid/errors.hpp"

namespace pirgrid {

using Digest = std::array<uint8_t, 20>;

std::string digest_hex(const Digest& d);

// Shape of one deployment's replicated matrix: r rows of b bytes, with
// r = grid_x * grid_y * channels * time_slots.
struct DbGeometry {
  uint64_t record_count = 0;  // r
  uint32_t block_bytes = 0;   // b; s = b words at w = 8
  uint32_t grid_x = 0;
  uint32_t grid_y = 0;
  uint32_t channel_count = 0;
  uint32_t time_slots = 0;

  void validate() const;
  bool operator==(const DbGeometry&) const = default;
};

struct SpectrumKey {
  uint32_t x = 0;
  uint32_t y = 0;
  uint32_t channel = 0;
  uint32_t time_slot = 0;
};

// Row-major inverted index; the same formula runs on client and every
// replica, so it is part of the protocol contract.
uint64_t inv_index(const SpectrumKey& key, const DbGeometry& geo);

// The replicated r x b matrix. Immutable once built; rows are stored
// contiguously so the per-query scan walks one flat buffer.
class DatabaseMatrix {
 public:
  DatabaseMatrix(DbGeometry geo, std::vector<uint8_t> data, uint64_t seed = 0);

  const DbGeometry& geometry() const { return geo_; }
  uint64_t rows() const { return geo_.record_count; }
  uint32_t block_bytes() const { return geo_.block_bytes; }
  uint64_t seed() const { return seed_; }
  const Digest& content_digest() const { return digest_; }

  std::span<const uint8_t> row(uint64_t j) const {
    return {data_.data() + j * geo_.block_bytes, geo_.block_bytes};
  }
  std::span<const uint8_t> raw() const { return data_; }

 private:
  DbGeometry geo_;
  std::vector<uint8_t> data_;
  uint64_t seed_;
  Digest digest_;
};

DatabaseMatrix generate_synthetic(const DbGeometry& geo, uint64_t seed);

// SPDB file: 64-byte little-endian header (magic "SPDB", version, r, b,
// grid_x, grid_y, channels, slots, seed, 20-byte digest) followed by
// r*b raw row bytes.
void save_db(const DatabaseMatrix& db, const std::string& path);
DatabaseMatrix load_db(const std::string& path);

}  // namespace pirgrid
