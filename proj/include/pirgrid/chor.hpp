#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pirgrid/field.hpp"
#include "pirgrid/rng.hpp"
#include "pirgrid/specdb.hpp"

namespace pirgrid {

// The n per-server query shares; their XOR is the basis vector e_beta.
// target_beta stays client-side and is never serialized.
struct ChorQuerySet {
  std::vector<BitVector> shares;
  uint64_t target_beta = 0;
};

struct ChorResponse {
  uint32_t server_id = 0;
  std::vector<uint8_t> block;
};

// Server-side work accounting for one query.
struct ChorAnswer {
  std::vector<uint8_t> block;
  uint64_t rows_touched = 0;       // popcount of the query share
  uint64_t table_bound_rows = 0;   // the full-scan figure the cost model charges
};

ChorQuerySet chor_build_queries(uint64_t beta, size_t n, uint64_t r, RandomSource& rng);

ChorAnswer chor_respond(const DatabaseMatrix& db, const BitVector& query);

// XOR of all n responses; requires every server's answer.
std::vector<uint8_t> chor_reconstruct(std::span<const ChorResponse> responses, size_t n);

}  // namespace pirgrid
