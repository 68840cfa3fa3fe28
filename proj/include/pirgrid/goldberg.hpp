#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pirgrid/rng.hpp"
#include "pirgrid/specdb.hpp"
#include "pirgrid/sss.hpp"

namespace pirgrid {

// n Shamir share-vectors of e_beta: for each row j the points
// (alpha_i, shares[i][j]) lie on one random degree-<=t polynomial with
// value e_beta[j] at zero. Alphas are fixed as 0x01..0x0n by server index.
struct GoldbergQuerySet {
  std::vector<std::vector<uint8_t>> shares;
  std::vector<uint8_t> alphas;
  size_t privacy_level = 0;  // t
  uint64_t target_beta = 0;  // client-side only
};

struct GoldbergResponse {
  uint32_t server_id = 0;
  uint8_t alpha = 0;
  std::vector<uint8_t> words;
};

struct GoldbergAnswer {
  std::vector<uint8_t> words;
  uint64_t bytes_touched = 0;  // always r*b: the scan covers every row
};

// Reconstructed block plus per-server verdicts.
struct RecoveryReport {
  std::vector<uint8_t> block;
  std::vector<uint32_t> honest_ids;
  std::vector<uint32_t> byzantine_ids;
  std::vector<uint32_t> absent_ids;  // filled by the caller that knows n
  bool used_hard_recover = false;
};

uint8_t goldberg_alpha_for_server(size_t server_index);

GoldbergQuerySet goldberg_build_queries(uint64_t beta, size_t n, size_t t, uint64_t r,
                                        RandomSource& rng);

// R[q] = sum_j share[j] * D[j][q] over GF(2^8).
GoldbergAnswer goldberg_respond(const DatabaseMatrix& db,
                                std::span<const uint8_t> share);

// EasyRecover fast path, escalating to HardRecover on any inconsistency.
RecoveryReport goldberg_reconstruct(std::span<const GoldbergResponse> responses,
                                    size_t t, size_t word_count);

}  // namespace pirgrid
