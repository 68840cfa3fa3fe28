#include "pirgrid/goldberg.hpp"

#include "pirgrid/field.hpp"

namespace pirgrid {

uint8_t goldberg_alpha_for_server(size_t server_index) {
  return static_cast<uint8_t>(server_index + 1);
}

GoldbergQuerySet goldberg_build_queries(uint64_t beta, size_t n, size_t t, uint64_t r,
                                        RandomSource& rng) {
  if (n < 2) throw NeedMultipleServers("LP-Goldberg needs at least 2 servers");
  if (n > 255) throw TooManyServers("GF(2^8) admits at most 255 evaluation points");
  if (t < 1 || t >= n) throw ThresholdError("need 1 <= t < n");
  if (beta >= r) throw KeyOutOfRange("beta out of range");

  GoldbergQuerySet qs;
  qs.privacy_level = t;
  qs.target_beta = beta;
  qs.alphas.resize(n);
  for (size_t i = 0; i < n; ++i) qs.alphas[i] = goldberg_alpha_for_server(i);
  qs.shares.assign(n, std::vector<uint8_t>(r));

  // One independent degree-t polynomial per row, constant term e_beta[j].
  std::vector<uint8_t> coeffs(t + 1);
  for (uint64_t j = 0; j < r; ++j) {
    coeffs[0] = (j == beta) ? 1 : 0;
    rng.fill(coeffs.data() + 1, t);
    for (size_t i = 0; i < n; ++i) {
      qs.shares[i][j] = gf256::poly_eval(coeffs, qs.alphas[i]);
    }
  }
  return qs;
}

GoldbergAnswer goldberg_respond(const DatabaseMatrix& db,
                                std::span<const uint8_t> share) {
  if (share.size() != db.rows()) throw ShapeError("share length != record count");
  const uint32_t b = db.block_bytes();

  GoldbergAnswer ans;
  ans.words.assign(b, 0);

  for (uint64_t j = 0; j < db.rows(); ++j) {
    ans.bytes_touched += b;
    uint8_t c = share[j];
    if (c == 0) continue;
    const uint16_t log_c = gf256::log_table[c];
    auto row = db.row(j);
    for (uint32_t q = 0; q < b; ++q) {
      uint8_t w = row[q];
      if (w != 0) ans.words[q] ^= gf256::exp_table[log_c + gf256::log_table[w]];
    }
  }
  return ans;
}

RecoveryReport goldberg_reconstruct(std::span<const GoldbergResponse> responses,
                                    size_t t, size_t word_count) {
  size_t k = responses.size();
  if (k <= t) throw InsufficientResponses("LP-Goldberg needs more than t responses");

  std::vector<BlockShare> shares(k);
  for (size_t i = 0; i < k; ++i) shares[i] = {responses[i].alpha, responses[i].words};

  RecoveryReport report;
  RecoveryVerdict verdict = easy_recover(t, shares, word_count);
  if (!verdict.block.has_value()) {
    verdict = hard_recover(t, shares, word_count);
    report.used_hard_recover = true;
  }

  report.block = std::move(*verdict.block);
  for (size_t i : verdict.honest_set) report.honest_ids.push_back(responses[i].server_id);
  for (size_t i : verdict.byzantine_set)
    report.byzantine_ids.push_back(responses[i].server_id);
  return report;
}

}  // namespace pirgrid
