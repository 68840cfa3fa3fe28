#include "pirgrid/chor.hpp"

#include <bit>

#include "pirgrid/errors.hpp"

namespace pirgrid {

ChorQuerySet chor_build_queries(uint64_t beta, size_t n, uint64_t r, RandomSource& rng) {
  if (n < 2) throw NeedMultipleServers("LP-Chor needs at least 2 servers");
  if (beta >= r) throw KeyOutOfRange("beta out of range");

  ChorQuerySet qs;
  qs.target_beta = beta;
  qs.shares.reserve(n);

  BitVector last = BitVector::unit(r, beta);
  for (size_t i = 0; i + 1 < n; ++i) {
    qs.shares.push_back(BitVector::random(r, rng));
    last.xor_with(qs.shares.back());
  }
  qs.shares.push_back(std::move(last));
  return qs;
}

ChorAnswer chor_respond(const DatabaseMatrix& db, const BitVector& query) {
  if (query.size() != db.rows()) throw ShapeError("query length != record count");

  ChorAnswer ans;
  ans.block.assign(db.block_bytes(), 0);
  ans.table_bound_rows = db.rows();

  // Scan set bits word at a time; only selected rows are XORed in.
  auto words = query.words();
  for (size_t wi = 0; wi < words.size(); ++wi) {
    uint64_t w = words[wi];
    while (w != 0) {
      uint64_t j = wi * 64 + static_cast<uint64_t>(std::countr_zero(w));
      xor_accumulate(ans.block, db.row(j));
      ++ans.rows_touched;
      w &= w - 1;
    }
  }
  return ans;
}

std::vector<uint8_t> chor_reconstruct(std::span<const ChorResponse> responses, size_t n) {
  if (responses.size() != n)
    throw IncompleteResponses("LP-Chor needs all n responses");
  std::vector<uint8_t> block(responses[0].block.size(), 0);
  for (const auto& r : responses) xor_accumulate(block, r.block);
  return block;
}

}  // namespace pirgrid
