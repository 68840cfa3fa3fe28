#include <algorithm>
#include <vector>

#include "doctest.h"
#include "pirgrid/field.hpp"
#include "pirgrid/sss.hpp"

using namespace pirgrid;

namespace {

std::vector<uint8_t> alphas_upto(size_t n) {
  std::vector<uint8_t> a(n);
  for (size_t i = 0; i < n; ++i) a[i] = static_cast<uint8_t>(i + 1);
  return a;
}

// Shares every byte of `block` independently; returns one BlockShare per
// alpha. Drives the Easy/Hard recovery tests.
std::vector<BlockShare> share_block(const std::vector<uint8_t>& block, size_t t,
                                    const std::vector<uint8_t>& alphas,
                                    RandomSource& rng) {
  std::vector<BlockShare> out(alphas.size());
  for (size_t i = 0; i < alphas.size(); ++i) {
    out[i].alpha = alphas[i];
    out[i].block.resize(block.size());
  }
  for (size_t q = 0; q < block.size(); ++q) {
    auto points = share_secret(block[q], t, alphas, rng);
    for (size_t i = 0; i < alphas.size(); ++i) out[i].block[q] = points[i].value;
  }
  return out;
}

}  // namespace

TEST_CASE("share_secret rejects bad parameters") {
  DeterministicRandom rng(1);
  auto alphas = alphas_upto(3);
  CHECK_THROWS_AS(share_secret(0x42, 0, alphas, rng), ThresholdError);
  CHECK_THROWS_AS(share_secret(0x42, 3, alphas, rng), ThresholdError);
  std::vector<uint8_t> with_zero = {0x00, 0x01, 0x02};
  CHECK_THROWS_AS(share_secret(0x42, 1, with_zero, rng), InvalidEvaluationPoint);
  std::vector<uint8_t> dup = {0x01, 0x02, 0x02};
  CHECK_THROWS_AS(share_secret(0x42, 1, dup, rng), InvalidEvaluationPoint);
}

TEST_CASE("any 2 of 3 shares recover a (1,3) sharing") {
  DeterministicRandom rng(2);
  auto alphas = alphas_upto(3);
  for (int s = 0; s < 256; ++s) {
    auto shares = share_secret(static_cast<uint8_t>(s), 1, alphas, rng);
    for (size_t i = 0; i < 3; ++i)
      for (size_t j = i + 1; j < 3; ++j) {
        std::vector<SharePoint> pair = {shares[i], shares[j]};
        CHECK(lagrange_at_zero(pair) == s);
      }
  }
}

TEST_CASE("t shares are consistent with every candidate secret") {
  // Definition of t-privacy at the algebra level: pick any t points of a
  // sharing, adjoin (0, s') for each of the 256 candidates, and confirm
  // that the resulting degree-<=t interpolant passes through all of them.
  DeterministicRandom rng(3);
  size_t t = 2, n = 5;
  auto alphas = alphas_upto(n);
  auto shares = share_secret(0xA7, t, alphas, rng);

  for (int candidate = 0; candidate < 256; ++candidate) {
    // interpolate through (0, candidate) and the two chosen shares, then
    // verify the polynomial really takes those values
    auto weights_at = [&](uint8_t x) {
      uint8_t xs[3] = {0x00, shares[1].alpha, shares[3].alpha};
      uint8_t ys[3] = {static_cast<uint8_t>(candidate), shares[1].value, shares[3].value};
      uint8_t acc = 0;
      for (int i = 0; i < 3; ++i) {
        uint8_t num = 1, den = 1;
        for (int j = 0; j < 3; ++j) {
          if (i == j) continue;
          num = gf256::mul(num, gf256::add(x, xs[j]));
          den = gf256::mul(den, gf256::add(xs[i], xs[j]));
        }
        acc = gf256::add(acc, gf256::mul(gf256::div(num, den), ys[i]));
      }
      return acc;
    };
    CHECK(weights_at(0x00) == candidate);
    CHECK(weights_at(shares[1].alpha) == shares[1].value);
    CHECK(weights_at(shares[3].alpha) == shares[3].value);
  }
}

TEST_CASE("lagrange_at_zero") {
  SUBCASE("single point is the constant interpolant") {
    std::vector<SharePoint> one = {{0x09, 0x5e}};
    CHECK(lagrange_at_zero(one) == 0x5e);
  }

  SUBCASE("duplicate alphas rejected") {
    std::vector<SharePoint> dup = {{0x01, 0x10}, {0x01, 0x20}};
    CHECK_THROWS_AS(lagrange_at_zero(dup), InvalidEvaluationPoint);
  }

  SUBCASE("round trip and subset consistency") {
    DeterministicRandom rng(4);
    auto alphas = alphas_upto(6);
    for (int trial = 0; trial < 100; ++trial) {
      uint8_t s = rng.byte();
      size_t t = 1 + rng.below(4);  // 1..4
      auto shares = share_secret(s, t, alphas, rng);

      // every (t+1)-subset and the (t+2)-prefix agree on the secret
      std::vector<SharePoint> prefix(shares.begin(), shares.begin() + t + 2);
      CHECK(lagrange_at_zero(prefix) == s);
      std::vector<SharePoint> tail(shares.end() - (t + 1), shares.end());
      CHECK(lagrange_at_zero(tail) == s);
    }
  }
}

TEST_CASE("easy_recover") {
  DeterministicRandom rng(5);
  auto alphas = alphas_upto(6);
  std::vector<uint8_t> block(16);
  rng.fill(block.data(), block.size());

  SUBCASE("consistent responses recover the block") {
    auto responses = share_block(block, 2, alphas, rng);
    auto verdict = easy_recover(2, responses, block.size());
    REQUIRE(verdict.block.has_value());
    CHECK(*verdict.block == block);
    CHECK(verdict.honest_set.size() == 6);
    CHECK(verdict.byzantine_set.empty());
  }

  SUBCASE("one flipped byte escalates") {
    auto responses = share_block(block, 2, alphas, rng);
    responses[4].block[7] ^= 0x20;
    auto verdict = easy_recover(2, responses, block.size());
    CHECK_FALSE(verdict.block.has_value());
    CHECK(verdict.honest_set.empty());
    CHECK(verdict.byzantine_set.empty());
  }

  SUBCASE("k = t is below threshold") {
    auto responses = share_block(block, 2, alphas, rng);
    responses.resize(2);
    CHECK_THROWS_AS(easy_recover(2, responses, block.size()), InsufficientResponses);
  }

  SUBCASE("dropping responses leaves the result unchanged") {
    auto responses = share_block(block, 2, alphas, rng);
    for (size_t k = 3; k <= 6; ++k) {
      std::vector<BlockShare> subset(responses.begin(), responses.begin() + k);
      auto verdict = easy_recover(2, subset, block.size());
      REQUIRE(verdict.block.has_value());
      CHECK(*verdict.block == block);
    }
  }
}

TEST_CASE("hard_recover") {
  DeterministicRandom rng(6);
  auto alphas = alphas_upto(6);
  std::vector<uint8_t> block(16);
  rng.fill(block.data(), block.size());

  SUBCASE("noiseless decoding equals easy_recover") {
    for (size_t t = 1; t <= 4; ++t) {
      auto responses = share_block(block, t, alphas, rng);
      auto easy = easy_recover(t, responses, block.size());
      auto hard = hard_recover(t, responses, block.size());
      REQUIRE(hard.block.has_value());
      CHECK(*hard.block == *easy.block);
      CHECK(hard.honest_set == easy.honest_set);
      CHECK(hard.byzantine_set.empty());
    }
  }

  SUBCASE("k=6 t=1 corrects 3 random corruptions") {
    // bound: v < 6 - floor(sqrt(6)) = 4
    CHECK(list_decode_agreement_bound(6, 1) == 2);
    auto responses = share_block(block, 1, alphas, rng);
    for (size_t i : {1u, 3u, 4u}) {
      rng.fill(responses[i].block.data(), responses[i].block.size());
    }
    auto verdict = hard_recover(1, responses, block.size());
    REQUIRE(verdict.block.has_value());
    CHECK(*verdict.block == block);
    CHECK(verdict.byzantine_set == std::vector<size_t>{1, 3, 4});
    CHECK(verdict.honest_set == std::vector<size_t>{0, 2, 5});
  }

  SUBCASE("adversarial corruptions at the bound never decode silently wrong") {
    // k=6, t=2: bound floor(sqrt(12)) = 3 means v=3 violates
    // v < k - bound = 3. Place the three corruptions on a second
    // consistent polynomial family so both candidates tie at 3.
    CHECK(list_decode_agreement_bound(6, 2) == 3);
    auto responses = share_block(block, 2, alphas, rng);

    std::vector<uint8_t> decoy(block.size());
    rng.fill(decoy.data(), decoy.size());
    auto decoy_responses = share_block(decoy, 2, alphas, rng);
    for (size_t i : {0u, 2u, 5u}) responses[i].block = decoy_responses[i].block;

    CHECK_THROWS_AS(hard_recover(2, responses, block.size()), UnrecoverableResponse);
  }

  SUBCASE("decoding bound holds over random corruption patterns") {
    DeterministicRandom trial_rng(99);
    for (int trial = 0; trial < 40; ++trial) {
      size_t k = 4 + trial_rng.below(9);   // 4..12
      size_t t = 1 + trial_rng.below(std::min<size_t>(k - 2, 4));
      auto as = alphas_upto(k);
      std::vector<uint8_t> data(8);
      trial_rng.fill(data.data(), data.size());
      auto responses = share_block(data, t, as, trial_rng);

      size_t bound = list_decode_agreement_bound(k, t);
      if (k <= bound + 1) continue;  // no corruption budget at all
      // when the bound does not exceed t, any (t+1)-subset mixing honest
      // and corrupted points ties it, and the decoder must refuse; the
      // adversarial subcase above covers that regime
      if (bound <= t) continue;
      size_t v = trial_rng.below(k - bound);  // v < k - bound
      std::vector<size_t> corrupt;
      while (corrupt.size() < v) {
        size_t i = trial_rng.below(k);
        if (std::find(corrupt.begin(), corrupt.end(), i) == corrupt.end())
          corrupt.push_back(i);
      }
      for (size_t i : corrupt)
        trial_rng.fill(responses[i].block.data(), responses[i].block.size());

      auto verdict = hard_recover(t, responses, data.size());
      REQUIRE(verdict.block.has_value());
      CHECK(*verdict.block == data);
      std::sort(corrupt.begin(), corrupt.end());
      CHECK(verdict.byzantine_set == corrupt);
    }
  }
}
