#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pirgrid/errors.hpp"
#include "pirgrid/rng.hpp"

namespace pirgrid {

// One evaluation point of a sharing polynomial. alpha must be nonzero;
// x = 0 is reserved for the secret itself.
struct SharePoint {
  uint8_t alpha;
  uint8_t value;
};

// Outcome of Easy/Hard recovery over one set of responses. Indices are
// positions into the response list handed to the recovery routine.
// An empty block with empty sets is the EasyRecover "escalate" signal.
struct RecoveryVerdict {
  std::optional<std::vector<uint8_t>> block;
  std::vector<size_t> honest_set;
  std::vector<size_t> byzantine_set;
};

// A responder's contribution to recovery: its evaluation point and the
// word vector it returned.
struct BlockShare {
  uint8_t alpha;
  std::vector<uint8_t> block;
};

// Shares a byte as n points of a uniformly random degree-<=t polynomial
// f with f(0) = secret, evaluated at the given alphas.
std::vector<SharePoint> share_secret(uint8_t secret, size_t t,
                                     std::span<const uint8_t> alphas,
                                     RandomSource& rng);

// Value at x = 0 of the unique degree-<=(|points|-1) interpolant.
uint8_t lagrange_at_zero(std::span<const SharePoint> points);

// Lagrange basis weights at evaluation point x for the given alphas:
// interpolant(x) = sum_i weight[i] * y_i.
std::vector<uint8_t> lagrange_weights(std::span<const uint8_t> alphas, uint8_t x);

// Fast path: wordwise interpolation at zero when all k responders are
// consistent with one degree-<=t polynomial per word. Any inconsistency
// yields the escalate signal (absent block, empty sets).
RecoveryVerdict easy_recover(size_t t, std::span<const BlockShare> responses,
                             size_t word_count);

// Slow path: per-word noisy polynomial decoding. Accepts the candidate
// polynomial family agreeing with more than floor(sqrt(k*t)) responders,
// which tolerates v < k - floor(sqrt(k*t)) corrupt responses. Ambiguity
// (two candidate blocks over the bound) or no candidate at all throws
// UnrecoverableResponse.
RecoveryVerdict hard_recover(size_t t, std::span<const BlockShare> responses,
                             size_t word_count);

// floor(sqrt(k*t)) agreement threshold used by hard_recover.
size_t list_decode_agreement_bound(size_t k, size_t t);

}  // namespace pirgrid
