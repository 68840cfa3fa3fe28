#include "pirgrid/sss.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pirgrid/field.hpp"

namespace pirgrid {
namespace {

void check_alphas(std::span<const uint8_t> alphas) {
  for (size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] == 0) throw InvalidEvaluationPoint("alpha must be nonzero");
    for (size_t j = i + 1; j < alphas.size(); ++j) {
      if (alphas[i] == alphas[j]) throw InvalidEvaluationPoint("duplicate alpha");
    }
  }
}

}  // namespace

std::vector<SharePoint> share_secret(uint8_t secret, size_t t,
                                     std::span<const uint8_t> alphas,
                                     RandomSource& rng) {
  size_t n = alphas.size();
  if (t < 1 || t >= n) throw ThresholdError("need 1 <= t < n");
  check_alphas(alphas);

  std::vector<uint8_t> coeffs(t + 1);
  coeffs[0] = secret;
  rng.fill(coeffs.data() + 1, t);

  std::vector<SharePoint> shares(n);
  for (size_t i = 0; i < n; ++i) {
    shares[i] = {alphas[i], gf256::poly_eval(coeffs, alphas[i])};
  }
  return shares;
}

std::vector<uint8_t> lagrange_weights(std::span<const uint8_t> alphas, uint8_t x) {
  check_alphas(alphas);
  size_t k = alphas.size();
  std::vector<uint8_t> weights(k);
  for (size_t i = 0; i < k; ++i) {
    uint8_t num = 1, den = 1;
    for (size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      num = gf256::mul(num, gf256::add(x, alphas[j]));
      den = gf256::mul(den, gf256::add(alphas[i], alphas[j]));
    }
    weights[i] = gf256::div(num, den);
  }
  return weights;
}

uint8_t lagrange_at_zero(std::span<const SharePoint> points) {
  if (points.empty()) throw InvalidEvaluationPoint("no points");
  std::vector<uint8_t> alphas(points.size());
  for (size_t i = 0; i < points.size(); ++i) alphas[i] = points[i].alpha;
  auto weights = lagrange_weights(alphas, 0);
  uint8_t acc = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    acc = gf256::add(acc, gf256::mul(weights[i], points[i].value));
  }
  return acc;
}

size_t list_decode_agreement_bound(size_t k, size_t t) {
  return static_cast<size_t>(std::floor(std::sqrt(static_cast<double>(k * t))));
}

RecoveryVerdict easy_recover(size_t t, std::span<const BlockShare> responses,
                             size_t word_count) {
  size_t k = responses.size();
  if (k <= t) throw InsufficientResponses("need more than t responses");
  std::vector<uint8_t> alphas(k);
  for (size_t i = 0; i < k; ++i) {
    alphas[i] = responses[i].alpha;
    if (responses[i].block.size() != word_count)
      throw ShapeError("response word count mismatch");
  }
  check_alphas(alphas);

  // The first t+1 points pin the candidate polynomial per word; the
  // remaining k-t-1 points must all lie on it.
  std::span<const uint8_t> base(alphas.data(), t + 1);
  auto at_zero = lagrange_weights(base, 0);
  std::vector<std::vector<uint8_t>> predict;
  for (size_t m = t + 1; m < k; ++m) predict.push_back(lagrange_weights(base, alphas[m]));

  std::vector<uint8_t> block(word_count);
  for (size_t q = 0; q < word_count; ++q) {
    for (size_t m = t + 1; m < k; ++m) {
      uint8_t expect = 0;
      for (size_t i = 0; i <= t; ++i)
        expect = gf256::add(expect, gf256::mul(predict[m - t - 1][i], responses[i].block[q]));
      if (expect != responses[m].block[q]) return {};  // escalate
    }
    uint8_t v = 0;
    for (size_t i = 0; i <= t; ++i)
      v = gf256::add(v, gf256::mul(at_zero[i], responses[i].block[q]));
    block[q] = v;
  }

  RecoveryVerdict verdict;
  verdict.block = std::move(block);
  verdict.honest_set.resize(k);
  for (size_t i = 0; i < k; ++i) verdict.honest_set[i] = i;
  return verdict;
}

RecoveryVerdict hard_recover(size_t t, std::span<const BlockShare> responses,
                             size_t word_count) {
  size_t k = responses.size();
  if (k <= t) throw InsufficientResponses("need more than t responses");
  std::vector<uint8_t> alphas(k);
  for (size_t i = 0; i < k; ++i) {
    alphas[i] = responses[i].alpha;
    if (responses[i].block.size() != word_count)
      throw ShapeError("response word count mismatch");
  }
  check_alphas(alphas);

  size_t bound = list_decode_agreement_bound(k, t);

  // Combinatorial list decoding: every (t+1)-subset proposes the
  // polynomial family through its points; a candidate survives if more
  // than floor(sqrt(k*t)) responders lie on it at every word position.
  struct Candidate {
    std::vector<uint8_t> block;
    std::vector<bool> agrees;
    size_t agree_count;
  };
  std::vector<Candidate> accepted;

  std::vector<size_t> subset(t + 1);
  for (size_t i = 0; i <= t; ++i) subset[i] = i;

  auto consider = [&](const std::vector<size_t>& s) {
    std::vector<uint8_t> sub_alphas(t + 1);
    for (size_t i = 0; i <= t; ++i) sub_alphas[i] = alphas[s[i]];
    auto at_zero = lagrange_weights(sub_alphas, 0);

    std::vector<bool> agrees(k, false);
    for (size_t i = 0; i <= t; ++i) agrees[s[i]] = true;

    for (size_t m = 0; m < k; ++m) {
      if (agrees[m]) continue;
      auto w = lagrange_weights(sub_alphas, alphas[m]);
      bool ok = true;
      for (size_t q = 0; q < word_count && ok; ++q) {
        uint8_t expect = 0;
        for (size_t i = 0; i <= t; ++i)
          expect = gf256::add(expect, gf256::mul(w[i], responses[s[i]].block[q]));
        ok = expect == responses[m].block[q];
      }
      agrees[m] = ok;
    }
    size_t agree_count = static_cast<size_t>(std::count(agrees.begin(), agrees.end(), true));
    if (agree_count <= bound) return;

    std::vector<uint8_t> block(word_count);
    for (size_t q = 0; q < word_count; ++q) {
      uint8_t v = 0;
      for (size_t i = 0; i <= t; ++i)
        v = gf256::add(v, gf256::mul(at_zero[i], responses[s[i]].block[q]));
      block[q] = v;
    }
    for (auto& c : accepted) {
      if (c.block == block) {
        if (agree_count > c.agree_count) {
          c.agrees = agrees;
          c.agree_count = agree_count;
        }
        return;
      }
    }
    accepted.push_back({std::move(block), std::move(agrees), agree_count});
  };

  // Enumerate (t+1)-subsets in lexicographic order.
  while (true) {
    consider(subset);
    size_t i = t + 1;
    while (i-- > 0) {
      if (subset[i] + 1 <= k - (t + 1 - i)) {
        ++subset[i];
        for (size_t j = i + 1; j <= t; ++j) subset[j] = subset[j - 1] + 1;
        break;
      }
      if (i == 0) goto done;
    }
  }
done:

  if (accepted.empty())
    throw UnrecoverableResponse("no polynomial meets the agreement bound");
  if (accepted.size() > 1)
    throw UnrecoverableResponse("ambiguous decoding: multiple candidates over the bound");

  RecoveryVerdict verdict;
  verdict.block = std::move(accepted[0].block);
  for (size_t i = 0; i < k; ++i) {
    if (accepted[0].agrees[i])
      verdict.honest_set.push_back(i);
    else
      verdict.byzantine_set.push_back(i);
  }
  return verdict;
}

}  // namespace pirgrid
