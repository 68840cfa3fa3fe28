#include "pirgrid/field.hpp"

#include <array>
#include <bit>
#include <cstring>

namespace pirgrid {
namespace gf256 {
namespace {

struct Tables {
  std::array<uint8_t, 256> log{};
  std::array<uint8_t, 510> exp{};

  constexpr Tables() {
    uint16_t value = 1;
    for (int e = 0; e < 255; ++e) {
      exp[e] = static_cast<uint8_t>(value);
      log[value] = static_cast<uint8_t>(e);
      // multiply by the generator 0x03: value*2 + value
      uint16_t doubled = static_cast<uint16_t>(value << 1);
      if (doubled & 0x100) doubled ^= kModulus;
      value = doubled ^ value;
    }
    for (int e = 255; e < 510; ++e) exp[e] = exp[e - 255];
  }
};

constexpr Tables kTables{};

}  // namespace

const std::array<uint8_t, 256> log_table = kTables.log;
const std::array<uint8_t, 510> exp_table = kTables.exp;

uint8_t poly_eval(std::span<const uint8_t> coefficients, uint8_t x) {
  uint8_t acc = 0;
  for (size_t i = coefficients.size(); i-- > 0;) {
    acc = add(mul(acc, x), coefficients[i]);
  }
  return acc;
}

}  // namespace gf256

BitVector BitVector::random(size_t nbits, RandomSource& rng) {
  BitVector v(nbits);
  rng.fill(reinterpret_cast<uint8_t*>(v.words_.data()), v.words_.size() * 8);
  // clear the tail past nbits
  size_t rem = nbits % 64;
  if (rem != 0 && !v.words_.empty()) {
    v.words_.back() &= (uint64_t{1} << rem) - 1;
  }
  return v;
}

BitVector BitVector::unit(size_t nbits, size_t position) {
  BitVector v(nbits);
  v.set(position, true);
  return v;
}

BitVector BitVector::from_bytes(std::span<const uint8_t> bytes, size_t nbits) {
  if (bytes.size() != (nbits + 7) / 8) throw ShapeError("bit-vector byte length mismatch");
  BitVector v(nbits);
  std::memcpy(v.words_.data(), bytes.data(), bytes.size());
  size_t rem = nbits % 64;
  if (rem != 0 && !v.words_.empty()) {
    v.words_.back() &= (uint64_t{1} << rem) - 1;
  }
  return v;
}

void BitVector::xor_with(const BitVector& other) {
  if (nbits_ != other.nbits_) throw ShapeError("bit-vector length mismatch");
  for (size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
}

size_t BitVector::popcount() const {
  size_t n = 0;
  for (uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::vector<uint8_t> BitVector::to_bytes() const {
  std::vector<uint8_t> out(byte_size());
  std::memcpy(out.data(), words_.data(), out.size());
  return out;
}

void xor_accumulate(std::span<uint8_t> acc, std::span<const uint8_t> block) {
  if (acc.size() != block.size()) throw ShapeError("xor_accumulate length mismatch");
  size_t i = 0;
  for (; i + 8 <= acc.size(); i += 8) {
    uint64_t a, b;
    std::memcpy(&a, acc.data() + i, 8);
    std::memcpy(&b, block.data() + i, 8);
    a ^= b;
    std::memcpy(acc.data() + i, &a, 8);
  }
  for (; i < acc.size(); ++i) acc[i] ^= block[i];
}

}  // namespace pirgrid
