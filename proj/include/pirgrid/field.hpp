#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pirgrid/errors.hpp"
#include "pirgrid/rng.hpp"

namespace pirgrid {

// GF(2^8) modulo x^8 + x^4 + x^3 + x + 1 (0x11B), generator 0x03.
// Addition is bytewise XOR; multiplication goes through log/antilog
// tables built once at startup.
namespace gf256 {

constexpr uint16_t kModulus = 0x11B;
constexpr uint8_t kGenerator = 0x03;

// log_table[0] is unused (log of zero is undefined).
extern const std::array<uint8_t, 256> log_table;
extern const std::array<uint8_t, 510> exp_table;  // doubled to skip the mod 255

inline uint8_t add(uint8_t a, uint8_t b) { return a ^ b; }

inline uint8_t mul(uint8_t a, uint8_t b) {
  if (a == 0 || b == 0) return 0;
  return exp_table[log_table[a] + log_table[b]];
}

inline uint8_t inv(uint8_t a) {
  if (a == 0) throw DivisionByZero();
  return exp_table[255 - log_table[a]];
}

inline uint8_t div(uint8_t a, uint8_t b) {
  if (b == 0) throw DivisionByZero();
  if (a == 0) return 0;
  return exp_table[255 + log_table[a] - log_table[b]];
}

// Horner evaluation; coefficients[i] multiplies x^i.
uint8_t poly_eval(std::span<const uint8_t> coefficients, uint8_t x);

}  // namespace gf256

// Packed bit-string over GF(2); the Chor query share type.
// Bit j lives at word j/64, position j%64; serialized LSB-first so
// byte k carries bits 8k..8k+7.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  static BitVector random(size_t nbits, RandomSource& rng);
  static BitVector unit(size_t nbits, size_t position);
  static BitVector from_bytes(std::span<const uint8_t> bytes, size_t nbits);

  size_t size() const { return nbits_; }
  size_t byte_size() const { return (nbits_ + 7) / 8; }

  bool get(size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }
  void set(size_t i, bool v) {
    uint64_t mask = uint64_t{1} << (i % 64);
    if (v)
      words_[i / 64] |= mask;
    else
      words_[i / 64] &= ~mask;
  }

  void xor_with(const BitVector& other);
  size_t popcount() const;
  std::vector<uint8_t> to_bytes() const;

  std::span<const uint64_t> words() const { return words_; }

  bool operator==(const BitVector&) const = default;

 private:
  size_t nbits_ = 0;
  std::vector<uint64_t> words_;
};

// Bytewise XOR of `block` into `acc`; the Chor aggregation primitive.
void xor_accumulate(std::span<uint8_t> acc, std::span<const uint8_t> block);

}  // namespace pirgrid
