#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace pirgrid {

// Byte source behind every random choice the protocols make.
// Privacy rests on share uniformity, so production code uses the OS
// entropy pool; tests inject a seeded deterministic stream.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(uint8_t* out, size_t len) = 0;

  uint8_t byte() {
    uint8_t b;
    fill(&b, 1);
    return b;
  }

  uint8_t nonzero_byte() {
    uint8_t b;
    do {
      fill(&b, 1);
    } while (b == 0);
    return b;
  }

  // Unbiased integer in [0, bound) via rejection.
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
      fill(reinterpret_cast<uint8_t*>(&v), sizeof v);
    } while (v >= limit);
    return v % bound;
  }
};

class SystemRandom final : public RandomSource {
 public:
  void fill(uint8_t* out, size_t len) override {
    static thread_local std::random_device rd;
    size_t i = 0;
    while (i < len) {
      unsigned v = rd();
      for (size_t b = 0; b < sizeof(unsigned) && i < len; ++b, ++i) {
        out[i] = static_cast<uint8_t>(v >> (8 * b));
      }
    }
  }
};

// splitmix64 stream; stable across platforms and compilers, which the
// seeded fault profiles and synthetic data generator depend on.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(uint64_t seed) : state_(seed) {}

  void fill(uint8_t* out, size_t len) override {
    size_t i = 0;
    while (i < len) {
      uint64_t v = next();
      for (size_t b = 0; b < 8 && i < len; ++b, ++i) {
        out[i] = static_cast<uint8_t>(v >> (8 * b));
      }
    }
  }

 private:
  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

}  // namespace pirgrid
