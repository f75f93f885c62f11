#pragma once

#include <cstdint>
#include <random>

namespace seglink {

// Thin wrapper around mt19937_64 with hand-rolled bounded draws.
// std::uniform_int_distribution is implementation-defined, which would break
// the bit-for-bit reproducibility the experiment harness promises.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform in [0, n). Modulo bias is irrelevant here: n is always tiny
  // compared to 2^64, and determinism is what matters.
  uint64_t below(uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  int below_int(int n) { return n <= 0 ? 0 : static_cast<int>(below(static_cast<uint64_t>(n))); }

  // Derive an independent stream, e.g. one per experiment trial, so results
  // do not depend on evaluation order or worker count.
  Rng fork(uint64_t salt) {
    uint64_t s = next() ^ (salt * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    return Rng(s);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace seglink
