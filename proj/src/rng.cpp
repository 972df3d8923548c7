#include "stein/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stein {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t batch,
                     std::uint64_t replicate) {
  key_ = {static_cast<std::uint32_t>(seed),
          static_cast<std::uint32_t>(seed >> 32)};
  base_ = {0u, static_cast<std::uint32_t>(replicate >> 32),
           static_cast<std::uint32_t>(replicate), batch};
}

void RngStream::refill() {
  auto ctr = base_;
  ctr[0] = static_cast<std::uint32_t>(block_);
  // block_ overflow past 2^32 folds into the replicate-high word; a single
  // replicate never draws 2^34 values in this codebase.
  auto out = philox4x32(ctr, key_);
  buf_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  buf_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  avail_ = 2;
  ++block_;
}

std::uint64_t RngStream::next_u64() {
  if (avail_ == 0) refill();
  return buf_[--avail_];
}

double RngStream::uniform() {
  // (k + 0.5) * 2^-53 with k in [0, 2^53): strictly inside (0,1)
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::gaussian() {
  if (has_gauss_) {
    has_gauss_ = false;
    return cached_gauss_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  cached_gauss_ = r * std::sin(a);
  has_gauss_ = true;
  return r * std::cos(a);
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  // rejection to kill modulo bias
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v > limit);
  return v % n;
}

double RngStream::rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

}  // namespace stein
