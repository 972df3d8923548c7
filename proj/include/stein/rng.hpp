#pragma once

#include <array>
#include <cstdint>

namespace stein {

// Philox4x32-10 block function. Counter-based: the output is a pure function
// of (counter, key), so streams can be carved up by (seed, batch, replicate)
// and results never depend on thread scheduling.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// One replicate's stream: key = seed, counter = (block, 0, replicate, batch).
// Draws are sequential within the replicate; no two (seed,batch,replicate)
// triples share a counter prefix.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t batch, std::uint64_t replicate);

  std::uint64_t next_u64();
  // strictly inside (0,1); 53-bit resolution
  double uniform();
  double uniform(double lo, double hi);
  // standard normal via Box-Muller; consumes two uniforms per pair
  double gaussian();
  // uniform over {0, 1, ..., n-1}
  std::uint64_t uniform_int(std::uint64_t n);
  // +1 or -1, one bit
  double rademacher();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> base_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int avail_ = 0;
  double cached_gauss_ = 0.0;
  bool has_gauss_ = false;
};

}  // namespace stein
