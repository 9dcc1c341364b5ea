#pragma once

#include <array>
#include <cstdint>

namespace bsdelab {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// One independent substream per (seed, stream id). Draws are a pure function
// of (seed, stream, draw index), so any schedule of streams reproduces the
// same numbers.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream);

  // uniform on the open interval (0, 1)
  double uniform();
  // standard normal, Box-Muller on consecutive uniform pairs
  double normal();

  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bsdelab
