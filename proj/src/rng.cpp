#include "bsdelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace bsdelab {

namespace {
constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = std::uint64_t(kMulA) * c[0];
    std::uint64_t p1 = std::uint64_t(kMulB) * c[2];
    std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeylA;
    k[1] += kWeylB;
  }
  return c;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, stream_(stream) {}

void CounterStream::refill() {
  buf_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32), std::uint32_t(stream_),
                     std::uint32_t(stream_ >> 32)},
                    key_);
  ++block_;
  pos_ = 0;
}

double CounterStream::uniform() {
  if (pos_ >= 4) refill();
  std::uint64_t a = buf_[pos_] >> 5, b = buf_[pos_ + 1] >> 6;
  pos_ += 2;
  return (double(a * 67108864u + b) + 0.5) / 9007199254740992.0;
}

double CounterStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  have_spare_ = true;
  return r * std::cos(th);
}

}  // namespace bsdelab
