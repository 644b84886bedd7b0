#include "spme/rng.hpp"

#include <cmath>
#include <numbers>

namespace spme {

namespace {

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64_10(std::array<std::uint64_t, 4> counter,
                                           std::array<std::uint64_t, 2> key) {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, counter[0], hi0, lo0);
    mulhilo(kMul1, counter[2], hi1, lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

void RngStream::refill() {
  buffer_ = philox4x64_10({st_.block_lo, st_.block_hi, 0, 0}, key_);
  if (++st_.block_lo == 0) ++st_.block_hi;
  st_.word = 0;
}

std::uint64_t RngStream::raw64() {
  if (st_.word >= 4) refill();
  return buffer_[static_cast<size_t>(st_.word++)];
}

double RngStream::uniform() {
  // (0, 1]: top 53 bits scaled, complemented so 0 cannot occur.
  return 1.0 - static_cast<double>(raw64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (st_.has_spare) {
    st_.has_spare = false;
    return st_.spare;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  st_.spare = radius * std::sin(angle);
  st_.has_spare = true;
  return radius * std::cos(angle);
}

void RngStream::restore(const State& st) {
  st_ = st;
  if (st_.word < 4) {
    // Rebuild the partially consumed block (its index is one behind).
    std::uint64_t lo = st_.block_lo;
    std::uint64_t hi = st_.block_hi;
    if (lo == 0) --hi;
    --lo;
    buffer_ = philox4x64_10({lo, hi, 0, 0}, key_);
  }
}

}  // namespace spme
