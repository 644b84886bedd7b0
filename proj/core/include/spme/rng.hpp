#ifndef SPME_RNG_HPP
#define SPME_RNG_HPP

#include <array>
#include <cstdint>

namespace spme {

/// Philox4x64-10 keyed block function: 10 rounds over a 256-bit counter with a
/// 128-bit key (multipliers 0xD2E7470EE14C6C93 / 0xCA5A826395121157, Weyl keys
/// 0x9E3779B97F4A7C15 / 0xBB67AE8584CAA73B).
std::array<std::uint64_t, 4> philox4x64_10(std::array<std::uint64_t, 4> counter,
                                           std::array<std::uint64_t, 2> key);

/// One counter-based random stream: key = (seed, stream id), counter = 128-bit
/// block index. Streams with distinct (seed, stream) pairs are independent;
/// generation order within a stream is the block order, so state is just the
/// block index plus buffer positions.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t raw64();

  /// Uniform on (0, 1] (53-bit mantissa, never returns 0).
  double uniform();

  /// Standard normal via Box-Muller on consecutive uniforms.
  double gaussian();

  struct State {
    std::uint64_t block_lo = 0;
    std::uint64_t block_hi = 0;
    int word = 4;             // next unread word in the current block buffer
    bool has_spare = false;   // buffered second Box-Muller deviate
    double spare = 0.0;
  };
  State state() const { return st_; }
  void restore(const State& st);

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream() const { return key_[1]; }

  static constexpr const char* kAlgorithm = "philox4x64-10";

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> buffer_{};
  State st_;
};

/// Stream-id composition: experiments reserve a purpose tag so chains, path
/// ensembles and bootstrap draws never collide.
namespace stream_id {
constexpr std::uint64_t make(std::uint32_t purpose, std::uint32_t index) {
  return (static_cast<std::uint64_t>(purpose) << 32) | index;
}
constexpr std::uint32_t kChain = 1;
constexpr std::uint32_t kEnsemble = 2;
constexpr std::uint32_t kBootstrap = 3;
constexpr std::uint32_t kScratch = 4;
}  // namespace stream_id

}  // namespace spme

#endif
