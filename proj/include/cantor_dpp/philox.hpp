#ifndef CANTOR_DPP_PHILOX_HPP
#define CANTOR_DPP_PHILOX_HPP

#include <array>
#include <cstdint>

namespace cantor_dpp {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

// Stream of uniforms for one (seed, stream) pair; draw k uses counter (stream, k).
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

  // uniform in [0, 1) with 53 random bits
  double uniform() {
    if (used_ >= 2) refill();
    const std::uint64_t hi = buffer_[2 * used_];
    const std::uint64_t lo = buffer_[2 * used_ + 1];
    ++used_;
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return static_cast<double>(bits) * 0x1p-53;
  }

  // uniform in (0, 1)
  double open_uniform() {
    double u;
    do u = uniform();
    while (u == 0.0);
    return u;
  }

  std::uint64_t draws() const { return counter_; }

 private:
  void refill() {
    buffer_ = Philox4x32::block({static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
                                 static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32)},
                                key_);
    ++counter_;
    used_ = 0;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 2;
};

}  // namespace cantor_dpp

#endif  // CANTOR_DPP_PHILOX_HPP
