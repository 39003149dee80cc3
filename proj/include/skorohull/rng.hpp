#pragma once

#include <array>
#include <cstdint>

namespace skorohull {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block is a
// pure function of (counter, key), which makes every copy's stream
// reproducible regardless of evaluation order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

// splitmix64 finalizer; used to derive seeds from coordinates.
std::uint64_t mix64(std::uint64_t x);

// Stream of standard normals keyed by (seed, stream id). Uses Box-Muller on
// 53-bit uniforms so values are identical across standard libraries.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream);

  double next();

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<double, 2> buffer_{};
  int pos_ = 2;
};

}  // namespace skorohull
