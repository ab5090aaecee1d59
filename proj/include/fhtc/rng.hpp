#pragma once

#include <array>
#include <cstdint>

namespace fhtc {

// Counter-based random stream built on Philox4x32-10 (Salmon et al., SC'11).
//
// The 64-bit seed is the Philox key. The 128-bit counter is split into the
// 64-bit stream id (high half) and a 64-bit block index (low half), so a
// (seed, stream) pair names an independent sequence and any position in it
// can be reached in O(1). Each block yields four 32-bit words.
//
// All transforms to floating point are written out here rather than taken
// from <random> distributions, whose algorithms differ between standard
// library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t block = 0)
      : seed_(seed), stream_(stream_id), block_(block) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  std::uint64_t block() const { return block_; }

  // Same seed and stream, positioned at an absolute block index. Used to
  // give each MC work unit (trial chunk, network) a fixed slice of the
  // sequence, which makes estimates independent of how work is partitioned.
  RngStream at_block(std::uint64_t block) const { return RngStream(seed_, stream_, block); }

  // Same seed, derived stream id.
  RngStream substream(std::uint64_t index) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1]; safe for log().
  double uniform_pos();
  double exponential();
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t poisson(double mean);

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fhtc
