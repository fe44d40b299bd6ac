#pragma once

#include <array>
#include <cstdint>

namespace ocdesign {

// Purpose tag for a random stream. Streams with different phases never
// overlap, whatever the draw counts.
enum class StreamPhase : uint8_t {
  kRepetition = 1,  // one simulation repetition (eta draw + data)
  kBootstrap = 2,   // one bootstrap resample
  kProxy = 3,       // CDF-inversion points for proxy distributions
};

// Identifies one logical stream. The draw sequence is a pure function of
// (root_seed, lane): identical inputs give identical sequences regardless
// of execution order or thread count.
struct StreamLane {
  StreamPhase phase = StreamPhase::kRepetition;
  uint8_t hyp_index = 0;   // j
  uint8_t attempt = 0;     // redraw attempt (failed repetitions), or sub-tag
  uint32_t domain = 0;     // simulation batch (anchor index, ...)
  uint32_t repetition = 0; // r
};

// One 128-bit block of the Philox4x32-10 bijection.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key);

// Counter-based stream (Philox4x32-10). The lane occupies the high words of
// the 128-bit counter and the block index the low word, so draws from
// distinct lanes can never collide.
class RngStream {
 public:
  RngStream(uint64_t root_seed, const StreamLane& lane);

  uint32_t next_u32();
  uint64_t next_u64();

  // Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform_open();

  // Standard normal by inversion; exactly one uniform consumed per draw.
  double normal();

 private:
  void refill();

  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 3> lane_words_;
  uint32_t block_ = 0;
  std::array<uint32_t, 4> buf_;
  int pos_ = 4;
};

}  // namespace ocdesign
