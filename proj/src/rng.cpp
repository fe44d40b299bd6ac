#include "ocdesign/rng.hpp"

#include "ocdesign/math.hpp"

namespace ocdesign {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& x,
                         const std::array<uint32_t, 2>& k) {
  const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * x[0];
  const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * x[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key) {
  std::array<uint32_t, 4> ctr = counter;
  std::array<uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, k);
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return ctr;
}

RngStream::RngStream(uint64_t root_seed, const StreamLane& lane)
    : key_{static_cast<uint32_t>(root_seed),
           static_cast<uint32_t>(root_seed >> 32)},
      lane_words_{lane.repetition, lane.domain,
                  static_cast<uint32_t>(lane.phase) |
                      (static_cast<uint32_t>(lane.hyp_index) << 8) |
                      (static_cast<uint32_t>(lane.attempt) << 16)} {}

void RngStream::refill() {
  buf_ = philox4x32({block_, lane_words_[0], lane_words_[1], lane_words_[2]},
                    key_);
  ++block_;
  pos_ = 0;
}

uint32_t RngStream::next_u32() {
  if (pos_ >= 4) refill();
  return buf_[pos_++];
}

uint64_t RngStream::next_u64() {
  const uint64_t hi = next_u32();
  const uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform_open() {
  const uint64_t bits = next_u64() >> 11;  // 53 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return std_normal_quantile(uniform_open()); }

}  // namespace ocdesign
