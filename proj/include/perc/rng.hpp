#pragma once

#include <cstdint>

namespace perc {

// Deterministic per-replication random stream.
//
// The engine is xoshiro256++ (Blackman & Vigna, public domain). Stream k of a
// master seed is seeded with SplitMix64 outputs 4k..4k+3, so distinct stream
// indices consume disjoint blocks of the SplitMix64 sequence and the derivation
// is a pure function of (master_seed, stream_index) -- no jump-ahead, no
// dependence on call order or thread schedule.
class RngStream {
 public:
  static RngStream derive(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t next_u64();

  // Uniform double in [0, 1), 53 random bits.
  double next_unit();

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

 private:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t state_[4];
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
};

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
  return RngStream::derive(master_seed, stream_index);
}

}  // namespace perc
