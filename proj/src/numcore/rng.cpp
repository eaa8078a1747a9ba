#include "sphlab/numcore/rng.hpp"

namespace sphlab {

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed),
      stream_index_(stream_index),
      engine_(mix64(master_seed ^ mix64(stream_index + 0x632be59bd9b4e019ULL))) {}

RngStream RngStream::split(std::uint64_t child) const {
  return RngStream(master_seed_, mix64(stream_index_ * 0xd1b54a32d192ed03ULL + mix64(child)));
}

// Top 53 bits; never returns 1.0 (generate_canonical can, on some libstdc++).
double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::normal() { return normal_(engine_); }

std::uint64_t RngStream::below(std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
}

}  // namespace sphlab
