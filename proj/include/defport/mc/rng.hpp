#pragma once
// Thin scalar view of the counter-based generator, for sequential sampling
// (barrier draws, curve paths).  Same stream construction as the kernels.

#include <cstdint>

#include "defport/mc/vmath.hpp"

namespace defport::mc {

struct RngStream {
  std::uint64_t key = 0;
  std::uint64_t idx = 0;

  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t salt) : key(stream_key(seed, salt)) {}

  double next_uniform() {
    ScalarU64 c{idx++};
    return uniform_open<ScalarBatch>(key, c).v;
  }
  double next_normal() {
    ScalarU64 c{idx++};
    return normal_draw<ScalarBatch>(key, c).v;
  }
};

}  // namespace defport::mc
